#include "mss/curve_io.hpp"

#include <cmath>
#include <fstream>

#include "mss/errors.hpp"

namespace mss {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw InputError("unknown key \"" + it.key() + "\" in " + where);
    }
}

double finite_number(const json& v, const std::string& where) {
    if (!v.is_number())
        throw InputError(where + " must be a number");
    double d = v.get<double>();
    if (!std::isfinite(d))
        throw InputError(where + " must be finite");
    return d;
}

std::vector<double> coeff_array(const json& v, const std::string& where) {
    if (!v.is_array())
        throw InputError(where + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(finite_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

FourierSeries parse_series(const json& v, const std::string& where) {
    if (!v.is_object())
        throw InputError(where + " must be an object");
    reject_unknown_keys(v, {"const", "cos", "sin"}, where);
    FourierSeries s;
    if (v.contains("const")) s.constant = finite_number(v["const"], where + ".const");
    if (v.contains("cos")) s.cos_coeffs = coeff_array(v["cos"], where + ".cos");
    if (v.contains("sin")) s.sin_coeffs = coeff_array(v["sin"], where + ".sin");
    return s;
}

json series_to_json(const FourierSeries& s) {
    nlohmann::ordered_json out;
    out["const"] = s.constant;
    out["cos"] = s.cos_coeffs;
    out["sin"] = s.sin_coeffs;
    return out;
}

} // namespace

CurveFamily parse_curve(const json& j) {
    if (!j.is_object())
        throw InputError("curve document must be a JSON object");
    reject_unknown_keys(j, {"name", "x", "y", "family"}, "curve");
    if (!j.contains("name") || !j["name"].is_string())
        throw InputError("curve requires a string \"name\"");
    if (!j.contains("x") || !j.contains("y"))
        throw InputError("curve requires \"x\" and \"y\" series");

    CurveFamily c;
    c.name = j["name"].get<std::string>();
    c.x = parse_series(j["x"], "x");
    c.y = parse_series(j["y"], "y");

    if (j.contains("family")) {
        const json& fam = j["family"];
        if (!fam.is_array())
            throw InputError("\"family\" must be an array");
        for (std::size_t i = 0; i < fam.size(); ++i) {
            const json& term = fam[i];
            std::string where = "family[" + std::to_string(i) + "]";
            if (!term.is_object())
                throw InputError(where + " must be an object");
            reject_unknown_keys(term, {"order", "x", "y"}, where);
            CurveFamily::Perturbation p;
            if (!term.contains("order") || !term["order"].is_number_integer())
                throw InputError(where + " requires an integer \"order\"");
            long long ord = term["order"].get<long long>();
            if (ord < 1 || ord > 8)
                throw InputError(where + ".order must be in [1, 8]");
            p.order = static_cast<int>(ord);
            if (term.contains("x")) p.dx = parse_series(term["x"], where + ".x");
            if (term.contains("y")) p.dy = parse_series(term["y"], where + ".y");
            c.perturbations.push_back(std::move(p));
        }
    }

    if (c.x.harmonics() == 0 && c.y.harmonics() == 0)
        throw InputError("curve is constant: x and y have no harmonics");
    return c;
}

CurveFamily load_curve_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open curve file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("invalid JSON in " + path + ": " + e.what());
    }
    return parse_curve(j);
}

nlohmann::ordered_json curve_to_json(const CurveFamily& curve) {
    nlohmann::ordered_json out;
    out["name"] = curve.name;
    out["x"] = series_to_json(curve.x);
    out["y"] = series_to_json(curve.y);
    if (!curve.perturbations.empty()) {
        nlohmann::ordered_json fam = nlohmann::ordered_json::array();
        for (const auto& p : curve.perturbations) {
            nlohmann::ordered_json term;
            term["order"] = p.order;
            term["x"] = series_to_json(p.dx);
            term["y"] = series_to_json(p.dy);
            fam.push_back(std::move(term));
        }
        out["family"] = std::move(fam);
    }
    return out;
}

} // namespace mss
