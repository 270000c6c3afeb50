#include "mss/report.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "mss/errors.hpp"

namespace mss {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double two_pi = 6.283185307179586476925286766559;

ordered_json vec_json(MinkVec v) { return ordered_json::array({v.u0, v.u1}); }

ordered_json circle_json(const PseudoCircle& c) {
    ordered_json out;
    out["kind"] = to_string(c.kind);
    out["center"] = vec_json(c.center);
    out["r2"] = c.r2;
    return out;
}

ordered_json contact_json(const ContactPoint& cp) {
    ordered_json out;
    out["t"] = cp.t;
    out["order"] = cp.order;
    out["point"] = vec_json(cp.point);
    out["tangent_type"] = to_string(cp.tangent_type);
    out["kappa"] = cp.kappa ? ordered_json(*cp.kappa) : ordered_json(nullptr);
    out["kappa_prime"] =
        cp.kappa_prime ? ordered_json(*cp.kappa_prime) : ordered_json(nullptr);
    out["branch"] =
        cp.branch ? ordered_json(to_string(*cp.branch)) : ordered_json(nullptr);
    out["near_lightlike"] = cp.near_lightlike;
    return out;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

/// SVG path from polyline in already-flipped (x, -y) page coordinates.
std::string path_of(const std::vector<std::pair<double, double>>& pts) {
    std::string d;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        d += (i == 0 ? "M" : " L");
        d += fmt6(pts[i].first);
        d += ",";
        d += fmt6(pts[i].second);
    }
    return d;
}

std::vector<std::pair<double, double>> polyline_from_json(const json& arr,
                                                          const char* where) {
    if (!arr.is_array()) throw InputError(std::string(where) + " must be an array");
    std::vector<std::pair<double, double>> out;
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
            !p[1].is_number())
            throw InputError(std::string(where) + " entries must be [x, y]");
        out.emplace_back(p[0].get<double>(), -p[1].get<double>());
    }
    return out;
}

} // namespace

ordered_json config_echo(const Config& cfg) {
    ordered_json out;
    out["eps_light_rel"] = cfg.eps_light_rel;
    out["tol"] = cfg.tol;
    out["gap_factor"] = cfg.gap_factor;
    out["grid_n"] = cfg.grid_n;
    out["diag_cells"] = cfg.diag_cells;
    out["lightlike_mask_cells"] = cfg.lightlike_mask_cells;
    out["parallel_tol"] = cfg.parallel_tol;
    out["refine_g_tol"] = cfg.refine_g_tol;
    out["lightlike_grid_n"] = cfg.lightlike_grid_n;
    out["root_bisect_tol"] = cfg.root_bisect_tol;
    out["label_grid_n"] = cfg.label_grid_n;
    out["newton_max_iter"] = cfg.newton_max_iter;
    out["newton_max_halvings"] = cfg.newton_max_halvings;
    out["newton_tol"] = cfg.newton_tol;
    out["cond_limit"] = cfg.cond_limit;
    out["dedup_u_tol"] = cfg.dedup_u_tol;
    out["dedup_center_tol"] = cfg.dedup_center_tol;
    out["scan_steps"] = cfg.scan_steps;
    out["seed_indicator_threshold"] = cfg.seed_indicator_threshold;
    out["cusp_select_threshold"] = cfg.cusp_select_threshold;
    out["caustic_samples"] = cfg.caustic_samples;
    return out;
}

ordered_json mss_point_to_json(const MssPoint& p) {
    ordered_json out;
    out["t1"] = p.t1;
    out["t2"] = p.t2;
    out["center"] = vec_json(p.center);
    out["f"] = p.f_value;
    out["kind"] = to_string(p.circle.kind);
    out["label"] = to_string(p.label);
    out["medial"] = p.medial;
    out["flags"] = p.flags;
    return out;
}

ordered_json build_analysis_report(const CurveFamily& curve, double u,
                                   const TraceResult& trace,
                                   const Config& cfg) {
    ordered_json out;
    out["curve_name"] = curve.name;
    out["u"] = u;
    out["scale"] = trace.scale;

    ordered_json branches = ordered_json::array();
    for (const auto& br : trace.branches) {
        ordered_json pts = ordered_json::array();
        for (const auto& p : br.points) pts.push_back(mss_point_to_json(p));
        if (br.closed && !br.points.empty())
            pts.push_back(mss_point_to_json(br.points.front()));
        branches.push_back(std::move(pts));
    }
    out["mss_branches"] = std::move(branches);

    int nc = std::max(16, cfg.caustic_samples);
    ordered_json caustic = ordered_json::array();
    for (int i = 0; i < nc; ++i) {
        double t = two_pi * i / nc;
        try {
            MinkVec e = evolute_point(curve, t, u, cfg.eps_light_rel);
            if (std::isfinite(e.u0) && std::isfinite(e.u1))
                caustic.push_back(vec_json(e));
        } catch (const Error&) {
            // lightlike tangent or flat point: the caustic escapes here
        }
    }
    out["caustic_polyline"] = std::move(caustic);

    std::vector<double> lts = lightlike_points(curve, u, cfg);
    out["lightlike_ts"] = lts;
    ordered_json lpts = ordered_json::array();
    for (double t : lts) lpts.push_back(vec_json(curve.point(t, u)));
    out["lightlike_points"] = std::move(lpts);

    int ncv = 512;
    ordered_json cpoly = ordered_json::array();
    for (int i = 0; i < ncv; ++i)
        cpoly.push_back(vec_json(curve.point(two_pi * i / ncv, u)));
    cpoly.push_back(vec_json(curve.point(0.0, u)));
    out["curve_polyline"] = std::move(cpoly);

    ordered_json masked;
    masked["count"] = trace.masked_cell_count;
    ordered_json boxes = ordered_json::array();
    for (const auto& b : trace.masked_boxes) {
        ordered_json jb;
        jb["t1_lo"] = b.t1_lo;
        jb["t1_hi"] = b.t1_hi;
        jb["t2_lo"] = b.t2_lo;
        jb["t2_hi"] = b.t2_hi;
        jb["reason"] = b.reason;
        boxes.push_back(std::move(jb));
    }
    masked["boxes"] = std::move(boxes);
    out["masked_cells"] = std::move(masked);

    out["config_echo"] = config_echo(cfg);
    return out;
}

ordered_json event_to_json(const TransitionEvent& ev) {
    ordered_json out;
    out["kind"] = to_string(ev.kind);
    out["subtype"] = to_string(ev.subtype);
    out["u_star"] = ev.u_star;
    out["t_params"] = ev.t_params;
    out["center"] = vec_json(ev.center);
    out["f_value"] = ev.f_value;
    out["circle"] = circle_json(ev.circle);
    out["residual"] = ev.residual;
    ordered_json contacts = ordered_json::array();
    for (const auto& cp : ev.contacts) contacts.push_back(contact_json(cp));
    out["contacts"] = std::move(contacts);

    ordered_json evid;
    if (ev.evidence.branch_counts)
        evid["branch_counts"] = ordered_json::array(
            {ev.evidence.branch_counts->first, ev.evidence.branch_counts->second});
    if (ev.evidence.kappa_primes)
        evid["kappa_primes"] = ordered_json::array(
            {ev.evidence.kappa_primes->first, ev.evidence.kappa_primes->second});
    if (!ev.evidence.tangent_dots.empty())
        evid["tangent_dots"] = ev.evidence.tangent_dots;
    if (ev.evidence.a1a3_sign) evid["a1a3_sign"] = *ev.evidence.a1a3_sign;
    if (ev.evidence.quad) {
        ordered_json q;
        q["det_signs"] = ordered_json::array(
            {ev.evidence.quad->det_signs[0], ev.evidence.quad->det_signs[1],
             ev.evidence.quad->det_signs[2], ev.evidence.quad->det_signs[3]});
        q["inside"] = ordered_json::array(
            {ev.evidence.quad->inside[0], ev.evidence.quad->inside[1],
             ev.evidence.quad->inside[2], ev.evidence.quad->inside[3]});
        evid["quad"] = std::move(q);
    }
    out["evidence"] = std::move(evid);
    out["flags"] = ev.flags;
    return out;
}

ordered_json build_event_report(const CurveFamily& curve,
                                const ScanResult& scan, const Config& cfg) {
    ordered_json out;
    out["curve_name"] = curve.name;
    out["u_min"] = scan.u_min;
    out["u_max"] = scan.u_max;
    out["steps"] = scan.steps;
    ordered_json events = ordered_json::array();
    for (const auto& ev : scan.events) events.push_back(event_to_json(ev));
    out["events"] = std::move(events);
    ordered_json failed = ordered_json::array();
    for (const auto& fs : scan.failed_seeds) {
        ordered_json jf;
        jf["kind"] = to_string(fs.kind);
        jf["u_seed"] = fs.u_seed;
        jf["status"] = to_string(fs.status);
        failed.push_back(std::move(jf));
    }
    out["failed_seeds"] = std::move(failed);
    out["config_echo"] = config_echo(cfg);
    return out;
}

std::string render_svg(const json& report) {
    if (!report.is_object() || !report.contains("curve_polyline") ||
        !report.contains("caustic_polyline") || !report.contains("mss_branches") ||
        !report.contains("lightlike_points"))
        throw InputError("render: document is not an analysis report");

    auto curve_pts = polyline_from_json(report["curve_polyline"], "curve_polyline");
    if (curve_pts.size() < 2)
        throw InputError("render: curve polyline too short");
    auto caustic_pts =
        polyline_from_json(report["caustic_polyline"], "caustic_polyline");
    auto light_pts =
        polyline_from_json(report["lightlike_points"], "lightlike_points");

    double xmin = curve_pts[0].first, xmax = xmin;
    double ymin = curve_pts[0].second, ymax = ymin;
    for (auto [x, y] : curve_pts) {
        xmin = std::fmin(xmin, x);
        xmax = std::fmax(xmax, x);
        ymin = std::fmin(ymin, y);
        ymax = std::fmax(ymax, y);
    }
    double spanx = std::fmax(xmax - xmin, 1e-9);
    double spany = std::fmax(ymax - ymin, 1e-9);
    double padx = 0.1 * spanx, pady = 0.1 * spany;
    double diag = std::hypot(spanx, spany);
    double stroke = 0.004 * diag;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"";
    svg += fmt6(xmin - padx) + " " + fmt6(ymin - pady) + " " +
           fmt6(spanx + 2 * padx) + " " + fmt6(spany + 2 * pady) + "\">\n";

    svg += "<g id=\"curve\" fill=\"none\" stroke=\"#202020\" stroke-width=\"" +
           fmt6(stroke) + "\">\n<path d=\"" + path_of(curve_pts) + "\"/>\n</g>\n";

    // Caustic: split where consecutive samples jump (asymptotes near
    // lightlike parameters produce distant consecutive points).
    svg += "<g id=\"caustic\" fill=\"none\" stroke=\"#b03a2e\" stroke-width=\"" +
           fmt6(0.75 * stroke) + "\" stroke-dasharray=\"" + fmt6(2.5 * stroke) +
           " " + fmt6(2.5 * stroke) + "\">\n";
    {
        std::vector<std::pair<double, double>> seg;
        auto flush = [&] {
            if (seg.size() >= 2) svg += "<path d=\"" + path_of(seg) + "\"/>\n";
            seg.clear();
        };
        for (auto p : caustic_pts) {
            if (!seg.empty() &&
                std::hypot(p.first - seg.back().first,
                           p.second - seg.back().second) > 0.25 * diag)
                flush();
            seg.push_back(p);
        }
        flush();
    }
    svg += "</g>\n";

    if (!report["mss_branches"].is_array())
        throw InputError("render: mss_branches must be an array");
    svg += "<g id=\"mss\" fill=\"none\" stroke=\"#1f618d\" stroke-width=\"" +
           fmt6(stroke) + "\">\n";
    struct Marker {
        double x, y;
        bool cusp; // true: A2A1 diamond, false: A3 circle
    };
    std::vector<Marker> markers;
    for (const auto& branch : report["mss_branches"]) {
        if (!branch.is_array())
            throw InputError("render: each MSS branch must be an array");
        std::vector<std::pair<double, double>> pts;
        for (const auto& rec : branch) {
            if (!rec.is_object() || !rec.contains("center"))
                throw InputError("render: MSS record lacks a center");
            auto c = rec["center"];
            if (!c.is_array() || c.size() != 2)
                throw InputError("render: MSS center must be [x, y]");
            double x = c[0].get<double>(), y = -c[1].get<double>();
            pts.emplace_back(x, y);
            std::string label = rec.value("label", "");
            if (label == "A2A1" || label == "A1cubed")
                markers.push_back({x, y, true});
            else if (label == "A3")
                markers.push_back({x, y, false});
        }
        if (pts.size() >= 2) svg += "<path d=\"" + path_of(pts) + "\"/>\n";
    }
    svg += "</g>\n";

    svg += "<g id=\"markers\">\n";
    double tick = 0.02 * diag;
    for (auto [x, y] : light_pts) {
        // Lightcone directions (1, 1) and (1, -1); page y is flipped.
        svg += "<path stroke=\"#7d6608\" stroke-width=\"" + fmt6(0.75 * stroke) +
               "\" d=\"M" + fmt6(x - tick) + "," + fmt6(y + tick) + " L" +
               fmt6(x + tick) + "," + fmt6(y - tick) + " M" + fmt6(x - tick) +
               "," + fmt6(y - tick) + " L" + fmt6(x + tick) + "," +
               fmt6(y + tick) + "\"/>\n";
    }
    double ms = 0.01 * diag;
    for (const auto& m : markers) {
        if (m.cusp)
            svg += "<path fill=\"#1f618d\" d=\"M" + fmt6(m.x) + "," +
                   fmt6(m.y - ms) + " L" + fmt6(m.x + ms) + "," + fmt6(m.y) +
                   " L" + fmt6(m.x) + "," + fmt6(m.y + ms) + " L" +
                   fmt6(m.x - ms) + "," + fmt6(m.y) + " Z\"/>\n";
        else
            svg += "<circle fill=\"none\" stroke=\"#1f618d\" stroke-width=\"" +
                   fmt6(0.5 * stroke) + "\" cx=\"" + fmt6(m.x) + "\" cy=\"" +
                   fmt6(m.y) + "\" r=\"" + fmt6(ms) + "\"/>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

std::string oracle_csv(const DenseMap& map) {
    std::string out = "t1,t2,g\n";
    char buf[128];
    int n = map.n;
    double h = two_pi / n;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double t1 = i * h, t2 = j * h;
            double gap = std::fmin(t2 - t1, two_pi - (t2 - t1));
            if (gap <= map.diag_band) continue;
            double g = map.g[static_cast<std::size_t>(i) * n + j];
            if (std::isnan(g))
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,nan\n", t1, t2);
            else
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t1, t2, g);
            out += buf;
        }
    }
    return out;
}

} // namespace mss
