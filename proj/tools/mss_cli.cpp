#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "mss/config.hpp"
#include "mss/curve_io.hpp"
#include "mss/errors.hpp"
#include "mss/mss.hpp"
#include "mss/report.hpp"
#include "mss/transitions.hpp"

namespace {

using nlohmann::json;

void apply_config_file(const std::string& path, mss::Config& cfg) {
    std::ifstream in(path);
    if (!in) throw mss::InputError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw mss::InputError("invalid JSON in " + path + ": " + e.what());
    }
    if (!j.is_object()) throw mss::InputError("config file must hold an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const json& v = it.value();
        auto num = [&]() -> double {
            if (!v.is_number())
                throw mss::InputError("config key \"" + k + "\" must be a number");
            return v.get<double>();
        };
        auto integer = [&]() -> int {
            if (!v.is_number_integer())
                throw mss::InputError("config key \"" + k + "\" must be an integer");
            return v.get<int>();
        };
        if (k == "eps_light_rel") cfg.eps_light_rel = num();
        else if (k == "tol") cfg.tol = num();
        else if (k == "gap_factor") cfg.gap_factor = num();
        else if (k == "grid_n") cfg.grid_n = integer();
        else if (k == "diag_cells") cfg.diag_cells = num();
        else if (k == "lightlike_mask_cells") cfg.lightlike_mask_cells = num();
        else if (k == "parallel_tol") cfg.parallel_tol = num();
        else if (k == "refine_g_tol") cfg.refine_g_tol = num();
        else if (k == "lightlike_grid_n") cfg.lightlike_grid_n = integer();
        else if (k == "root_bisect_tol") cfg.root_bisect_tol = num();
        else if (k == "label_grid_n") cfg.label_grid_n = integer();
        else if (k == "newton_max_iter") cfg.newton_max_iter = integer();
        else if (k == "newton_max_halvings") cfg.newton_max_halvings = integer();
        else if (k == "newton_tol") cfg.newton_tol = num();
        else if (k == "cond_limit") cfg.cond_limit = num();
        else if (k == "dedup_u_tol") cfg.dedup_u_tol = num();
        else if (k == "dedup_center_tol") cfg.dedup_center_tol = num();
        else if (k == "scan_steps") cfg.scan_steps = integer();
        else if (k == "seed_indicator_threshold") cfg.seed_indicator_threshold = num();
        else if (k == "cusp_select_threshold") cfg.cusp_select_threshold = num();
        else if (k == "caustic_samples") cfg.caustic_samples = integer();
        else throw mss::InputError("unknown config key \"" + k + "\"");
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mss::InputError("cannot open output file: " + path);
    out << content;
    if (!out) throw mss::InputError("failed writing " + path);
}

struct CommonOpts {
    std::string curve_path;
    std::string out_path;
    std::string config_path;
    double u = 0.0;
    double u_min = 0.0, u_max = 0.0;
    int steps = 200;
    int grid = 512;
    double tol = 1e-6;
    CLI::Option* grid_opt = nullptr;
    CLI::Option* tol_opt = nullptr;
    CLI::Option* steps_opt = nullptr;
};

/// Defaults, then the config file, then explicitly passed flags.
mss::Config effective_config(const CommonOpts& o) {
    mss::Config cfg;
    if (!o.config_path.empty()) apply_config_file(o.config_path, cfg);
    if (o.grid_opt && o.grid_opt->count() > 0) cfg.grid_n = o.grid;
    if (o.tol_opt && o.tol_opt->count() > 0) cfg.tol = o.tol;
    if (o.steps_opt && o.steps_opt->count() > 0) cfg.scan_steps = o.steps;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minkowski symmetry set toolkit"};
    app.require_subcommand(1);

    CommonOpts ao, so, oo;
    std::string render_report, render_out, analyze_svg;

    CLI::App* analyze =
        app.add_subcommand("analyze", "Trace the symmetry set at one parameter");
    analyze->add_option("--curve", ao.curve_path, "Curve spec JSON")->required();
    analyze->add_option("--u", ao.u, "Family parameter value");
    ao.grid_opt = analyze->add_option("--grid", ao.grid, "Trace grid cells");
    ao.tol_opt = analyze->add_option("--tol", ao.tol, "Base tolerance");
    analyze->add_option("--out", ao.out_path, "Report JSON path")->required();
    analyze->add_option("--svg", analyze_svg, "Also render an SVG here");
    analyze->add_option("--config", ao.config_path, "Config JSON path");

    CLI::App* scan =
        app.add_subcommand("scan", "Scan a family for transition events");
    scan->add_option("--curve", so.curve_path, "Curve spec JSON")->required();
    scan->add_option("--u-min", so.u_min, "Scan range start")->required();
    scan->add_option("--u-max", so.u_max, "Scan range end")->required();
    so.steps_opt = scan->add_option("--steps", so.steps, "Scan sample count");
    so.grid_opt = scan->add_option("--grid", so.grid, "Trace grid cells");
    so.tol_opt = scan->add_option("--tol", so.tol, "Base tolerance");
    scan->add_option("--out", so.out_path, "Report JSON path")->required();
    scan->add_option("--config", so.config_path, "Config JSON path");

    CLI::App* oracle =
        app.add_subcommand("oracle", "Dense bitangency-residual CSV dump");
    oracle->add_option("--curve", oo.curve_path, "Curve spec JSON")->required();
    oracle->add_option("--u", oo.u, "Family parameter value");
    oo.grid_opt = oracle->add_option("--grid", oo.grid, "Sample grid size");
    oo.tol_opt = oracle->add_option("--tol", oo.tol, "Base tolerance");
    oracle->add_option("--out", oo.out_path, "CSV path")->required();
    oracle->add_option("--config", oo.config_path, "Config JSON path");

    CLI::App* render = app.add_subcommand("render", "SVG from an analysis report");
    render->add_option("--report", render_report, "Analysis report JSON")
        ->required();
    render->add_option("--out", render_out, "SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (analyze->parsed()) {
            mss::Config cfg = effective_config(ao);
            mss::CurveFamily curve = mss::load_curve_file(ao.curve_path);
            mss::TraceResult trace = mss::trace_mss(curve, ao.u, cfg);
            auto report = mss::build_analysis_report(curve, ao.u, trace, cfg);
            write_file(ao.out_path, report.dump(2) + "\n");
            if (!analyze_svg.empty())
                write_file(analyze_svg, mss::render_svg(report));
        } else if (scan->parsed()) {
            if (!(so.u_min < so.u_max))
                throw mss::InputError("scan: need --u-min < --u-max");
            mss::Config cfg = effective_config(so);
            mss::CurveFamily curve = mss::load_curve_file(so.curve_path);
            if (curve.perturbations.empty())
                throw mss::InputError("scan: curve spec has no \"family\" entry");
            mss::ScanResult res = mss::scan_family(curve, so.u_min, so.u_max,
                                                   cfg.scan_steps, cfg.grid_n, cfg);
            auto report = mss::build_event_report(curve, res, cfg);
            write_file(so.out_path, report.dump(2) + "\n");
        } else if (oracle->parsed()) {
            mss::Config cfg = effective_config(oo);
            mss::CurveFamily curve = mss::load_curve_file(oo.curve_path);
            mss::DenseMap map = mss::oracle_grid(curve, oo.u, cfg.grid_n, cfg);
            write_file(oo.out_path, mss::oracle_csv(map));
        } else if (render->parsed()) {
            std::ifstream in(render_report);
            if (!in)
                throw mss::InputError("cannot open report file: " + render_report);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw mss::InputError(std::string("invalid report JSON: ") +
                                      e.what());
            }
            write_file(render_out, mss::render_svg(j));
        }
    } catch (const mss::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
