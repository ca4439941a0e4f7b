#pragma once

#include <CLI11.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vfe/compatibility.hpp"
#include "vfe/hasimoto.hpp"
#include "vfe/initial_conditions.hpp"
#include "vfe/io.hpp"
#include "vfe/timestepper.hpp"

namespace vfe {

struct OutputSpec {
    std::string dir = ".";
    std::string diagnostics = "diagnostics.csv";
    std::string snapshot = "final.snap";
    bool operator==(const OutputSpec&) const = default;
};

struct Config {
    RunConfig run;
    OutputSpec output;
};

inline std::string right_boundary_name(RightBoundary r) {
    return r == RightBoundary::Clamp ? "clamp" : "extrapolation";
}

inline RightBoundary parse_right_boundary(const std::string& s) {
    if (s == "clamp") return RightBoundary::Clamp;
    if (s == "extrapolation") return RightBoundary::Extrapolation;
    throw ValidationError("run.right_boundary must be 'clamp' or 'extrapolation' (got '" + s + "')");
}

inline bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ValidationError(key + ": expected a boolean (got '" + s + "')");
}

inline long parse_integer(const std::string& s, const std::string& key) {
    const double x = parse_double(s, key);
    if (x != std::floor(x) || std::fabs(x) > 1e15) throw ValidationError(key + ": expected an integer (got '" + s + "')");
    return static_cast<long>(x);
}

namespace detail {

inline const std::map<std::string, std::set<std::string>>& config_schema() {
    static const std::map<std::string, std::set<std::string>> schema{
        {"grid", {"n", "length", "boundary", "stencil_order"}},
        {"params", {"alpha", "delta", "cfl_safety"}},
        {"run",
         {"dt", "t_final", "project_unit_norm", "diagnostics_every", "right_boundary", "drift_abort",
          "far_field_tol", "compat_order", "compat_tol", "correct_order", "track_x"}},
        {"ic", {"family", "file", "amplitude", "center", "width", "wavenumber", "support", "helix_a", "phase"}},
        {"output", {"dir", "diagnostics", "snapshot"}},
    };
    return schema;
}

}  // namespace detail

// Parses the INI text; unknown sections or keys are rejected by name.
inline Config parse_config(std::istream& is) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    const auto& schema = detail::config_schema();
    std::map<std::string, std::string> kv;
    for (const auto& [section, body] : tree) {
        const auto it = schema.find(section);
        if (it == schema.end()) throw ValidationError("config: unknown section [" + section + "]");
        if (!body.data().empty()) throw ValidationError("config: key '" + section + "' outside a section");
        for (const auto& [key, val] : body) {
            if (!it->second.count(key)) throw ValidationError("config: unknown key " + section + "." + key);
            kv[section + "." + key] = val.data();
        }
    }
    auto get = [&](const std::string& k) -> std::optional<std::string> {
        const auto it = kv.find(k);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    auto num = [&](const std::string& k, double& dst) {
        if (auto v = get(k)) dst = parse_double(*v, k);
    };

    Config c;
    RunConfig& r = c.run;
    long n = static_cast<long>(r.grid.n());
    double length = r.grid.length();
    Boundary b = r.grid.boundary();
    if (auto v = get("grid.n")) n = parse_integer(*v, "grid.n");
    num("grid.length", length);
    if (auto v = get("grid.boundary")) b = parse_boundary(*v);
    if (n < 16) throw ValidationError("grid.n must be >= 16 (got " + std::to_string(n) + ")");
    r.grid = make_grid(b, static_cast<std::size_t>(n), length);
    if (auto v = get("grid.stencil_order")) r.params.stencil_order = static_cast<int>(parse_integer(*v, "grid.stencil_order"));
    num("params.alpha", r.params.alpha);
    num("params.delta", r.params.delta);
    num("params.cfl_safety", r.params.cfl_safety);

    if (auto v = get("run.dt")) {
        r.dt = parse_double(*v, "run.dt");
        if (!(r.dt > 0.0)) throw ValidationError("run.dt must be > 0 when given");
    }
    num("run.t_final", r.t_final);
    if (auto v = get("run.project_unit_norm")) r.project_unit_norm = parse_bool(*v, "run.project_unit_norm");
    if (auto v = get("run.diagnostics_every")) r.diagnostics_every = static_cast<int>(parse_integer(*v, "run.diagnostics_every"));
    if (auto v = get("run.right_boundary")) r.right_boundary = parse_right_boundary(*v);
    num("run.drift_abort", r.drift_abort);
    num("run.far_field_tol", r.far_field_tol);
    if (auto v = get("run.compat_order")) r.compat_order = static_cast<int>(parse_integer(*v, "run.compat_order"));
    num("run.compat_tol", r.compat_tol);
    if (auto v = get("run.correct_order")) r.correct_order = static_cast<int>(parse_integer(*v, "run.correct_order"));
    if (auto v = get("run.track_x")) r.track_x = parse_bool(*v, "run.track_x");

    if (auto v = get("ic.family")) r.ic.family = *v;
    if (auto v = get("ic.file")) r.ic.file = *v;
    num("ic.amplitude", r.ic.amplitude);
    num("ic.center", r.ic.center);
    num("ic.width", r.ic.width);
    num("ic.wavenumber", r.ic.wavenumber);
    num("ic.support", r.ic.support);
    num("ic.helix_a", r.ic.helix_a);
    num("ic.phase", r.ic.phase);

    if (auto v = get("output.dir")) c.output.dir = *v;
    if (auto v = get("output.diagnostics")) c.output.diagnostics = *v;
    if (auto v = get("output.snapshot")) c.output.snapshot = *v;

    r.validate();
    return c;
}

inline Config parse_config(const std::string& text_or_path, bool is_path) {
    if (is_path) {
        std::ifstream is(text_or_path);
        if (!is) throw IoError("cannot open config '" + text_or_path + "'");
        return parse_config(is);
    }
    std::istringstream is(text_or_path);
    return parse_config(is);
}

// Canonical INI text; parse_config(echo_config(c)) reproduces c.
inline std::string echo_config(const Config& c) {
    const RunConfig& r = c.run;
    std::ostringstream os;
    os << "[grid]\n"
       << "n = " << r.grid.n() << "\n"
       << "length = " << fmt17(r.grid.length()) << "\n"
       << "boundary = " << boundary_name(r.grid.boundary()) << "\n"
       << "stencil_order = " << r.params.stencil_order << "\n\n";
    os << "[params]\n"
       << "alpha = " << fmt17(r.params.alpha) << "\n"
       << "delta = " << fmt17(r.params.delta) << "\n"
       << "cfl_safety = " << fmt17(r.params.cfl_safety) << "\n\n";
    os << "[run]\n";
    if (r.dt > 0.0) os << "dt = " << fmt17(r.dt) << "\n";
    os << "t_final = " << fmt17(r.t_final) << "\n"
       << "project_unit_norm = " << (r.project_unit_norm ? "true" : "false") << "\n"
       << "diagnostics_every = " << r.diagnostics_every << "\n"
       << "right_boundary = " << right_boundary_name(r.right_boundary) << "\n"
       << "drift_abort = " << fmt17(r.drift_abort) << "\n"
       << "far_field_tol = " << fmt17(r.far_field_tol) << "\n"
       << "compat_order = " << r.compat_order << "\n"
       << "compat_tol = " << fmt17(r.compat_tol) << "\n"
       << "correct_order = " << r.correct_order << "\n"
       << "track_x = " << (r.track_x ? "true" : "false") << "\n\n";
    os << "[ic]\n"
       << "family = " << r.ic.family << "\n";
    if (!r.ic.file.empty()) os << "file = " << r.ic.file << "\n";
    auto opt = [&](const char* k, double x) {
        if (!std::isnan(x)) os << k << " = " << fmt17(x) << "\n";
    };
    opt("amplitude", r.ic.amplitude);
    opt("center", r.ic.center);
    opt("width", r.ic.width);
    opt("wavenumber", r.ic.wavenumber);
    opt("support", r.ic.support);
    opt("helix_a", r.ic.helix_a);
    opt("phase", r.ic.phase);
    os << "\n[output]\n"
       << "dir = " << c.output.dir << "\n"
       << "diagnostics = " << c.output.diagnostics << "\n"
       << "snapshot = " << c.output.snapshot << "\n";
    return os.str();
}

inline void print_report(std::ostream& os, const CompatibilityReport& rep) {
    os << "regime " << (rep.regime == Regime::PosAlpha ? "alpha>0" : "alpha<0") << "  delta "
       << fmt17(rep.delta) << "  tolerance " << fmt17(rep.tolerance) << "\n";
    for (const auto& o : rep.orders) {
        os << "order " << o.n << (o.passed ? "  pass" : "  FAIL");
        for (const auto& [name, val] : o.residuals) os << "  " << name << "=" << fmt17(val);
        os << "\n";
    }
    os << (rep.passed() ? "compatible" : "not compatible") << "\n";
}

// Command-line entry point. Exit codes: 0 success, 2 validation/input
// errors, 3 numerical failures.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"vfe: vortex filament equation with axial flow on the half-line"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<double> alpha, delta, length, dt, t_final;
    std::optional<long> grid_n;
    std::optional<int> diag_every;
    std::optional<std::string> ic, out_dir;
    bool project = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "INI configuration file");
        sub->add_option("--alpha", alpha, "axial-flow coefficient (non-zero)");
        sub->add_option("--delta", delta, "regularization parameter (>= 0)");
        sub->add_option("--grid-n", grid_n, "number of grid nodes");
        sub->add_option("--length", length, "domain length");
        sub->add_option("--dt", dt, "time step (default: stability estimate)");
        sub->add_option("--t-final", t_final, "final time");
        sub->add_option("--ic", ic, "initial condition family, or file:<snapshot>");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--diagnostics-every", diag_every, "steps between diagnostics records");
        sub->add_flag("--project-unit-norm", project, "renormalize v after every step");
    };

    auto* run_cmd = app.add_subcommand("run", "evolve the configured initial condition");
    auto* compat_cmd = app.add_subcommand("check-compat", "report compatibility residuals of the datum");
    auto* correct_cmd = app.add_subcommand("correct-datum", "write the corrected datum as a snapshot");
    auto* cont_cmd = app.add_subcommand("continuation", "delta sweep with pairwise H1 differences");
    auto* conv_cmd = app.add_subcommand("convergence", "joint (h, dt) refinement table");
    auto* hir_cmd = app.add_subcommand("hirota-check", "Hirota residual under refinement");
    for (auto* s : {run_cmd, compat_cmd, correct_cmd, cont_cmd, conv_cmd, hir_cmd}) common(s);

    int order = 1;
    double tol = 1e-6;
    compat_cmd->add_option("--order", order, "highest compatibility order");
    compat_cmd->add_option("--tol", tol, "residual tolerance");
    correct_cmd->add_option("--order", order, "correction order m");
    std::vector<double> deltas{1e-2, 1e-3, 1e-4};
    cont_cmd->add_option("--deltas", deltas, "decreasing list of deltas");
    cont_cmd->add_option("--order", order, "correction order m");
    int levels = 3;
    conv_cmd->add_option("--levels", levels, "number of refinement levels");
    hir_cmd->add_option("--levels", levels, "number of refinement levels");
    double dt_sample = 0.002;
    hir_cmd->add_option("--dt-sample", dt_sample, "sampling interval on the coarsest level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        Config cfg = config_path.empty() ? Config{} : parse_config(config_path, true);
        RunConfig& rc = cfg.run;
        if (hir_cmd->parsed() && config_path.empty()) {
            rc.grid = GridSpec::periodic(64, 2.0 * std::numbers::pi);
            rc.ic.family = "perturbed-helix";
            rc.t_final = 0.1;
        }
        if (alpha) rc.params.alpha = *alpha;
        if (delta) rc.params.delta = *delta;
        if (grid_n || length) {
            const long n = grid_n ? *grid_n : static_cast<long>(rc.grid.n());
            if (n < 16) throw ValidationError("grid.n must be >= 16 (got " + std::to_string(n) + ")");
            rc.grid = make_grid(rc.grid.boundary(), static_cast<std::size_t>(n), length ? *length : rc.grid.length());
        }
        if (dt) {
            if (!(*dt > 0.0)) throw ValidationError("run.dt must be > 0 when given");
            rc.dt = *dt;
        }
        if (t_final) rc.t_final = *t_final;
        if (ic) {
            if (ic->rfind("file:", 0) == 0) {
                rc.ic.family = "file";
                rc.ic.file = ic->substr(5);
            } else {
                rc.ic.family = *ic;
            }
        }
        if (out_dir) cfg.output.dir = *out_dir;
        if (diag_every) rc.diagnostics_every = *diag_every;
        if (project) rc.project_unit_norm = true;
        rc.validate();

        const std::filesystem::path dir(cfg.output.dir);
        auto ensure_dir = [&] {
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
        };

        if (run_cmd->parsed()) {
            ensure_dir();
            const RunResult res = run(rc);
            for (const auto& w : res.warnings) err << "warning: " << w << "\n";
            write_diagnostics_csv(res.records, (dir / cfg.output.diagnostics).string());
            Snapshot snap{rc.grid, rc.params, res.state.t, res.state.v, res.state.x};
            write_snapshot((dir / cfg.output.snapshot).string(), snap);
            out << "steps " << res.steps << "  dt " << fmt17(res.dt) << "  t " << fmt17(res.state.t)
                << "  drift " << fmt17(sup_norm_unit_drift(res.state.v)) << "\n";
        } else if (compat_cmd->parsed()) {
            const Field3 v0 = load_initial_condition(rc.ic, rc.grid, rc.params, false);
            print_report(out, check_compatibility(v0, rc.params, rc.grid, order, tol));
        } else if (correct_cmd->parsed()) {
            ensure_dir();
            const Field3 v0 = load_initial_condition(rc.ic, rc.grid, rc.params, false);
            const CorrectionResult cr = correct_datum(v0, rc.params.delta, order, rc.params, rc.grid);
            write_snapshot((dir / cfg.output.snapshot).string(), Snapshot{rc.grid, rc.params, 0.0, cr.corrected, {}});
            out << "max |v0^delta - v0| " << fmt17(max_abs_diff(cr.corrected, v0)) << "\n";
            for (std::size_t i = 0; i < cr.residual_after.size(); ++i)
                out << "order " << i << " residual " << fmt17(cr.residual_after[i]) << "\n";
        } else if (cont_cmd->parsed()) {
            const ContinuationResult cr = delta_continuation(rc, deltas, order);
            out << "delta_i,delta_i+1,h1_diff\n";
            for (std::size_t i = 0; i < cr.pairwise_h1_diffs.size(); ++i)
                out << fmt17(cr.deltas[i]) << ',' << fmt17(cr.deltas[i + 1]) << ','
                    << fmt17(cr.pairwise_h1_diffs[i]) << "\n";
            out << "observed_rate " << fmt17(cr.observed_rate) << "\n";
            for (const auto& f : cr.failures) err << "member failed: " << f << "\n";
            if (!cr.complete()) return 3;
        } else if (conv_cmd->parsed()) {
            const auto lv = convergence_study(rc, levels);
            out << "n,dt,drift,drift_order,diff_to_next,order\n";
            for (const auto& l : lv)
                out << l.n << ',' << fmt17(l.dt) << ',' << fmt17(l.drift) << ',' << fmt17(l.drift_order) << ','
                    << fmt17(l.diff_to_next) << ',' << fmt17(l.order) << "\n";
        } else if (hir_cmd->parsed()) {
            const GridSpec pg = GridSpec::periodic(256, 2.0 * std::numbers::pi);
            std::vector<ComplexField> pw;
            const double dts = 1e-5;
            for (int k = 0; k < 3; ++k) pw.push_back(plane_wave(0.5, 2.0, rc.params.alpha, k * dts, pg));
            out << "plane_wave_residual " << fmt17(hirota_residual(pw, rc.params.alpha, pg, dts)) << "\n";
            out << "n,dt_sample,residual\n";
            for (const auto& l : hirota_study(rc, levels, dt_sample))
                out << l.n << ',' << fmt17(l.dt_sample) << ',' << fmt17(l.residual) << "\n";
        }
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace vfe
