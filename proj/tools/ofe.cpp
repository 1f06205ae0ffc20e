// Command-line surface: ground-state, propagate, iac, sweep, fn-fit. Every
// compute subcommand reads one JSON config, writes its artifacts into the
// output directory, and prints a JSON summary to stdout. Exit codes: 0 ok,
// 1 config error, 2 compute failure (including partial sweep failures),
// 3 I/O error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ofe/autocorr.hpp"
#include "ofe/config.hpp"
#include "ofe/emission.hpp"
#include "ofe/io.hpp"
#include "ofe/sweep.hpp"
#include "ofe/units.hpp"
#include "ofe/version.hpp"

namespace {

struct Cli {
    std::string config_path;
    std::string out_dir = "out";
    int workers = -1; // -1: take the config's value
    bool dry_run = false;
    bool verbose = false;

    std::string iac_mode; // empty: take the config's value
    std::string fit_input;
    bool fit_b = true;
    double fit_start = 1.0;
};

nlohmann::json load_root(const Cli& o) {
    if (o.config_path.empty()) return nlohmann::json::object();
    return ofe::read_json_file(o.config_path);
}

void print_json(const nlohmann::json& j) { std::printf("%s\n", j.dump(2).c_str()); }

std::string out_path(const Cli& o, const char* name) {
    return (std::filesystem::path(o.out_dir) / name).string();
}

void ensure_out_dir(const Cli& o) {
    std::error_code ec;
    std::filesystem::create_directories(o.out_dir, ec);
    if (ec) throw ofe::IoError("cannot create output directory " + o.out_dir + ": " + ec.message());
}

ofe::RunConfig parse_base(const Cli& o, const nlohmann::json& root) {
    auto c = ofe::parse_run_config(root);
    if (o.verbose) std::fprintf(stderr, "resolved config:\n%s\n", c.resolved.dump(2).c_str());
    return c;
}

int cmd_ground_state(const Cli& o) {
    const auto root = load_root(o);
    const auto c = parse_base(o, root);
    if (o.dry_run) {
        print_json({{"command", "ground-state"},
                    {"config", c.resolved},
                    {"would_write", {out_path(o, "ground_state.json")}}});
        return 0;
    }
    const auto gs = ofe::ground_state(c.metal, c.grid, c.solver);
    nlohmann::json out = {{"well_width_nm", ofe::units::au_to_nm(c.metal.well_width)},
                          {"e1_eV", ofe::units::au_to_ev(gs.energy)},
                          {"iterations", gs.iterations},
                          {"n_points", c.grid.n_points},
                          {"dz_nm", ofe::units::au_to_nm(c.grid.dz())},
                          {"config_hash", ofe::config_hash(c.resolved)}};
    ensure_out_dir(o);
    ofe::write_json_file(out_path(o, "ground_state.json"), out);
    print_json(out);
    return 0;
}

int cmd_propagate(const Cli& o) {
    const auto root = load_root(o);
    const auto c = parse_base(o, root);
    const auto cfg = c.single_pulse();
    const auto [t0, t1] = ofe::propagation_window(cfg, c.solver);
    if (o.dry_run) {
        print_json({{"command", "propagate"},
                    {"config", c.resolved},
                    {"window_fs", {ofe::units::au_to_fs(t0), ofe::units::au_to_fs(t1)}},
                    {"steps", static_cast<long long>((t1 - t0) / c.solver.dt)},
                    {"would_write", {out_path(o, "trace.csv")}}});
        return 0;
    }
    const auto gs = ofe::ground_state(c.metal, c.grid, c.solver);
    const auto trace = ofe::emission_trace(c.metal, c.grid, cfg, gs.state, c.solver);
    const double raw = ofe::integrate_yield(trace);
    const double bg =
        c.f_dc != 0.0 ? ofe::dc_background_yield(c.metal, c.grid, cfg, gs.state, c.solver) : 0.0;

    nlohmann::json out = {{"yield_raw", raw},
                          {"dc_background", bg},
                          {"yield_laser", std::max(raw - bg, 0.0)},
                          {"norm_initial", trace.norm_initial},
                          {"norm_final", trace.norm_final},
                          {"keldysh", ofe::units::keldysh_parameter(
                                          c.make_pulse().omega, c.metal.phi,
                                          ofe::units::gvm_to_au(c.f0_GVm * c.enhancement))},
                          {"config_hash", ofe::config_hash(c.resolved)}};
    try {
        const auto burst = ofe::pulse_width(trace);
        out["burst_fwhm_fs"] = ofe::units::au_to_fs(burst.pulse_fwhm);
        out["burst_peak_time_fs"] = ofe::units::au_to_fs(burst.peak_time);
        out["burst_count"] = burst.sub_pulse_fractions.size();
        out["burst_dominant_share"] = burst.sub_pulse_fractions[burst.dominant];
    } catch (const std::domain_error&) {
        // no resolvable burst structure at this signal level
    }

    ofe::Table t;
    t.comments = {std::string("ofe ") + ofe::version,
                  "config hash: " + ofe::config_hash(c.resolved),
                  "flux through the detector plane; cumulative is the running yield"};
    t.columns = {"t_fs", "flux_au", "cumulative"};
    double acc = 0.0;
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        if (i > 0)
            acc += 0.5 * (trace.j[i] + trace.j[i - 1]) * (trace.t[i] - trace.t[i - 1]);
        t.rows.push_back({ofe::format_full(ofe::units::au_to_fs(trace.t[i])),
                          ofe::format_full(trace.j[i]), ofe::format_full(acc)});
    }
    ensure_out_dir(o);
    ofe::write_table_csv(out_path(o, "trace.csv"), t);
    print_json(out);
    return 0;
}

int cmd_iac(const Cli& o) {
    const auto root = load_root(o);
    auto spec = ofe::parse_sweep_spec(root, parse_base(o, root));
    if (!o.iac_mode.empty()) {
        if (o.iac_mode == "analytic")
            spec.iac_mode = ofe::IacMode::analytic;
        else if (o.iac_mode == "surrogate")
            spec.iac_mode = ofe::IacMode::surrogate;
        else if (o.iac_mode == "power")
            spec.iac_mode = ofe::IacMode::power;
        else
            spec.iac_mode = ofe::IacMode::tdse;
    }
    const auto& c = spec.base;
    const double f_l_gvm = c.f0_GVm * c.enhancement;
    const char* mode = ofe::detail::iac_mode_name(spec.iac_mode);

    if (spec.iac_mode == ofe::IacMode::analytic) {
        if (o.dry_run) {
            print_json({{"command", "iac"}, {"mode", mode}, {"config", c.resolved}});
            return 0;
        }
        print_json({{"mode", mode},
                    {"f_laser_GVm", f_l_gvm},
                    {"f_dc_GVm", ofe::units::au_to_gvm(c.f_dc)},
                    {"ratio_predicted",
                     ofe::iac_ratio(ofe::detail::point_fn_params(c), f_l_gvm,
                                    ofe::units::au_to_gvm(c.f_dc))}});
        return 0;
    }

    ofe::LaserPulse p = c.make_pulse();
    const double end = spec.iac_end_fs > 0.0 ? ofe::units::fs_to_au(spec.iac_end_fs) : 0.0;
    if (spec.iac_mode != ofe::IacMode::tdse) p.f0 *= c.enhancement;
    const auto delays = ofe::make_default_delays(p, end);
    if (o.dry_run) {
        print_json({{"command", "iac"},
                    {"mode", mode},
                    {"n_delays", delays.size()},
                    {"config", c.resolved},
                    {"would_write", {out_path(o, "iac.csv")}}});
        return 0;
    }

    ofe::IACTrace tr;
    switch (spec.iac_mode) {
        case ofe::IacMode::surrogate:
            tr = ofe::iac_trace_surrogate(p, c.f_dc, ofe::detail::point_fn_params(c), delays);
            break;
        case ofe::IacMode::power:
            tr = ofe::iac_trace_power(p, spec.iac_order, delays);
            break;
        default:
            tr = ofe::iac_trace_tdse(c.metal, c.grid, p, c.f_dc, delays, c.enhancement,
                                     c.solver, spec.iac_plateau_tolerance);
            break;
    }

    ofe::Table t;
    t.comments = {std::string("ofe ") + ofe::version, std::string("detector: ") + mode,
                  "config hash: " + ofe::config_hash(c.resolved)};
    t.columns = {"delay_fs", "current"};
    for (std::size_t i = 0; i < tr.delays.size(); ++i)
        t.rows.push_back({ofe::format_full(tr.delays[i]), ofe::format_full(tr.currents[i])});
    ensure_out_dir(o);
    ofe::write_table_csv(out_path(o, "iac.csv"), t);
    print_json({{"mode", mode},
                {"peak_to_baseline", tr.peak_to_baseline},
                {"peak_to_baseline_envelope", tr.peak_to_baseline_envelope},
                {"baseline", tr.baseline},
                {"n_delays", tr.delays.size()}});
    return 0;
}

int cmd_sweep(const Cli& o) {
    const auto root = load_root(o);
    auto spec = ofe::parse_sweep_spec(root, parse_base(o, root));
    if (o.workers >= 0) spec.workers = static_cast<unsigned>(o.workers);
    if (o.dry_run) {
        nlohmann::json axes = nlohmann::json::array();
        for (const auto& a : spec.axes)
            axes.push_back({{"name", a.name},
                            {"min", a.min},
                            {"max", a.max},
                            {"count", a.count},
                            {"spacing", a.log_spacing ? "log" : "linear"}});
        print_json({{"command", "sweep"},
                    {"task", ofe::detail::task_name(spec.task)},
                    {"n_points", spec.n_points()},
                    {"axes", axes},
                    {"workers", spec.workers},
                    {"config", spec.base.resolved},
                    {"would_write", {out_path(o, "sweep.csv"), out_path(o, "manifest.json")}}});
        return 0;
    }
    const auto records = ofe::run_sweep(spec);
    const auto paths = ofe::emit_tables(records, spec, o.out_dir);
    std::size_t n_failed = 0;
    for (const auto& r : records)
        if (!r.ok) ++n_failed;
    print_json({{"n_points", records.size()},
                {"n_ok", records.size() - n_failed},
                {"n_failed", n_failed},
                {"csv", paths.csv},
                {"manifest", paths.manifest}});
    return n_failed > 0 ? 2 : 0;
}

int cmd_fn_fit(const Cli& o) {
    const auto root = load_root(o);
    const auto c = parse_base(o, root);
    const auto table = ofe::read_table_csv(o.fit_input);
    const auto col = [&](const char* name) {
        const auto it = std::find(table.columns.begin(), table.columns.end(), name);
        if (it == table.columns.end())
            throw ofe::ConfigError(std::string("fn-fit: input is missing column '") + name +
                                   "'");
        return static_cast<std::size_t>(it - table.columns.begin());
    };
    const std::size_t i_f = col("f_dc_GVm");
    const std::size_t i_r = col("ratio");
    std::vector<std::pair<double, double>> data;
    data.reserve(table.rows.size());
    for (const auto& row : table.rows)
        data.emplace_back(ofe::parse_number(row[i_f]), ofe::parse_number(row[i_r]));
    if (o.dry_run) {
        print_json({{"command", "fn-fit"},
                    {"n_points", data.size()},
                    {"fit_b", o.fit_b},
                    {"would_write", {out_path(o, "fn_fit.json")}}});
        return 0;
    }
    const auto fit =
        ofe::fit_f_laser(data, ofe::detail::point_fn_params(c), o.fit_b, o.fit_start);
    nlohmann::json out = {{"f_laser_GVm", fit.f_laser},
                          {"f_laser_sigma_GVm", fit.f_laser_sigma},
                          {"b_GVm", fit.b},
                          {"b_sigma_GVm", fit.b_sigma},
                          {"b_fitted", fit.b_fitted},
                          {"residual_norm", fit.residual_norm},
                          {"iterations", fit.iterations},
                          {"n_points", data.size()}};
    ensure_out_dir(o);
    ofe::write_json_file(out_path(o, "fn_fit.json"), out);
    print_json(out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    Cli o;
    CLI::App app{"1D field-emission dynamics: bound state, pulse-driven emission, "
                 "autocorrelation traces, parameter sweeps"};
    app.set_version_flag("--version", ofe::version);
    app.require_subcommand(1);

    app.add_option("-c,--config", o.config_path, "JSON config file (defaults apply without it)");
    app.add_option("-o,--output", o.out_dir, "output directory")->capture_default_str();
    app.add_option("-j,--workers", o.workers, "worker threads (0 = one per hardware thread)");
    app.add_flag("-n,--dry-run", o.dry_run, "validate and print the plan, compute nothing");
    app.add_flag("-v,--verbose", o.verbose, "print the resolved config to stderr");

    auto* sc_gs =
        app.add_subcommand("ground-state", "calibrate the well and report the bound state");
    auto* sc_prop =
        app.add_subcommand("propagate", "single pulse-driven run; writes the flux trace");
    auto* sc_iac = app.add_subcommand("iac", "two-pulse autocorrelation trace");
    sc_iac->add_option("-m,--mode", o.iac_mode, "detector: analytic|surrogate|power|tdse")
        ->check(CLI::IsMember({"analytic", "surrogate", "power", "tdse"}));
    auto* sc_sweep = app.add_subcommand("sweep", "run the grid from the config's sweep section");
    auto* sc_fit = app.add_subcommand("fn-fit", "fit laser field (and barrier exponent) to "
                                                "contrast-vs-bias data");
    sc_fit->add_option("-i,--input", o.fit_input, "CSV with columns f_dc_GVm, ratio")
        ->required();
    sc_fit->add_flag("!--no-fit-b", o.fit_b, "hold the barrier exponent fixed");
    sc_fit->add_option("--start", o.fit_start, "initial f_laser guess, GV/m")
        ->capture_default_str();
    for (auto* sc : {sc_gs, sc_prop, sc_iac, sc_sweep, sc_fit}) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(sc_gs)) return cmd_ground_state(o);
        if (app.got_subcommand(sc_prop)) return cmd_propagate(o);
        if (app.got_subcommand(sc_iac)) return cmd_iac(o);
        if (app.got_subcommand(sc_sweep)) return cmd_sweep(o);
        return cmd_fn_fit(o);
    } catch (const ofe::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const ofe::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
