#pragma once

// Parameter sweeps over (F_dc, fluence or peak field, tau, phi). A sweep is
// a cartesian grid of points; each point runs one task and yields a flat
// map of scalar results. Points are independent, scheduled over a worker
// pool, and collected by index, so output order never depends on timing. A
// failing point is recorded with its diagnostic and does not disturb the
// others. Tables go out as long-format CSV plus a JSON manifest.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ofe/autocorr.hpp"
#include "ofe/config.hpp"
#include "ofe/emission.hpp"
#include "ofe/errors.hpp"
#include "ofe/fn_model.hpp"
#include "ofe/io.hpp"
#include "ofe/parallel.hpp"
#include "ofe/version.hpp"

namespace ofe {

enum class SweepTask { yield, modulation_scan, iac, fn_fit };
enum class IacMode { analytic, surrogate, power, tdse };

struct AxisSpec {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    int count = 1;
    bool log_spacing = false;

    std::vector<double> values() const {
        if (count < 1) throw ConfigError("axis " + name + ": count must be at least 1");
        if (count == 1) return {min};
        if (log_spacing && (!(min > 0.0) || !(max > 0.0)))
            throw ConfigError("axis " + name + ": log spacing needs positive endpoints");
        std::vector<double> v(count);
        for (int i = 0; i < count; ++i) {
            const double w = static_cast<double>(i) / (count - 1);
            v[i] = log_spacing ? min * std::exp(w * std::log(max / min))
                               : min + w * (max - min);
        }
        return v;
    }
};

struct SweepSpec {
    RunConfig base;
    std::vector<AxisSpec> axes; // empty = a single point
    SweepTask task = SweepTask::yield;
    int phases = 8;             // modulation_scan resolution
    IacMode iac_mode = IacMode::surrogate;
    int iac_order = 2;
    double iac_end_fs = 0.0;    // 0 = default delay range
    double iac_plateau_tolerance = 0.02;
    double fit_f_dc_min = 0.2;  // GV/m, fn_fit synthetic data range
    double fit_f_dc_max = 1.5;
    int fit_points = 12;
    unsigned workers = 1;

    std::size_t n_points() const {
        std::size_t n = 1;
        for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
        return n;
    }
};

struct RunRecord {
    std::size_t index = 0;
    std::vector<int> axis_index;
    nlohmann::json params;
    std::map<std::string, double> results;
    bool ok = false;
    std::string error;
    double wall_ms = 0.0;
    std::string toolkit_version;
    std::string hash;
};

namespace detail {

inline const char* task_name(SweepTask t) {
    switch (t) {
        case SweepTask::yield: return "yield";
        case SweepTask::modulation_scan: return "modulation_scan";
        case SweepTask::iac: return "iac";
        case SweepTask::fn_fit: return "fn_fit";
    }
    return "?";
}

inline const char* iac_mode_name(IacMode m) {
    switch (m) {
        case IacMode::analytic: return "analytic";
        case IacMode::surrogate: return "surrogate";
        case IacMode::power: return "power";
        case IacMode::tdse: return "tdse";
    }
    return "?";
}

inline nlohmann::json task_block(const SweepSpec& s) {
    nlohmann::json j;
    j["task"] = task_name(s.task);
    switch (s.task) {
        case SweepTask::yield: break;
        case SweepTask::modulation_scan: j["phases"] = s.phases; break;
        case SweepTask::iac:
            j["mode"] = iac_mode_name(s.iac_mode);
            if (s.iac_mode == IacMode::power) j["order"] = s.iac_order;
            if (s.iac_end_fs > 0.0) j["end_fs"] = s.iac_end_fs;
            if (s.iac_mode == IacMode::tdse)
                j["plateau_tolerance"] = s.iac_plateau_tolerance;
            break;
        case SweepTask::fn_fit:
            j["f_dc_min_GVm"] = s.fit_f_dc_min;
            j["f_dc_max_GVm"] = s.fit_f_dc_max;
            j["points"] = s.fit_points;
            break;
    }
    return j;
}

inline void apply_axis(RunConfig& c, const std::string& name, double v) {
    if (name == "f_dc_GVm") {
        if (v < 0.0) throw ConfigError("axis f_dc_GVm: negative value");
        c.f_dc = units::gvm_to_au(v);
    } else if (name == "fluence_Jm2") {
        if (!(v > 0.0)) throw ConfigError("axis fluence_Jm2: value must be positive");
        c.fluence_given = true;
        c.fluence_Jm2 = v;
        c.f0_GVm = units::fluence_to_peak_field(v, c.tau_fs);
    } else if (name == "f0_GVm") {
        if (!(v > 0.0)) throw ConfigError("axis f0_GVm: value must be positive");
        c.fluence_given = false;
        c.f0_GVm = v;
        c.fluence_Jm2 = units::peak_field_to_fluence(v, c.tau_fs);
    } else if (name == "tau_fs") {
        if (!(v > 0.0)) throw ConfigError("axis tau_fs: value must be positive");
        c.tau_fs = v;
        if (c.fluence_given)
            c.f0_GVm = units::fluence_to_peak_field(c.fluence_Jm2, v);
        else
            c.fluence_Jm2 = units::peak_field_to_fluence(c.f0_GVm, v);
    } else if (name == "phi_rad") {
        c.phi_rad = v;
    } else {
        throw ConfigError("unknown sweep axis '" + name + "'");
    }
}

inline FNParams point_fn_params(const RunConfig& c) {
    FNParams p;
    p.work_function_ev = units::au_to_ev(c.metal.phi);
    p.b = b_from_work_function(p.work_function_ev);
    return p;
}

inline std::map<std::string, double> run_point_task(const SweepSpec& s, const RunConfig& c,
                                                    const QuantumState* ground) {
    std::map<std::string, double> r;
    const double f_l_gvm = c.f0_GVm * c.enhancement;
    switch (s.task) {
        case SweepTask::yield: {
            const auto cfg = c.single_pulse();
            const double raw =
                integrate_yield(emission_trace(c.metal, c.grid, cfg, *ground, c.solver));
            const double bg =
                c.f_dc != 0.0
                    ? dc_background_yield(c.metal, c.grid, cfg, *ground, c.solver)
                    : 0.0;
            r["yield_raw"] = raw;
            r["dc_background"] = bg;
            r["yield_laser"] = std::max(raw - bg, 0.0);
            r["keldysh"] = units::keldysh_parameter(c.make_pulse().omega, c.metal.phi,
                                                    units::gvm_to_au(f_l_gvm));
            break;
        }
        case SweepTask::modulation_scan: {
            const auto scan = ce_modulation_scan(c.metal, c.grid, c.single_pulse(), *ground,
                                                 s.phases, c.solver);
            r["depth"] = scan.depth;
            r["yield_max"] = scan.yields[scan.i_max];
            r["yield_min"] = scan.yields[scan.i_min];
            r["phi_max_rad"] = scan.phases[scan.i_max];
            r["phi_min_rad"] = scan.phases[scan.i_min];
            break;
        }
        case SweepTask::iac: {
            if (s.iac_mode == IacMode::analytic) {
                r["ratio_predicted"] =
                    iac_ratio(point_fn_params(c), f_l_gvm, units::au_to_gvm(c.f_dc));
                break;
            }
            // the enhancement scales the optical field only, which for the
            // analytic detectors is the same as scaling the pulse amplitude
            LaserPulse p = c.make_pulse();
            const double end = s.iac_end_fs > 0.0 ? units::fs_to_au(s.iac_end_fs) : 0.0;
            IACTrace tr;
            if (s.iac_mode == IacMode::tdse) {
                tr = iac_trace_tdse(c.metal, c.grid, p, c.f_dc, make_default_delays(p, end),
                                    c.enhancement, c.solver, s.iac_plateau_tolerance);
            } else {
                p.f0 *= c.enhancement;
                const auto delays = make_default_delays(p, end);
                tr = s.iac_mode == IacMode::power
                         ? iac_trace_power(p, s.iac_order, delays)
                         : iac_trace_surrogate(p, c.f_dc, point_fn_params(c), delays);
            }
            r["peak_to_baseline"] = tr.peak_to_baseline;
            r["peak_to_baseline_envelope"] = tr.peak_to_baseline_envelope;
            r["baseline"] = tr.baseline;
            break;
        }
        case SweepTask::fn_fit: {
            const auto fnp = point_fn_params(c);
            std::vector<std::pair<double, double>> data;
            data.reserve(s.fit_points);
            for (int i = 0; i < s.fit_points; ++i) {
                const double w = s.fit_points == 1
                                     ? 0.0
                                     : static_cast<double>(i) / (s.fit_points - 1);
                const double f_dc = s.fit_f_dc_min + w * (s.fit_f_dc_max - s.fit_f_dc_min);
                data.emplace_back(f_dc, iac_ratio(fnp, f_l_gvm, f_dc));
            }
            const auto fit = fit_f_laser(data, fnp, true);
            r["f_laser_true_GVm"] = f_l_gvm;
            r["f_laser_fit_GVm"] = fit.f_laser;
            r["b_fit_GVm"] = fit.b;
            r["residual_norm"] = fit.residual_norm;
            r["iterations"] = fit.iterations;
            break;
        }
    }
    return r;
}

} // namespace detail

inline void validate_sweep(const SweepSpec& s) {
    std::set<std::string> seen;
    for (const auto& a : s.axes) {
        a.values();
        if (!seen.insert(a.name).second)
            throw ConfigError("sweep: duplicate axis '" + a.name + "'");
        // value constraints are monotone, so the endpoints cover the range
        for (double v : {a.min, a.max}) {
            RunConfig probe = s.base;
            detail::apply_axis(probe, a.name, v);
        }
    }
    if (s.phases < 8) throw ConfigError("sweep: phases must be at least 8");
    if (s.iac_order < 1 || s.iac_order > 6)
        throw ConfigError("sweep: iac order out of range");
    if (s.task == SweepTask::fn_fit) {
        if (s.fit_points < 3) throw ConfigError("sweep: fn_fit needs at least 3 points");
        if (!(s.fit_f_dc_min > 0.0) || !(s.fit_f_dc_max > s.fit_f_dc_min))
            throw ConfigError("sweep: fn_fit f_dc range is empty");
    }
    if (s.n_points() > 200000) throw ConfigError("sweep: grid exceeds 200000 points");
}

inline std::vector<RunRecord> run_sweep(const SweepSpec& spec) {
    validate_sweep(spec);
    const std::size_t n = spec.n_points();

    std::vector<std::vector<double>> axis_values;
    axis_values.reserve(spec.axes.size());
    for (const auto& a : spec.axes) axis_values.push_back(a.values());

    const bool needs_ground =
        spec.task == SweepTask::yield || spec.task == SweepTask::modulation_scan ||
        (spec.task == SweepTask::iac && spec.iac_mode == IacMode::tdse);
    GroundState gs;
    if (needs_ground) gs = ground_state(spec.base.metal, spec.base.grid, spec.base.solver);

    const nlohmann::json task_j = detail::task_block(spec);
    std::vector<RunRecord> records(n);

    parallel_for(n, spec.workers, [&](std::size_t flat) {
        RunRecord& rec = records[flat];
        rec.index = flat;
        rec.toolkit_version = version;
        rec.axis_index.resize(spec.axes.size());
        std::size_t rem = flat;
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            rec.axis_index[a] = static_cast<int>(rem % axis_values[a].size());
            rem /= axis_values[a].size();
        }
        const auto t0 = std::chrono::steady_clock::now();
        try {
            RunConfig c = spec.base;
            for (std::size_t a = 0; a < spec.axes.size(); ++a)
                detail::apply_axis(c, spec.axes[a].name, axis_values[a][rec.axis_index[a]]);
            c.refresh_resolved();
            nlohmann::json doc = c.resolved;
            doc["task"] = task_j;
            rec.params = doc;
            rec.hash = config_hash(doc);
            rec.results = detail::run_point_task(spec, c, needs_ground ? &gs.state : nullptr);
            rec.ok = true;
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
        } catch (...) {
            rec.ok = false;
            rec.error = "unknown error";
        }
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    });
    return records;
}

struct TablePaths {
    std::string csv;
    std::string manifest;
};

// Long-format CSV (one row per point per scalar result, ok points only) and
// a manifest carrying per-point status. Row order is flat grid index, then
// result name; both are deterministic.
inline TablePaths emit_tables(const std::vector<RunRecord>& records, const SweepSpec& spec,
                              const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

    nlohmann::json base_doc = spec.base.resolved;
    base_doc["task"] = detail::task_block(spec);
    const std::string base_hash = config_hash(base_doc);

    Table t;
    t.comments = {std::string("ofe ") + version,
                  std::string("task: ") + detail::task_name(spec.task),
                  "base config hash: " + base_hash,
                  "axis columns carry their unit as a suffix; value is the named result"};
    t.columns = {"index"};
    for (const auto& a : spec.axes) t.columns.push_back(a.name);
    t.columns.push_back("result");
    t.columns.push_back("value");

    std::vector<std::vector<double>> axis_values;
    for (const auto& a : spec.axes) axis_values.push_back(a.values());

    for (const auto& rec : records) {
        if (!rec.ok) continue;
        for (const auto& [name, value] : rec.results) {
            std::vector<std::string> row;
            row.reserve(t.columns.size());
            row.push_back(std::to_string(rec.index));
            for (std::size_t a = 0; a < spec.axes.size(); ++a)
                row.push_back(format_full(axis_values[a][rec.axis_index[a]]));
            row.push_back(name);
            row.push_back(format_full(value));
            t.rows.push_back(std::move(row));
        }
    }

    TablePaths paths;
    paths.csv = (std::filesystem::path(out_dir) / "sweep.csv").string();
    paths.manifest = (std::filesystem::path(out_dir) / "manifest.json").string();
    write_table_csv(paths.csv, t);

    std::size_t n_ok = 0;
    nlohmann::json points = nlohmann::json::array();
    for (const auto& rec : records) {
        nlohmann::json p;
        p["index"] = rec.index;
        p["axis_index"] = rec.axis_index;
        p["status"] = rec.ok ? "ok" : "failed";
        p["wall_ms"] = rec.wall_ms;
        if (rec.ok) {
            p["hash"] = rec.hash;
            p["results"] = rec.results;
            ++n_ok;
        } else {
            p["error"] = rec.error;
        }
        points.push_back(std::move(p));
    }
    nlohmann::json manifest;
    manifest["toolkit_version"] = version;
    manifest["base_config"] = base_doc;
    manifest["base_hash"] = base_hash;
    manifest["n_points"] = records.size();
    manifest["n_ok"] = n_ok;
    manifest["n_failed"] = records.size() - n_ok;
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& a : spec.axes)
        axes.push_back({{"name", a.name},
                        {"min", a.min},
                        {"max", a.max},
                        {"count", a.count},
                        {"spacing", a.log_spacing ? "log" : "linear"}});
    manifest["axes"] = axes;
    manifest["points"] = points;
    write_json_file(paths.manifest, manifest);
    return paths;
}

// Parses the sweep section against an already-resolved base configuration.
inline SweepSpec parse_sweep_spec(const nlohmann::json& root, RunConfig base) {
    SweepSpec s;
    s.base = std::move(base);
    const auto& js = detail::section(root, "sweep");
    detail::check_keys(js,
                       {"task", "axes", "phases", "iac_mode", "iac_order", "iac_end_fs",
                        "iac_plateau_tolerance", "fit_f_dc_min_GVm", "fit_f_dc_max_GVm",
                        "fit_points", "workers"},
                       "sweep");
    if (js.contains("task")) {
        if (!js["task"].is_string()) throw ConfigError("sweep: task must be a string");
        const std::string t = js["task"].get<std::string>();
        if (t == "yield")
            s.task = SweepTask::yield;
        else if (t == "modulation_scan")
            s.task = SweepTask::modulation_scan;
        else if (t == "iac")
            s.task = SweepTask::iac;
        else if (t == "fn_fit")
            s.task = SweepTask::fn_fit;
        else
            throw ConfigError("sweep: unknown task '" + t + "'");
    }
    if (js.contains("axes")) {
        if (!js["axes"].is_array()) throw ConfigError("sweep: axes must be an array");
        for (const auto& ja : js["axes"]) {
            if (!ja.is_object()) throw ConfigError("sweep: each axis must be an object");
            detail::check_keys(ja, {"name", "min", "max", "count", "spacing"}, "sweep.axes[]");
            AxisSpec a;
            if (!ja.contains("name") || !ja["name"].is_string())
                throw ConfigError("sweep: axis needs a string name");
            a.name = ja["name"].get<std::string>();
            a.min = detail::num(ja, "min", 0.0);
            a.max = detail::num(ja, "max", a.min);
            a.count = detail::integer(ja, "count", 1);
            if (ja.contains("spacing")) {
                if (!ja["spacing"].is_string())
                    throw ConfigError("sweep: spacing must be a string");
                const std::string sp = ja["spacing"].get<std::string>();
                if (sp == "log")
                    a.log_spacing = true;
                else if (sp != "linear")
                    throw ConfigError("sweep: spacing must be linear or log");
            }
            s.axes.push_back(std::move(a));
        }
    }
    s.phases = detail::integer(js, "phases", s.phases);
    if (js.contains("iac_mode")) {
        if (!js["iac_mode"].is_string()) throw ConfigError("sweep: iac_mode must be a string");
        const std::string m = js["iac_mode"].get<std::string>();
        if (m == "analytic")
            s.iac_mode = IacMode::analytic;
        else if (m == "surrogate")
            s.iac_mode = IacMode::surrogate;
        else if (m == "power")
            s.iac_mode = IacMode::power;
        else if (m == "tdse")
            s.iac_mode = IacMode::tdse;
        else
            throw ConfigError("sweep: unknown iac_mode '" + m + "'");
    }
    s.iac_order = detail::integer(js, "iac_order", s.iac_order);
    s.iac_end_fs = detail::num(js, "iac_end_fs", s.iac_end_fs);
    s.iac_plateau_tolerance =
        detail::num(js, "iac_plateau_tolerance", s.iac_plateau_tolerance);
    s.fit_f_dc_min = detail::num(js, "fit_f_dc_min_GVm", s.fit_f_dc_min);
    s.fit_f_dc_max = detail::num(js, "fit_f_dc_max_GVm", s.fit_f_dc_max);
    s.fit_points = detail::integer(js, "fit_points", s.fit_points);
    const int workers = detail::integer(js, "workers", static_cast<int>(s.workers));
    if (workers < 0) throw ConfigError("sweep: workers must be non-negative");
    s.workers = static_cast<unsigned>(workers);
    validate_sweep(s);
    return s;
}

} // namespace ofe
