#pragma once

// Structured run configuration. One JSON file with nested sections (metal,
// laser, dc, grid, solver, plus sweep/output consumed elsewhere); every
// physical key carries its unit as a suffix. Unknown keys are rejected so a
// typo cannot silently fall back to a default. Parsing resolves everything
// to a canonical practical-unit document that is stable under re-parsing,
// which is what gets hashed into run manifests.

#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "ofe/errors.hpp"
#include "ofe/field.hpp"
#include "ofe/potential.hpp"
#include "ofe/schrodinger.hpp"
#include "ofe/units.hpp"

namespace ofe {

struct RunConfig {
    MetalModel metal = make_metal();
    GridSpec grid;
    SolverParams solver;
    double f_dc = 0.0; // au
    double enhancement = 1.0;

    // laser scalars in practical units; pulses are rebuilt from these when a
    // sweep axis moves one of them
    double tau_fs = 5.3;
    double wavelength_nm = 800.0;
    double phi_rad = 0.0;
    bool fluence_given = false;
    double f0_GVm = 2.7;
    double fluence_Jm2 = 0.0;

    nlohmann::json resolved;

    LaserPulse make_pulse() const {
        if (fluence_given)
            return pulse_from_fluence(fluence_Jm2, tau_fs, wavelength_nm, phi_rad);
        return pulse_from_peak_field(f0_GVm, tau_fs, wavelength_nm, phi_rad);
    }

    FieldConfiguration single_pulse() const {
        return FieldConfiguration(f_dc, enhancement, {make_pulse()});
    }

    void refresh_resolved();
};

namespace detail {

inline const nlohmann::json& section(const nlohmann::json& root, const char* name) {
    static const nlohmann::json empty = nlohmann::json::object();
    auto it = root.find(name);
    if (it == root.end()) return empty;
    if (!it->is_object())
        throw ConfigError(std::string("config: section '") + name + "' must be an object");
    return *it;
}

inline void check_keys(const nlohmann::json& sec, const std::set<std::string>& allowed,
                       const char* name) {
    for (auto it = sec.begin(); it != sec.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(std::string("config: unknown key ") + name + "." + it.key());
}

inline double num(const nlohmann::json& sec, const char* key, double def) {
    auto it = sec.find(key);
    if (it == sec.end()) return def;
    if (!it->is_number())
        throw ConfigError(std::string("config: ") + key + " must be a number");
    return it->get<double>();
}

inline int integer(const nlohmann::json& sec, const char* key, int def) {
    auto it = sec.find(key);
    if (it == sec.end()) return def;
    if (!it->is_number_integer())
        throw ConfigError(std::string("config: ") + key + " must be an integer");
    return it->get<int>();
}

inline void require_positive(double v, const char* what) {
    if (!(v > 0.0)) throw ConfigError(std::string("config: ") + what + " must be positive");
}

} // namespace detail

inline void RunConfig::refresh_resolved() {
    nlohmann::json j;
    j["metal"] = {{"inner_potential_eV", units::au_to_ev(metal.v0)},
                  {"work_function_eV", units::au_to_ev(metal.phi)},
                  {"well_width_nm", units::au_to_nm(metal.well_width)}};
    j["laser"] = {{"intensity_basis", fluence_given ? "fluence" : "f0"},
                  {"f0_GVm", f0_GVm},
                  {"fluence_Jm2", fluence_Jm2},
                  {"tau_fs", tau_fs},
                  {"wavelength_nm", wavelength_nm},
                  {"phi_rad", phi_rad},
                  {"enhancement", enhancement}};
    j["dc"] = {{"f_dc_GVm", units::au_to_gvm(f_dc)}};
    j["grid"] = {{"z_max_nm", units::au_to_nm(grid.z_max)},
                 {"n_points", grid.n_points},
                 {"z_detector_nm", units::au_to_nm(grid.z_detector)},
                 {"absorber_width_nm", units::au_to_nm(grid.absorber_width)},
                 {"absorber_strength", grid.absorber_strength}};
    j["solver"] = {{"dt_au", solver.dt},
                   {"tail_fs", units::au_to_fs(solver.tail)},
                   {"dc_ramp_fs", units::au_to_fs(solver.dc_ramp)}};
    resolved = std::move(j);
}

// Builds the fully resolved configuration. With no explicit well_width_nm the
// well is calibrated so the bound state sits at the Fermi level, and the
// calibrated width lands in the resolved document.
inline RunConfig parse_run_config(const nlohmann::json& root) {
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    detail::check_keys(root, {"metal", "laser", "dc", "grid", "solver", "sweep", "output"},
                       "<top>");

    RunConfig c;

    const auto& jm = detail::section(root, "metal");
    detail::check_keys(jm, {"inner_potential_eV", "work_function_eV", "well_width_nm"}, "metal");
    const double v0_eV = detail::num(jm, "inner_potential_eV", -13.5);
    const double phi_eV = detail::num(jm, "work_function_eV", 4.5);
    if (!(v0_eV < 0.0)) throw ConfigError("config: inner_potential_eV must be negative");
    detail::require_positive(phi_eV, "work_function_eV");
    c.metal = make_metal(v0_eV, phi_eV);

    const auto& jl = detail::section(root, "laser");
    detail::check_keys(jl,
                       {"f0_GVm", "fluence_Jm2", "tau_fs", "wavelength_nm", "phi_rad",
                        "enhancement"},
                       "laser");
    const bool has_f0 = jl.contains("f0_GVm");
    const bool has_fluence = jl.contains("fluence_Jm2");
    if (has_f0 && has_fluence)
        throw ConfigError("config: give either f0_GVm or fluence_Jm2, not both");
    c.tau_fs = detail::num(jl, "tau_fs", c.tau_fs);
    c.wavelength_nm = detail::num(jl, "wavelength_nm", c.wavelength_nm);
    c.phi_rad = detail::num(jl, "phi_rad", c.phi_rad);
    c.enhancement = detail::num(jl, "enhancement", c.enhancement);
    detail::require_positive(c.tau_fs, "tau_fs");
    detail::require_positive(c.wavelength_nm, "wavelength_nm");
    detail::require_positive(c.enhancement, "enhancement");
    if (!std::isfinite(c.phi_rad)) throw ConfigError("config: phi_rad must be finite");
    if (has_fluence) {
        c.fluence_given = true;
        c.fluence_Jm2 = detail::num(jl, "fluence_Jm2", 0.0);
        detail::require_positive(c.fluence_Jm2, "fluence_Jm2");
        c.f0_GVm = units::fluence_to_peak_field(c.fluence_Jm2, c.tau_fs);
    } else {
        c.f0_GVm = detail::num(jl, "f0_GVm", c.f0_GVm);
        detail::require_positive(c.f0_GVm, "f0_GVm");
        c.fluence_Jm2 = units::peak_field_to_fluence(c.f0_GVm, c.tau_fs);
    }

    const auto& jd = detail::section(root, "dc");
    detail::check_keys(jd, {"f_dc_GVm"}, "dc");
    const double f_dc_GVm = detail::num(jd, "f_dc_GVm", 0.5);
    if (f_dc_GVm < 0.0) throw ConfigError("config: f_dc_GVm must be non-negative");
    c.f_dc = units::gvm_to_au(f_dc_GVm);

    const auto& jg = detail::section(root, "grid");
    detail::check_keys(jg,
                       {"z_max_nm", "n_points", "z_detector_nm", "absorber_width_nm",
                        "absorber_strength"},
                       "grid");
    const double z_max_nm = detail::num(jg, "z_max_nm", 16.0);
    const double z_det_nm = detail::num(jg, "z_detector_nm", 8.0);
    const double abs_nm = detail::num(jg, "absorber_width_nm", 4.0);
    detail::require_positive(z_max_nm, "z_max_nm");
    detail::require_positive(z_det_nm, "z_detector_nm");
    detail::require_positive(abs_nm, "absorber_width_nm");
    c.grid.z_max = units::nm_to_au(z_max_nm);
    c.grid.n_points = detail::integer(jg, "n_points", 6600);
    if (c.grid.n_points < 64) throw ConfigError("config: n_points must be at least 64");
    c.grid.z_detector = units::nm_to_au(z_det_nm);
    c.grid.absorber_width = units::nm_to_au(abs_nm);
    c.grid.absorber_strength = detail::num(jg, "absorber_strength", 0.08);
    detail::require_positive(c.grid.absorber_strength, "absorber_strength");

    const auto& js = detail::section(root, "solver");
    detail::check_keys(js, {"dt_au", "tail_fs", "dc_ramp_fs"}, "solver");
    c.solver.dt = detail::num(js, "dt_au", c.solver.dt);
    detail::require_positive(c.solver.dt, "dt_au");
    const double tail_fs = detail::num(js, "tail_fs", units::au_to_fs(c.solver.tail));
    const double ramp_fs = detail::num(js, "dc_ramp_fs", units::au_to_fs(c.solver.dc_ramp));
    if (tail_fs < 0.0) throw ConfigError("config: tail_fs must be non-negative");
    if (ramp_fs < 0.0) throw ConfigError("config: dc_ramp_fs must be non-negative");
    c.solver.tail = units::fs_to_au(tail_fs);
    c.solver.dc_ramp = units::fs_to_au(ramp_fs);

    if (jm.contains("well_width_nm")) {
        const double w_nm = detail::num(jm, "well_width_nm", 0.0);
        detail::require_positive(w_nm, "well_width_nm");
        c.metal.well_width = units::nm_to_au(w_nm);
    } else {
        GridSpec tmpl = c.grid;
        tmpl.z_min = -c.metal.well_width;
        c.metal.well_width =
            calibrate_well_width(c.metal, tmpl, c.metal.fermi_energy(), units::ev_to_au(1e-4),
                                 c.solver);
    }
    c.grid.z_min = -c.metal.well_width;
    validate_grid(c.grid, c.metal, true);

    c.refresh_resolved();
    return c;
}

} // namespace ofe
