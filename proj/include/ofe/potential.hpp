#pragma once

// Electron potential of the flat-bottomed metal with an image-charge barrier:
//
//   V(z) = v0                                   z <= z_c   (metal and clamp)
//   V(z) = -1/(4 z) - z F_total(t)              z >  z_c
//
// in atomic units, where z_c = 1/(4 |v0|) is the point where the bare image
// term crosses v0, so V is continuous there at zero field. The field term is
// screened inside the metal and only tilts the region z > z_c. A positive
// total field presses the barrier down and drives emission toward +z.

#include <cmath>
#include <stdexcept>

#include "ofe/field.hpp"
#include "ofe/units.hpp"

namespace ofe {

struct MetalModel {
    double v0;                  // inner potential, au (< 0)
    double phi;                 // work function, au (> 0)
    double well_width;          // L, extent of the flat region at z < 0, au
    double energy_offset = 0.0; // rigid shift of the whole potential, au
    bool image_enabled = true;  // disabled: flat v0 floor everywhere (test hook)

    MetalModel(double v0_, double phi_, double well_width_)
        : v0(v0_), phi(phi_), well_width(well_width_) {
        if (v0 >= 0.0) throw std::invalid_argument("inner potential must be negative");
        if (phi <= 0.0) throw std::invalid_argument("work function must be positive");
        if (-phi <= v0) throw std::invalid_argument("Fermi level must lie above the well floor");
        if (well_width <= 0.0) throw std::invalid_argument("well width must be positive");
    }

    double z_clamp() const { return 1.0 / (4.0 * std::abs(v0)); }

    // target for the bound-state calibration
    double fermi_energy() const { return -phi; }

    // width of an infinite square well with floor v0 whose ground state sits
    // at the Fermi level; the calibration's starting estimate
    double well_width_estimate() const {
        return units::pi / std::sqrt(2.0 * (-phi - v0));
    }
};

inline MetalModel make_metal(double v0_eV = -13.5, double phi_eV = 4.5) {
    MetalModel m(units::ev_to_au(v0_eV), units::ev_to_au(phi_eV), 1.0);
    m.well_width = m.well_width_estimate();
    return m;
}

// static part, everything except the field tilt
inline double static_potential(const MetalModel& m, double z) {
    if (z < -m.well_width) throw std::domain_error("z below the back wall of the well");
    if (!m.image_enabled) return m.v0 + m.energy_offset;
    if (z <= m.z_clamp()) return m.v0 + m.energy_offset;
    return -1.0 / (4.0 * z) + m.energy_offset;
}

// -z factor multiplying the instantaneous total field; zero where screened
inline double field_tilt(const MetalModel& m, double z) {
    return z > m.z_clamp() ? -z : 0.0;
}

inline double potential_at(const MetalModel& m, const FieldConfiguration& cfg, double z, double t) {
    return static_potential(m, z) + field_tilt(m, z) * cfg.total_field(t);
}

struct BarrierMax {
    double z; // au
    double v; // au
};

// Maximum of the static tilted barrier -1/(4z) - z F over z > z_c:
//   z* = 1/(2 sqrt(F)),  V(z*) = -sqrt(F)
inline BarrierMax barrier_maximum(const MetalModel& m, double f_au) {
    if (f_au <= 0.0) throw std::domain_error("barrier maximum needs a positive field");
    if (!m.image_enabled) throw std::domain_error("barrier maximum needs the image term");
    const double zs = 0.5 / std::sqrt(f_au);
    if (zs <= m.z_clamp())
        throw std::domain_error("field so strong the barrier maximum falls inside the clamp");
    return {zs, -std::sqrt(f_au) + m.energy_offset};
}

// Schottky lowering of the work-function barrier, sqrt(F) in au
inline double schottky_lowering(double f_au) {
    if (f_au < 0.0) throw std::domain_error("Schottky lowering needs a non-negative field");
    return std::sqrt(f_au);
}

} // namespace ofe
