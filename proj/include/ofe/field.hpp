#pragma once

// Few-cycle Gaussian pulses and the combined electric field at the tip apex:
//
//   F(t) = f_dc + xi * sum_k  f0_k exp(-2 ln2 (t - t0_k)^2 / tau_k^2) cos(omega_k (t - t0_k) + phi_k)
//
// tau is the FWHM of the intensity (squared) envelope and phi is the
// carrier-envelope phase at the envelope maximum. The enhancement factor xi
// applies to the optical part only, never to the static bias f_dc.
// Each pulse is truncated to |t - t0| <= 4 tau; there the squared envelope is
// below 1e-19 of its peak, and outside the window the field is exactly f_dc.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ofe/units.hpp"

namespace ofe {

struct LaserPulse {
    double f0 = 0.0;    // peak field at the envelope maximum, au
    double tau = 0.0;   // intensity-envelope FWHM, au
    double omega = 0.0; // carrier angular frequency, au
    double phi = 0.0;   // carrier-envelope phase, wrapped to (-pi, pi]
    double t0 = 0.0;    // envelope maximum, au

    LaserPulse(double f0_, double tau_, double omega_, double phi_, double t0_ = 0.0)
        : f0(f0_), tau(tau_), omega(omega_), phi(wrap_phase(phi_)), t0(t0_) {
        if (f0 < 0.0) throw std::invalid_argument("peak field must be non-negative");
        if (tau <= 0.0) throw std::invalid_argument("pulse duration must be positive");
        if (omega <= 0.0) throw std::invalid_argument("carrier frequency must be positive");
        if (!std::isfinite(phi)) throw std::invalid_argument("phase must be finite");
    }

    static double wrap_phase(double p) { return std::remainder(p, 2.0 * std::numbers::pi); }

    double window_begin() const { return t0 - 4.0 * tau; }
    double window_end() const { return t0 + 4.0 * tau; }

    double envelope(double t) const {
        const double s = t - t0;
        if (std::abs(s) > 4.0 * tau) return 0.0;
        return f0 * std::exp(-2.0 * std::numbers::ln2 * s * s / (tau * tau));
    }

    double field(double t) const {
        const double s = t - t0;
        if (std::abs(s) > 4.0 * tau) return 0.0;
        return f0 * std::exp(-2.0 * std::numbers::ln2 * s * s / (tau * tau)) *
               std::cos(omega * s + phi);
    }

    double carrier_period() const { return 2.0 * std::numbers::pi / omega; }

    // closed form, consistent with units::peak_field_to_fluence
    double fluence_au() const {
        return 0.5 * units::c_au * units::eps0_au * f0 * f0 * tau *
               std::sqrt(std::numbers::pi / (4.0 * std::numbers::ln2));
    }
};

inline LaserPulse pulse_from_peak_field(double f0_GVm, double tau_fs, double lambda_nm,
                                        double phi, double t0_fs = 0.0) {
    return LaserPulse(units::gvm_to_au(f0_GVm), units::fs_to_au(tau_fs),
                      units::omega_from_wavelength_nm(lambda_nm), phi, units::fs_to_au(t0_fs));
}

inline LaserPulse pulse_from_fluence(double fluence_Jm2, double tau_fs, double lambda_nm,
                                     double phi, double t0_fs = 0.0) {
    return pulse_from_peak_field(units::fluence_to_peak_field(fluence_Jm2, tau_fs), tau_fs,
                                 lambda_nm, phi, t0_fs);
}

struct FieldConfiguration {
    double f_dc = 0.0;        // static bias field at the apex, au
    double enhancement = 1.0; // optical near-field enhancement xi
    std::vector<LaserPulse> pulses;

    FieldConfiguration() = default;
    FieldConfiguration(double f_dc_, double enhancement_, std::vector<LaserPulse> pulses_)
        : f_dc(f_dc_), enhancement(enhancement_), pulses(std::move(pulses_)) {
        if (enhancement <= 0.0) throw std::invalid_argument("enhancement must be positive");
        if (!std::isfinite(f_dc)) throw std::invalid_argument("f_dc must be finite");
    }

    double optical_field(double t) const {
        double f = 0.0;
        for (const auto& p : pulses) f += p.field(t);
        return enhancement * f;
    }

    double total_field(double t) const { return f_dc + optical_field(t); }

    // union of the pulse windows; [0, 0] when there is no optical field
    double window_begin() const {
        double b = 0.0;
        bool first = true;
        for (const auto& p : pulses) {
            b = first ? p.window_begin() : std::min(b, p.window_begin());
            first = false;
        }
        return b;
    }
    double window_end() const {
        double e = 0.0;
        bool first = true;
        for (const auto& p : pulses) {
            e = first ? p.window_end() : std::max(e, p.window_end());
            first = false;
        }
        return e;
    }
};

// Two replicas of the same pulse, the second one delayed; what a Michelson
// interferometer hands to the tip. The carrier shifts with the envelope.
inline FieldConfiguration delayed_pair(const LaserPulse& p, double delay, double f_dc = 0.0,
                                       double enhancement = 1.0) {
    if (!std::isfinite(delay)) throw std::invalid_argument("delay must be finite");
    LaserPulse shifted = p;
    shifted.t0 = p.t0 + delay;
    return FieldConfiguration(f_dc, enhancement, {p, shifted});
}

} // namespace ofe
