#pragma once

// Hartree atomic units (hbar = m_e = e = 1) are used internally everywhere.
// Interfaces speak practical units: eV, nm, fs, GV/m, J/m^2, volts.
// Every factor derives from the CODATA 2018 SI anchors below, so the
// conversions are mutually consistent to full double precision.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ofe::units {

inline constexpr double pi = std::numbers::pi;

// SI anchors
inline constexpr double hartree_J = 4.3597447222071e-18;
inline constexpr double bohr_m = 5.29177210903e-11;
inline constexpr double hbar_Js = 1.054571817e-34;
inline constexpr double e_C = 1.602176634e-19;

// derived factors, one atomic unit in the named practical unit
inline constexpr double hartree_eV = hartree_J / e_C;                     // 27.211386
inline constexpr double bohr_nm = bohr_m * 1e9;                           // 0.0529177
inline constexpr double time_au_fs = hbar_Js / hartree_J * 1e15;          // 0.02418884
inline constexpr double field_au_GVm = hartree_J / (e_C * bohr_m) * 1e-9; // 514.220675
inline constexpr double fluence_au_Jm2 = hartree_J / (bohr_m * bohr_m);   // 1556.89

inline constexpr double c_au = 137.035999084;
inline constexpr double eps0_au = 1.0 / (4.0 * pi);

inline constexpr double ev_to_au(double e) { return e / hartree_eV; }
inline constexpr double au_to_ev(double e) { return e * hartree_eV; }
inline constexpr double nm_to_au(double z) { return z / bohr_nm; }
inline constexpr double au_to_nm(double z) { return z * bohr_nm; }
inline constexpr double fs_to_au(double t) { return t / time_au_fs; }
inline constexpr double au_to_fs(double t) { return t * time_au_fs; }
inline constexpr double gvm_to_au(double f) { return f / field_au_GVm; }
inline constexpr double au_to_gvm(double f) { return f * field_au_GVm; }
inline constexpr double jm2_to_au(double w) { return w / fluence_au_Jm2; }
inline constexpr double au_to_jm2(double w) { return w * fluence_au_Jm2; }
// electric potential, one atomic unit = hartree per elementary charge
inline constexpr double volt_to_au(double u) { return u / hartree_eV; }
inline constexpr double au_to_volt(double u) { return u * hartree_eV; }

inline double omega_from_wavelength_nm(double lambda_nm) {
    if (lambda_nm <= 0.0) throw std::invalid_argument("wavelength must be positive");
    return 2.0 * pi * c_au / nm_to_au(lambda_nm);
}

inline double carrier_period_au(double omega_au) {
    if (omega_au <= 0.0) throw std::invalid_argument("omega must be positive");
    return 2.0 * pi / omega_au;
}

// Fluence of a Gaussian pulse whose intensity envelope has FWHM tau:
//   W = (1/2) c eps0 F0^2 tau sqrt(pi / (4 ln 2))
inline double peak_field_to_fluence(double f0_GVm, double tau_fs) {
    if (f0_GVm < 0.0) throw std::invalid_argument("peak field must be non-negative");
    if (tau_fs <= 0.0) throw std::invalid_argument("pulse duration must be positive");
    const double f0 = gvm_to_au(f0_GVm);
    const double tau = fs_to_au(tau_fs);
    const double w = 0.5 * c_au * eps0_au * f0 * f0 * tau * std::sqrt(pi / (4.0 * std::numbers::ln2));
    return au_to_jm2(w);
}

inline double fluence_to_peak_field(double fluence_Jm2, double tau_fs) {
    if (fluence_Jm2 < 0.0) throw std::invalid_argument("fluence must be non-negative");
    if (tau_fs <= 0.0) throw std::invalid_argument("pulse duration must be positive");
    const double w = jm2_to_au(fluence_Jm2);
    const double tau = fs_to_au(tau_fs);
    const double f0 = std::sqrt(2.0 * w / (c_au * eps0_au * tau * std::sqrt(pi / (4.0 * std::numbers::ln2))));
    return au_to_gvm(f0);
}

// Static surface field of a tip at voltage U, radius r, field reduction factor k.
// U in volts over k*r in nm is directly GV/m.
inline double tip_voltage_to_field(double u_volts, double k, double r_nm) {
    if (k <= 0.0) throw std::invalid_argument("field reduction factor must be positive");
    if (r_nm <= 0.0) throw std::invalid_argument("tip radius must be positive");
    return u_volts / (k * r_nm);
}

// gamma = omega sqrt(2 m Phi) / (e F), all in atomic units
inline double keldysh_parameter(double omega_au, double phi_au, double f_au) {
    if (omega_au <= 0.0) throw std::invalid_argument("omega must be positive");
    if (phi_au <= 0.0) throw std::invalid_argument("work function must be positive");
    if (f_au <= 0.0) throw std::invalid_argument("field must be positive");
    return omega_au * std::sqrt(2.0 * phi_au) / f_au;
}

} // namespace ofe::units
