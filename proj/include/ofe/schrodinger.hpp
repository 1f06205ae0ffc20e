#pragma once

// 1D quantum dynamics on a uniform grid: imaginary-time ground state,
// well-width calibration against a target binding energy, Crank-Nicolson
// real-time propagation under the time-dependent surface barrier, and
// probability-flux bookkeeping at a detector plane.
//
// Discretisation: 3-point Laplacian, hard walls (psi = 0) at both grid
// ends, potential evaluated at the half step. The Cayley form conserves
// the norm to roundoff when the absorber is off; a cosine-squared
// negative imaginary potential over the last absorber_width removes
// outgoing flux before the right wall can reflect it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "ofe/errors.hpp"
#include "ofe/field.hpp"
#include "ofe/potential.hpp"
#include "ofe/tridiag.hpp"
#include "ofe/units.hpp"

namespace ofe {

using cdouble = std::complex<double>;

struct GridSpec {
    double z_min = 0.0;            // au, must equal -well_width of the metal in use
    double z_max = 0.0;            // au
    int n_points = 0;
    double z_detector = 0.0;       // au, flux plane
    double absorber_width = 0.0;   // au, measured back from z_max
    double absorber_strength = 0.0; // au, peak of the imaginary potential

    double dz() const { return (z_max - z_min) / (n_points - 1); }
    double z(int i) const { return z_min + i * dz(); }
    int index_of(double zq) const {
        int i = static_cast<int>(std::lround((zq - z_min) / dz()));
        return std::clamp(i, 0, n_points - 1);
    }
    double absorber_begin() const { return z_max - absorber_width; }
};

inline GridSpec default_grid(const MetalModel& m) {
    GridSpec g;
    g.z_min = -m.well_width;
    g.z_max = units::nm_to_au(40.0);
    g.n_points = 16384;
    g.z_detector = units::nm_to_au(6.0);
    g.absorber_width = units::nm_to_au(5.0);
    g.absorber_strength = 0.08;
    return g;
}

// for_propagation additionally checks the detector/absorber layout;
// ground-state solves only need the well to be resolved.
inline void validate_grid(const GridSpec& g, const MetalModel& m, bool for_propagation) {
    if (g.n_points < 16) throw ConfigError("grid: n_points < 16");
    if (!(g.z_max > g.z_min)) throw ConfigError("grid: z_max <= z_min");
    if (std::abs(g.z_min + m.well_width) > 1e-9 * m.well_width)
        throw ConfigError("grid: z_min must sit at the inner wall -well_width");
    if (g.dz() > m.well_width_estimate() / 64.0)
        throw ConfigError("grid: dz too coarse to resolve the bound state");
    if (!for_propagation) return;
    if (!(g.absorber_width > 0.0) || g.absorber_width >= g.z_max - g.z_min)
        throw ConfigError("grid: absorber_width out of range");
    if (g.absorber_strength < 0.0) throw ConfigError("grid: absorber_strength < 0");
    if (!(g.z_detector > m.z_clamp())) throw ConfigError("grid: detector inside the clamp region");
    if (!(g.z_detector < g.absorber_begin()))
        throw ConfigError("grid: detector overlaps the absorber");
    int d = g.index_of(g.z_detector);
    if (d < 1 || d > g.n_points - 2) throw ConfigError("grid: detector index not interior");
}

struct QuantumState {
    std::vector<cdouble> psi;
};

inline double probability_norm(const QuantumState& s, const GridSpec& g) {
    double acc = 0.0;
    for (const cdouble& c : s.psi) acc += std::norm(c);
    return acc * g.dz();
}

// Im(psi* dpsi/dz) by central difference at the grid point nearest z
inline double probability_flux(const QuantumState& s, const GridSpec& g, double z) {
    int i = std::clamp(g.index_of(z), 1, g.n_points - 2);
    const cdouble grad = (s.psi[i + 1] - s.psi[i - 1]) / (2.0 * g.dz());
    return std::imag(std::conj(s.psi[i]) * grad);
}

struct FluxTrace {
    std::vector<double> t;  // au
    std::vector<double> j;  // probability per unit time, au
    double z_detector = 0.0; // actual plane used (a grid point), au
    double dt = 0.0;         // au
    double norm_initial = 0.0;
    double norm_final = 0.0;
    double left_norm_initial = 0.0; // probability left of the detector plane
    double left_norm_final = 0.0;
};

struct SolverParams {
    double dt = 0.25;                       // au
    double tail = units::fs_to_au(15.0);    // propagation continues this long after the pulse window
    double dc_ramp = units::fs_to_au(2.0);  // smooth bias turn-on at the window start; 0 = abrupt
    double itp_dtau = 2.0;                  // au, imaginary-time step
    double itp_tol = 1e-12;                 // au, energy change per step
    int itp_max_iter = 20000;
};

namespace detail {

struct PotentialArrays {
    std::vector<double> v_static; // full static potential, offset included
    std::vector<double> tilt;     // d/dF of the potential, 0 inside the clamp
    std::vector<double> w;        // absorber profile
};

inline PotentialArrays build_arrays(const MetalModel& m, const GridSpec& g) {
    PotentialArrays a;
    const int n = g.n_points;
    a.v_static.resize(n);
    a.tilt.resize(n);
    a.w.resize(n);
    const double za = g.absorber_begin();
    for (int i = 0; i < n; ++i) {
        const double z = g.z(i);
        a.v_static[i] = static_potential(m, z);
        a.tilt[i] = field_tilt(m, z);
        if (g.absorber_width > 0.0 && z > za) {
            const double s = std::sin(0.5 * units::pi * (z - za) / g.absorber_width);
            a.w[i] = g.absorber_strength * s * s;
        } else {
            a.w[i] = 0.0;
        }
    }
    return a;
}

// Re<psi|H psi>/<psi|psi> for H = -1/2 d2/dz2 + v, hard walls
inline double rayleigh_quotient(const std::vector<cdouble>& psi, const std::vector<double>& v,
                                double dz) {
    const std::size_t n = psi.size();
    const double kin = 1.0 / (dz * dz);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const cdouble h = kin * psi[i] - 0.5 * kin * (psi[i - 1] + psi[i + 1]) + v[i] * psi[i];
        num += std::real(std::conj(psi[i]) * h);
        den += std::norm(psi[i]);
    }
    den += std::norm(psi[0]) + std::norm(psi[n - 1]);
    return num / den;
}

} // namespace detail

struct GroundState {
    QuantumState state;
    double energy = 0.0; // au, offset included
    int iterations = 0;
};

// Imaginary-time Cayley iteration on the static potential. Converges when
// the Rayleigh energy moves less than itp_tol per step.
inline GroundState ground_state(const MetalModel& m, const GridSpec& g,
                                const SolverParams& sp = {}) {
    validate_grid(g, m, false);
    const int n = g.n_points;
    const double dz = g.dz();
    // the energy offset is reporting-only: iterate on the offset-free
    // potential so the converged state does not depend on it at all
    MetalModel m0 = m;
    m0.energy_offset = 0.0;
    const auto arrays = detail::build_arrays(m0, g);

    // smooth start localised in the well keeps high-k content negligible
    std::vector<double> psi(n, 0.0);
    const double zc = 0.5 * (g.z_min + m.z_clamp());
    const double sigma = std::max((m.z_clamp() - g.z_min) / 6.0, 2.0 * dz);
    for (int i = 1; i + 1 < n; ++i) {
        const double u = (g.z(i) - zc) / sigma;
        psi[i] = std::exp(-0.5 * u * u);
    }

    const double dtau = sp.itp_dtau;
    const double kin = 1.0 / (dz * dz);
    const double off = -dtau / (4.0 * dz * dz);
    std::vector<double> diag(n), rhs(n), work(n);
    for (int i = 0; i < n; ++i) diag[i] = 1.0 + 0.5 * dtau * (kin + arrays.v_static[i]);

    auto renormalise = [&] {
        double acc = 0.0;
        for (double x : psi) acc += x * x;
        const double inv = 1.0 / std::sqrt(acc * dz);
        for (double& x : psi) x *= inv;
    };
    auto energy_of = [&] {
        double num = 0.0, den = 0.0;
        for (int i = 1; i + 1 < n; ++i) {
            const double h =
                kin * psi[i] - 0.5 * kin * (psi[i - 1] + psi[i + 1]) + arrays.v_static[i] * psi[i];
            num += psi[i] * h;
            den += psi[i] * psi[i];
        }
        return num / den;
    };

    renormalise();
    double e_prev = energy_of();
    int iter = 0;
    for (; iter < sp.itp_max_iter; ++iter) {
        for (int i = 1; i + 1 < n; ++i)
            rhs[i] = (2.0 - diag[i]) * psi[i] - off * (psi[i - 1] + psi[i + 1]);
        rhs[0] = rhs[n - 1] = 0.0;
        detail::thomas_const_off(diag.data() + 1, off, rhs.data() + 1, work.data(), n - 2);
        rhs[0] = rhs[n - 1] = 0.0;
        psi.swap(rhs);
        renormalise();
        const double e = energy_of();
        const bool done = std::abs(e - e_prev) < sp.itp_tol && iter > 2;
        e_prev = e;
        if (done) break;
    }
    if (iter >= sp.itp_max_iter)
        throw ConvergenceError("ground_state: imaginary time did not settle");

    double sign_acc = 0.0;
    for (double x : psi) sign_acc += x;
    const double flip = sign_acc < 0.0 ? -1.0 : 1.0;

    GroundState out;
    out.state.psi.resize(n);
    for (int i = 0; i < n; ++i) out.state.psi[i] = flip * psi[i];
    out.energy = e_prev + m.energy_offset;
    out.iterations = iter + 1;
    return out;
}

// Finds the well width whose ground state sits at e_target. Secant with a
// bisection fallback on a bracketing interval; E1 is monotone decreasing
// in the width, so the bracket always exists nearby.
inline double calibrate_well_width(const MetalModel& m, const GridSpec& grid_template,
                                   double e_target, double e_tol = units::ev_to_au(1e-4),
                                   const SolverParams& sp = {}) {
    if (!(e_target > m.v0) )
        throw ConfigError("calibrate_well_width: target below the band bottom");
    auto residual = [&](double width) {
        MetalModel trial = m;
        trial.well_width = width;
        GridSpec g = grid_template;
        g.z_min = -width;
        return ground_state(trial, g, sp).energy - e_target;
    };

    double a = m.well_width_estimate();
    double fa = residual(a);
    if (std::abs(fa) < e_tol) return a;
    // walk toward the sign change: wider well lowers E1
    double b = a, fb = fa;
    const double step = fa > 0.0 ? 1.25 : 0.8;
    for (int k = 0; k < 40 && fa * fb > 0.0; ++k) {
        a = b;
        fa = fb;
        b *= step;
        fb = residual(b);
    }
    if (fa * fb > 0.0) throw ConvergenceError("calibrate_well_width: no bracket found");
    if (a > b) {
        std::swap(a, b);
        std::swap(fa, fb);
    }

    double x = b, fx = fb;
    double x_prev = a, f_prev = fa;
    for (int k = 0; k < 80; ++k) {
        if (std::abs(fx) < e_tol) return x;
        double cand = x - fx * (x - x_prev) / (fx - f_prev);
        if (!(cand > a && cand < b)) cand = 0.5 * (a + b);
        x_prev = x;
        f_prev = fx;
        x = cand;
        fx = residual(x);
        if (fx > 0.0) a = x; else b = x;
    }
    throw ConvergenceError("calibrate_well_width: residual did not close");
}

struct PropagateResult {
    QuantumState state;
    FluxTrace trace;
};

// Pulse window of the field configuration padded by the solver tail.
inline std::pair<double, double> propagation_window(const FieldConfiguration& cfg,
                                                    const SolverParams& sp = {}) {
    double begin = 0.0, end = 0.0;
    if (!cfg.pulses.empty()) {
        begin = cfg.window_begin();
        end = cfg.window_end();
    }
    return {begin, end + sp.tail};
}

// Crank-Nicolson propagation from t_begin to t_end. The constant reference
// v0 + energy_offset is subtracted from H before stepping, so a rigid
// energy offset changes nothing but reported energies, bit for bit. The
// flux at the detector plane is recorded every step.
inline PropagateResult propagate(const QuantumState& initial, const MetalModel& m,
                                 const FieldConfiguration& cfg, const GridSpec& g,
                                 double t_begin, double t_end, const SolverParams& sp = {}) {
    validate_grid(g, m, true);
    const int n = g.n_points;
    if (static_cast<int>(initial.psi.size()) != n)
        throw ConfigError("propagate: state size does not match the grid");
    if (!(t_end > t_begin)) throw ConfigError("propagate: empty time span");
    if (!(sp.dt > 0.0)) throw ConfigError("propagate: dt <= 0");
    for (const LaserPulse& p : cfg.pulses)
        if (sp.dt > p.carrier_period() / 200.0)
            throw ConfigError("propagate: dt coarser than 1/200 carrier period");

    // evolve under H - v0 with the offset stripped: a rigid offset then
    // cannot touch the arithmetic, so traces match bit for bit
    MetalModel m0 = m;
    m0.energy_offset = 0.0;
    const auto arrays = detail::build_arrays(m0, g);
    const double v_ref = m.v0;
    const double dz = g.dz();
    const int d = g.index_of(g.z_detector);

    const long n_steps = std::lround(std::ceil((t_end - t_begin) / sp.dt - 1e-12));
    const double dt = (t_end - t_begin) / static_cast<double>(n_steps);
    const double kin = 1.0 / (dz * dz);
    const cdouble off(0.0, -dt / (4.0 * dz * dz));
    const cdouble ihalf(0.0, 0.5 * dt);

    std::vector<cdouble> psi = initial.psi;
    psi[0] = psi[n - 1] = cdouble(0.0, 0.0);
    std::vector<cdouble> rhs(n), work(n);

    auto left_norm = [&] {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) acc += std::norm(psi[i]);
        return (acc + 0.5 * std::norm(psi[d])) * dz;
    };
    auto flux_now = [&] {
        const cdouble grad = (psi[d + 1] - psi[d - 1]) / (2.0 * dz);
        return std::imag(std::conj(psi[d]) * grad);
    };
    auto norm_now = [&] {
        double acc = 0.0;
        for (const cdouble& c : psi) acc += std::norm(c);
        return acc * dz;
    };

    FluxTrace trace;
    trace.t.reserve(n_steps + 1);
    trace.j.reserve(n_steps + 1);
    trace.z_detector = g.z(d);
    trace.dt = dt;
    trace.norm_initial = norm_now();
    trace.left_norm_initial = left_norm();
    trace.t.push_back(t_begin);
    trace.j.push_back(flux_now());

    const double norm_cap = trace.norm_initial * (1.0 + 1e-6) + 1e-12;
    const double* vs = arrays.v_static.data();
    const double* tl = arrays.tilt.data();
    const double* w = arrays.w.data();

    // propagation starts from the field-free ground state, so the bias is
    // switched on smoothly; an abrupt turn-on sheds a spurious emission burst
    const auto field_at = [&](double t) {
        double fdc = cfg.f_dc;
        if (sp.dc_ramp > 0.0 && t < t_begin + sp.dc_ramp) {
            const double s = std::sin(0.5 * units::pi * (t - t_begin) / sp.dc_ramp);
            fdc *= s * s;
        }
        return fdc + cfg.optical_field(t);
    };

    for (long k = 0; k < n_steps; ++k) {
        const double t_half = t_begin + (static_cast<double>(k) + 0.5) * dt;
        const double f = field_at(t_half);
        for (int i = 1; i + 1 < n; ++i) {
            const cdouble h(kin + vs[i] + f * tl[i] - v_ref, -w[i]);
            const cdouble diag = 1.0 + ihalf * h;
            rhs[i] = (2.0 - diag) * psi[i] - off * (psi[i - 1] + psi[i + 1]);
            work[i] = diag; // reuse as the diagonal buffer for the solve
        }
        {
            // in-place Thomas on the interior, diagonal in work, solution into psi
            cdouble* dg = work.data() + 1;
            cdouble* r = rhs.data() + 1;
            const std::size_t nn = static_cast<std::size_t>(n - 2);
            cdouble inv = detail::reciprocal(dg[0]);
            dg[0] = off * inv; // becomes the forward coefficient
            r[0] = r[0] * inv;
            for (std::size_t i = 1; i < nn; ++i) {
                inv = detail::reciprocal(dg[i] - off * dg[i - 1]);
                dg[i] = off * inv;
                r[i] = (r[i] - off * r[i - 1]) * inv;
            }
            psi[n - 2] = r[nn - 1];
            for (std::size_t i = nn - 1; i-- > 0;) {
                r[i] = r[i] - dg[i] * r[i + 1];
                psi[i + 1] = r[i];
            }
            psi[0] = psi[n - 1] = cdouble(0.0, 0.0);
        }
        trace.t.push_back(t_begin + (static_cast<double>(k) + 1.0) * dt);
        trace.j.push_back(flux_now());
        if ((k & 127) == 0 || k + 1 == n_steps) {
            const double p = norm_now();
            if (!std::isfinite(p)) throw NumericalError("propagate: state is not finite");
            if (p > norm_cap) throw NumericalError("propagate: norm grew beyond tolerance");
        }
    }

    PropagateResult out;
    out.state.psi = std::move(psi);
    out.trace = std::move(trace);
    out.trace.norm_final = probability_norm(out.state, g);
    {
        double acc = 0.0;
        for (int i = 0; i < d; ++i) acc += std::norm(out.state.psi[i]);
        out.trace.left_norm_final = (acc + 0.5 * std::norm(out.state.psi[d])) * dz;
    }
    return out;
}

// Energy of the state under the real Hamiltonian at time t (no absorber).
inline double energy_expectation(const QuantumState& s, const MetalModel& m,
                                 const FieldConfiguration& cfg, const GridSpec& g, double t) {
    validate_grid(g, m, false);
    const auto arrays = detail::build_arrays(m, g);
    const double f = cfg.total_field(t);
    std::vector<double> v(arrays.v_static);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += f * arrays.tilt[i];
    return detail::rayleigh_quotient(s.psi, v, g.dz());
}

} // namespace ofe
