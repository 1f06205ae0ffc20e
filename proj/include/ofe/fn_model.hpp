#pragma once

// Closed-form cold field emission: the rectifying current, the two-pulse
// baseline and peak currents it implies, and a least-squares fit of the
// optical field strength to measured peak-to-baseline ratios.
//
// Fields are in GV/m (= V/nm) and work functions in eV throughout this
// header; the barrier-shape correction hard-codes that choice.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "ofe/errors.hpp"
#include "ofe/units.hpp"

namespace ofe {

// exponent constant of the tunnelling current, 8 pi sqrt(2m) phi^(3/2) / (3 h q)
inline double b_from_work_function(double phi_ev) {
    if (!(phi_ev > 0.0)) throw std::domain_error("work function must be positive");
    const double m_e = units::hbar_Js * units::hbar_Js /
                       (units::hartree_J * units::bohr_m * units::bohr_m);
    const double h = 2.0 * units::pi * units::hbar_Js;
    const double phi_j = phi_ev * units::e_C;
    const double b_vm = 8.0 * units::pi * std::sqrt(2.0 * m_e) * phi_j * std::sqrt(phi_j) /
                        (3.0 * h * units::e_C);
    return b_vm * 1e-9; // GV/m
}

// barrier-shape factor v(y), y^2 = (Schottky lowering / work function)^2;
// quadratic-with-log approximation, exact at y = 0 and y = 1
inline double nordheim_v(double y) {
    if (y <= 0.0) return 1.0;
    if (y >= 1.0) return 0.0;
    const double y2 = y * y;
    return 1.0 - y2 + y2 * std::log(y2) / 6.0;
}

struct FNParams {
    double a = 1.0;                      // prefactor, current units per field^2
    double b = b_from_work_function(4.5); // GV/m
    bool schottky_correction = true;
    double work_function_ev = 4.5;
};

inline double schottky_y(const FNParams& p, double f_gvm) {
    const double coulomb_evnm = units::hartree_eV * units::bohr_nm; // e^2/(4 pi eps0)
    return std::sqrt(coulomb_evnm * f_gvm) / p.work_function_ev;
}

// true when the lowering exceeds the work function and the exponent is clamped away
inline bool schottky_clamped(const FNParams& p, double f_gvm) {
    return p.schottky_correction && schottky_y(p, f_gvm) >= 1.0;
}

inline double fn_exponent(const FNParams& p, double f_gvm) {
    double b_eff = p.b;
    if (p.schottky_correction) b_eff *= nordheim_v(schottky_y(p, f_gvm));
    return b_eff / f_gvm;
}

inline double fn_current(const FNParams& p, double f_gvm) {
    if (!(f_gvm > 0.0)) throw std::domain_error("fn_current: field must be positive");
    return p.a * f_gvm * f_gvm * std::exp(-fn_exponent(p, f_gvm));
}

// two non-overlapping replicas: each contributes at field f_laser + f_dc
inline double iac_baseline(const FNParams& p, double f_laser, double f_dc) {
    if (f_laser < 0.0) throw std::domain_error("iac_baseline: f_laser must be non-negative");
    if (!(f_laser + f_dc > 0.0)) throw std::domain_error("iac_baseline: total field not positive");
    return 2.0 * fn_current(p, f_laser + f_dc);
}

// perfect overlap doubles the optical part only
inline double iac_peak(const FNParams& p, double f_laser, double f_dc) {
    if (f_laser < 0.0) throw std::domain_error("iac_peak: f_laser must be non-negative");
    if (!(f_laser + f_dc > 0.0)) throw std::domain_error("iac_peak: total field not positive");
    return fn_current(p, 2.0 * f_laser + f_dc);
}

// peak / baseline with the prefactor never entering the arithmetic
inline double iac_ratio(const FNParams& p, double f_laser, double f_dc) {
    if (f_laser < 0.0) throw std::domain_error("iac_ratio: f_laser must be non-negative");
    if (!(f_laser + f_dc > 0.0)) throw std::domain_error("iac_ratio: total field not positive");
    const double fb = f_laser + f_dc;
    const double fp = 2.0 * f_laser + f_dc;
    const double quad = (fp * fp) / (2.0 * fb * fb);
    return quad * std::exp(fn_exponent(p, fb) - fn_exponent(p, fp));
}

struct FitResult {
    double f_laser = 0.0;       // GV/m
    double f_laser_sigma = 0.0;
    double b = 0.0;             // GV/m, copied from params unless fitted
    double b_sigma = 0.0;
    bool b_fitted = false;
    double residual_norm = 0.0; // sqrt of the summed squared log residuals
    int iterations = 0;
};

namespace detail {

// Levenberg-Marquardt on log-ratio residuals with log-space parameters;
// theta = {ln f_laser [, ln b]}.
class RatioFitProblem {
  public:
    RatioFitProblem(const std::vector<std::pair<double, double>>& data, FNParams p, bool fit_b)
        : data_(data), params_(p), fit_b_(fit_b) {}

    std::size_t n_params() const { return fit_b_ ? 2 : 1; }

    std::vector<double> residuals(const double* theta) const {
        FNParams p = params_;
        const double f_laser = std::exp(theta[0]);
        if (fit_b_) p.b = std::exp(theta[1]);
        std::vector<double> r(data_.size());
        for (std::size_t i = 0; i < data_.size(); ++i)
            r[i] = std::log(iac_ratio(p, f_laser, data_[i].first)) - std::log(data_[i].second);
        return r;
    }

    void jacobian(const double* theta, std::vector<std::vector<double>>& cols) const {
        const double h = 1e-6;
        cols.assign(n_params(), {});
        double t[2] = {theta[0], fit_b_ ? theta[1] : 0.0};
        for (std::size_t k = 0; k < n_params(); ++k) {
            const double keep = t[k];
            t[k] = keep + h;
            auto hi = residuals(t);
            t[k] = keep - h;
            auto lo = residuals(t);
            t[k] = keep;
            cols[k].resize(hi.size());
            for (std::size_t i = 0; i < hi.size(); ++i)
                cols[k][i] = (hi[i] - lo[i]) / (2.0 * h);
        }
    }

  private:
    const std::vector<std::pair<double, double>>& data_;
    FNParams params_;
    bool fit_b_;
};

inline double sum_sq(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

} // namespace detail

inline FitResult fit_f_laser(const std::vector<std::pair<double, double>>& data,
                             const FNParams& params, bool fit_b = false,
                             double f_laser_start = 1.0) {
    if (data.size() < 3) throw FitError("fit_f_laser: need at least 3 data points");
    for (const auto& [f_dc, ratio] : data)
        if (!(ratio > 0.0)) throw FitError("fit_f_laser: ratios must be positive");
    if (!(f_laser_start > 0.0)) throw FitError("fit_f_laser: start value must be positive");

    detail::RatioFitProblem problem(data, params, fit_b);
    const std::size_t np = problem.n_params();
    double theta[2] = {std::log(f_laser_start), fit_b ? std::log(params.b) : 0.0};

    auto r = problem.residuals(theta);
    double rss = detail::sum_sq(r);
    std::vector<std::vector<double>> jcols;
    double lambda = 1e-3;
    int iter = 0;
    const int max_iter = 200;
    bool converged = false;

    double jtj[2][2] = {};
    for (; iter < max_iter; ++iter) {
        problem.jacobian(theta, jcols);
        double jtr[2] = {};
        for (std::size_t a = 0; a < np; ++a) {
            jtr[a] = 0.0;
            for (std::size_t b = 0; b < np; ++b) {
                double s = 0.0;
                for (std::size_t i = 0; i < r.size(); ++i) s += jcols[a][i] * jcols[b][i];
                jtj[a][b] = s;
            }
            for (std::size_t i = 0; i < r.size(); ++i) jtr[a] += jcols[a][i] * r[i];
        }

        if (np == 2) {
            const double tr = jtj[0][0] + jtj[1][1];
            const double det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
            const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
            const double emax = tr / 2.0 + disc;
            const double emin = tr / 2.0 - disc;
            if (!(emin > emax * 1e-12))
                throw DegeneracyError("fit_f_laser: parameters are not identifiable");
        } else if (!(jtj[0][0] > 1e-24)) {
            throw DegeneracyError("fit_f_laser: ratio is insensitive to f_laser");
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
            double m[2][2] = {{jtj[0][0] * (1.0 + lambda), jtj[0][1]},
                              {jtj[1][0], jtj[1][1] * (1.0 + lambda)}};
            double step[2] = {};
            if (np == 1) {
                step[0] = -jtr[0] / m[0][0];
            } else {
                const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                if (det == 0.0) {
                    lambda *= 10.0;
                    continue;
                }
                step[0] = (-jtr[0] * m[1][1] + jtr[1] * m[0][1]) / det;
                step[1] = (-jtr[1] * m[0][0] + jtr[0] * m[1][0]) / det;
            }
            double trial[2] = {theta[0] + step[0], fit_b ? theta[1] + step[1] : 0.0};
            auto rt = problem.residuals(trial);
            const double rss_t = detail::sum_sq(rt);
            if (rss_t <= rss) {
                const double move = std::max(std::abs(step[0]), np == 2 ? std::abs(step[1]) : 0.0);
                theta[0] = trial[0];
                theta[1] = trial[1];
                r = std::move(rt);
                rss = rss_t;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (move < 1e-10) converged = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (converged) break;
        if (!stepped) {
            // no downhill step found at any damping: already at the optimum
            converged = true;
            break;
        }
    }
    if (!converged) throw FitError("fit_f_laser: did not converge");

    // 1-sigma from the linearisation at the optimum
    problem.jacobian(theta, jcols);
    for (std::size_t a = 0; a < np; ++a)
        for (std::size_t b = 0; b < np; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) s += jcols[a][i] * jcols[b][i];
            jtj[a][b] = s;
        }
    const double dof = static_cast<double>(data.size()) - static_cast<double>(np);
    const double s2 = rss / std::max(dof, 1.0);
    double cov[2][2] = {};
    if (np == 1) {
        if (!(jtj[0][0] > 1e-24))
            throw DegeneracyError("fit_f_laser: ratio is insensitive to f_laser");
        cov[0][0] = s2 / jtj[0][0];
    } else {
        const double det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if (!(std::abs(det) > 1e-24 * jtj[0][0] * jtj[1][1]) || det <= 0.0)
            throw DegeneracyError("fit_f_laser: parameters are not identifiable");
        cov[0][0] = s2 * jtj[1][1] / det;
        cov[1][1] = s2 * jtj[0][0] / det;
    }

    FitResult out;
    out.f_laser = std::exp(theta[0]);
    out.b = fit_b ? std::exp(theta[1]) : params.b;
    out.b_fitted = fit_b;
    // d f / d ln f = f
    out.f_laser_sigma = out.f_laser * std::sqrt(cov[0][0]);
    out.b_sigma = fit_b ? out.b * std::sqrt(cov[1][1]) : 0.0;
    out.residual_norm = std::sqrt(rss);
    out.iterations = iter;
    return out;
}

} // namespace ofe
