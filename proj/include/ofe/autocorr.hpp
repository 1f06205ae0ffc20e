#pragma once

// Interferometric autocorrelation: integrated emission versus the delay
// between two replica pulses. Three detectors share one trace assembly:
//
//   iac_trace_surrogate  quasi-static tunneling current of the instantaneous
//                        total field, rectified to the barrier-lowering sign
//   iac_trace_power      ideal order-n intensity detector; reference contrasts
//                        8:1 (n = 2) and 32:1 (n = 3)
//   iac_trace_tdse       one wavefunction propagation per delay
//
// Delay inputs are atomic units; the assembled trace stores delays in fs for
// export. The plateau past 5 tau defines the baseline, and the peak is the
// fringe top, with a one-carrier-period moving average reported alongside it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "ofe/emission.hpp"
#include "ofe/errors.hpp"
#include "ofe/field.hpp"
#include "ofe/fn_model.hpp"
#include "ofe/potential.hpp"
#include "ofe/schrodinger.hpp"
#include "ofe/units.hpp"

namespace ofe {

struct IACTrace {
    std::vector<double> delays;   // fs
    std::vector<double> currents; // background-subtracted signal per delay
    double baseline = 0.0;
    double peak_to_baseline = 0.0;
    double peak_to_baseline_envelope = 0.0;
};

// Fringe-resolving step of T/16 out to 4 tau, then 2 fs out to `end`
// (default: past the 5 tau plateau). Starts exactly at zero delay.
inline std::vector<double> make_default_delays(const LaserPulse& p, double end = 0.0) {
    const double fine_step = p.carrier_period() / 16.0;
    const double coarse_step = units::fs_to_au(2.0);
    const double fine_end = 4.0 * p.tau;
    if (end <= 0.0) end = 5.0 * p.tau + units::fs_to_au(6.0);
    if (end <= 5.0 * p.tau + coarse_step)
        throw ConfigError("make_default_delays: end must lie past the 5 tau plateau");
    std::vector<double> d;
    double t = 0.0;
    for (; t < fine_end; t += fine_step) d.push_back(t);
    for (; t < end; t += coarse_step) d.push_back(t);
    if (end - d.back() < 0.25 * coarse_step)
        d.back() = end;
    else
        d.push_back(end);
    return d;
}

namespace detail {

inline void validate_delays(const std::vector<double>& d, double tau, double period) {
    if (d.size() < 4) throw ConfigError("delay grid needs at least 4 samples");
    for (std::size_t i = 1; i < d.size(); ++i)
        if (!(d[i] > d[i - 1])) throw ConfigError("delays must be strictly increasing");
    if (d.front() > 1e-12) throw ConfigError("delay grid must start at or below zero");
    if (d.back() < 5.0 * tau) throw ConfigError("delay grid must extend past 5 tau");
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (std::abs(d[i]) < 4.0 * tau && std::abs(d[i - 1]) < 4.0 * tau &&
            d[i] - d[i - 1] > period / 8.0)
            throw SamplingError("delay spacing too coarse to resolve carrier fringes");
    }
}

// mean of the piecewise-linear trace over [lo, hi]; the window must lie
// inside the sampled range
inline double windowed_mean(const std::vector<double>& x, const std::vector<double>& y, double lo,
                            double hi) {
    const auto at = [&](std::size_t j, double t) {
        const double w = (t - x[j]) / (x[j + 1] - x[j]);
        return y[j] + w * (y[j + 1] - y[j]);
    };
    std::size_t j = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), lo) - x.begin());
    if (j > 0) --j;
    double acc = 0.0;
    double t_prev = lo;
    double v_prev = at(j, lo);
    while (x[j + 1] < hi) {
        acc += 0.5 * (v_prev + y[j + 1]) * (x[j + 1] - t_prev);
        t_prev = x[j + 1];
        v_prev = y[j + 1];
        ++j;
    }
    acc += 0.5 * (v_prev + at(j, hi)) * (hi - t_prev);
    return acc / (hi - lo);
}

inline IACTrace assemble_trace(const std::vector<double>& delays_au, std::vector<double> currents,
                               double tau, double period, double plateau_tolerance = 0.02) {
    double sum = 0.0;
    double lo = 0.0, hi = 0.0;
    std::size_t n_plateau = 0;
    for (std::size_t i = 0; i < delays_au.size(); ++i) {
        if (delays_au[i] <= 5.0 * tau) continue;
        if (n_plateau == 0) lo = hi = currents[i];
        lo = std::min(lo, currents[i]);
        hi = std::max(hi, currents[i]);
        sum += currents[i];
        ++n_plateau;
    }
    if (n_plateau < 2) throw ConfigError("delay grid has too few plateau samples past 5 tau");
    const double baseline = sum / n_plateau;
    if (!(baseline > 0.0)) throw ConfigError("plateau signal vanishes; contrast is undefined");
    if ((hi - lo) / baseline >= plateau_tolerance)
        throw SamplingError("baseline plateau spread exceeds tolerance; extend the delay range");

    const double peak = *std::max_element(currents.begin(), currents.end());

    // the trace is even in delay: mirror the non-negative branch so the
    // averaging window can straddle zero, where the envelope peaks
    std::vector<double> mx, my;
    mx.reserve(2 * delays_au.size());
    my.reserve(2 * delays_au.size());
    const std::size_t k0 = static_cast<std::size_t>(
        std::lower_bound(delays_au.begin(), delays_au.end(), 0.0) - delays_au.begin());
    for (std::size_t i = delays_au.size(); i-- > k0;) {
        if (delays_au[i] > 0.0) {
            mx.push_back(-delays_au[i]);
            my.push_back(currents[i]);
        }
    }
    for (std::size_t i = k0; i < delays_au.size(); ++i) {
        mx.push_back(delays_au[i]);
        my.push_back(currents[i]);
    }

    double env_peak = peak;
    bool have_window = false;
    for (std::size_t i = k0; i < delays_au.size(); ++i) {
        const double a = delays_au[i] - 0.5 * period;
        const double b = delays_au[i] + 0.5 * period;
        if (a < mx.front() || b > mx.back()) continue;
        const double m = windowed_mean(mx, my, a, b);
        env_peak = have_window ? std::max(env_peak, m) : m;
        have_window = true;
    }

    IACTrace out;
    out.delays.reserve(delays_au.size());
    for (double d : delays_au) out.delays.push_back(units::au_to_fs(d));
    out.currents = std::move(currents);
    out.baseline = baseline;
    out.peak_to_baseline = peak / baseline;
    out.peak_to_baseline_envelope = env_peak / baseline;
    return out;
}

// Time integral of the tunneling current for one field configuration, with
// the static-bias contribution removed. Emission draws only on the
// barrier-lowering field sign; the current is convex in the field, so the
// subtracted integral stays non-negative.
inline double rectified_fn_integral(const FieldConfiguration& cfg, const FNParams& p,
                                    bool forward_positive, double dt) {
    const double a = cfg.window_begin();
    const double b = cfg.window_end();
    if (!(b > a)) return 0.0;
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / dt - 1e-12));
    const double h = (b - a) / static_cast<double>(n);
    const double sign = forward_positive ? 1.0 : -1.0;
    const double f_bg = sign * cfg.f_dc;
    const double j_bg = f_bg > 0.0 ? fn_current(p, units::au_to_gvm(f_bg)) : 0.0;
    const auto j = [&](double t) {
        const double f = sign * cfg.total_field(t);
        return (f > 0.0 ? fn_current(p, units::au_to_gvm(f)) : 0.0) - j_bg;
    };
    double acc = 0.5 * (j(a) + j(b));
    for (std::size_t i = 1; i < n; ++i) acc += j(a + static_cast<double>(i) * h);
    return acc * h;
}

inline double power_detector_integral(const FieldConfiguration& cfg, int order, double dt) {
    const double a = cfg.window_begin();
    const double b = cfg.window_end();
    if (!(b > a)) return 0.0;
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / dt - 1e-12));
    const double h = (b - a) / static_cast<double>(n);
    const auto j = [&](double t) {
        const double f = cfg.total_field(t);
        return std::pow(f * f, order);
    };
    double acc = 0.5 * (j(a) + j(b));
    for (std::size_t i = 1; i < n; ++i) acc += j(a + static_cast<double>(i) * h);
    return acc * h;
}

} // namespace detail

inline IACTrace iac_trace_surrogate(const LaserPulse& p, double f_dc, const FNParams& fnp,
                                    const std::vector<double>& delays,
                                    bool forward_positive = true, double dt = 0.0) {
    detail::validate_delays(delays, p.tau, p.carrier_period());
    if (dt <= 0.0) dt = p.carrier_period() / 64.0;
    std::vector<double> cur(delays.size());
    for (std::size_t i = 0; i < delays.size(); ++i)
        cur[i] = detail::rectified_fn_integral(delayed_pair(p, delays[i], f_dc), fnp,
                                               forward_positive, dt);
    return detail::assemble_trace(delays, std::move(cur), p.tau, p.carrier_period());
}

inline IACTrace iac_trace_power(const LaserPulse& p, int order,
                                const std::vector<double>& delays, double dt = 0.0) {
    if (order < 1) throw ConfigError("detector order must be at least 1");
    detail::validate_delays(delays, p.tau, p.carrier_period());
    if (dt <= 0.0) dt = p.carrier_period() / (32.0 * order);
    std::vector<double> cur(delays.size());
    for (std::size_t i = 0; i < delays.size(); ++i)
        cur[i] = detail::power_detector_integral(delayed_pair(p, delays[i], 0.0), order, dt);
    return detail::assemble_trace(delays, std::move(cur), p.tau, p.carrier_period());
}

// One propagation per delay. The static-bias leakage is probed once over the
// longest window; per-delay subtraction runs only when that probe is visible
// against the weakest pair signal. The first pulse can leave bound-state
// coherence that rides on the plateau for tens of fs, so the flatness gate
// is adjustable here; the analytic detectors keep the strict default.
inline IACTrace iac_trace_tdse(const MetalModel& m, const GridSpec& g, const LaserPulse& p,
                               double f_dc, const std::vector<double>& delays,
                               double enhancement = 1.0, const SolverParams& sp = {},
                               double plateau_tolerance = 0.02) {
    detail::validate_delays(delays, p.tau, p.carrier_period());
    validate_grid(g, m, true);
    const auto gs = ground_state(m, g, sp);

    std::vector<double> cur(delays.size());
    for (std::size_t i = 0; i < delays.size(); ++i) {
        const auto cfg = delayed_pair(p, delays[i], f_dc, enhancement);
        cur[i] = integrate_yield(emission_trace(m, g, cfg, gs.state, sp));
    }

    if (f_dc != 0.0) {
        const FieldConfiguration probe_cfg(f_dc, enhancement, {});
        std::size_t i_widest = 0;
        double span_widest = 0.0;
        std::vector<std::pair<double, double>> windows(delays.size());
        for (std::size_t i = 0; i < delays.size(); ++i) {
            windows[i] = propagation_window(delayed_pair(p, delays[i], f_dc, enhancement), sp);
            const double span = windows[i].second - windows[i].first;
            if (span > span_widest) {
                span_widest = span;
                i_widest = i;
            }
        }
        const double bg_widest =
            integrate_yield(propagate(gs.state, m, probe_cfg, g, windows[i_widest].first,
                                      windows[i_widest].second, sp)
                                .trace);
        const double cur_min = *std::min_element(cur.begin(), cur.end());
        if (bg_widest > 1e-6 * cur_min) {
            for (std::size_t i = 0; i < delays.size(); ++i)
                cur[i] -= integrate_yield(
                    propagate(gs.state, m, probe_cfg, g, windows[i].first, windows[i].second, sp)
                        .trace);
        }
    }

    return detail::assemble_trace(delays, std::move(cur), p.tau, p.carrier_period(),
                                  plateau_tolerance);
}

} // namespace ofe
