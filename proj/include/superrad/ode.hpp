#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <utility>

#include "superrad/errors.hpp"

namespace superrad {

struct OdeOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double initial_step = 0.0; ///< 0 selects a step from the local derivative scale
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 50'000'000;
};

struct OdeStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
    double last_step = 0.0;
};

namespace detail {

template <class Vector>
double error_norm(const Vector& err, const Vector& y0, const Vector& y1, const OdeOptions& opt) {
    const auto scale = (opt.atol + opt.rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
    const double n = static_cast<double>(err.size());
    return n == 0 ? 0.0 : std::sqrt((err.cwiseAbs().array() / scale).square().sum() / n);
}

} // namespace detail

/// Dormand-Prince 5(4) with PI step control.
///
/// `rhs(t, y, dydt)` writes the derivative into `dydt`. `observe(i, t, y)` is
/// called once per entry of `outputs` (ascending, >= t0) with the state at that
/// time; steps are clipped so each output is hit exactly. On return `y` holds
/// the state at the last output. Throws IntegratorFailure when the step size
/// underflows or the step budget is exhausted.
template <class Vector, class Rhs, class Observer>
OdeStats integrate_dopri5(Rhs&& rhs, Vector& y, double t0, std::span<const double> outputs,
                          const OdeOptions& opt, Observer&& observe) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeStats stats;
    const auto n = y.size();
    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

    double t = t0;
    rhs(t, y, k1);
    ++stats.evaluations;

    double h = opt.initial_step;
    if (!(h > 0.0)) {
        const double d0 = detail::error_norm(y, y, y, opt);
        const double d1 = detail::error_norm(k1, y, y, opt);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        ytmp = y + h * k1;
        rhs(t + h, ytmp, k2);
        ++stats.evaluations;
        const double d2 = detail::error_norm((k2 - k1).eval(), y, y, opt) / h;
        const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h * 1e-3)
                                                    : std::pow(0.01 / std::max(d1, d2), 1.0 / 5);
        h = std::min(100.0 * h, h1);
    }
    h = std::min(h, opt.max_step);

    double err_prev = 1e-4;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        const double target = outputs[i];
        if (target < t) {
            throw IntegratorFailure("output times must be ascending and not before t0");
        }
        while (t < target) {
            if (stats.accepted + stats.rejected >= opt.max_steps) {
                std::ostringstream os;
                os << "step budget exhausted at t = " << t << " (h = " << h << ")";
                throw IntegratorFailure(os.str());
            }
            bool last = false;
            double hs = h;
            if (t + hs >= target || target - (t + hs) < 1e-12 * std::max(1.0, std::abs(target))) {
                hs = target - t;
                last = true;
            }
            ytmp = y + hs * (a21 * k1);
            rhs(t + c2 * hs, ytmp, k2);
            ytmp = y + hs * (a31 * k1 + a32 * k2);
            rhs(t + c3 * hs, ytmp, k3);
            ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs(t + c4 * hs, ytmp, k4);
            ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs(t + c5 * hs, ytmp, k5);
            ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(t + hs, ytmp, k6);
            ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            rhs(t + hs, ynew, k7);
            stats.evaluations += 6;
            err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double en = detail::error_norm(err, y, ynew, opt);

            if (!std::isfinite(en)) {
                ++stats.rejected;
                h = hs * 0.1;
            } else if (en <= 1.0) {
                t = last ? target : t + hs;
                y.swap(ynew);
                k1.swap(k7);
                ++stats.accepted;
                stats.last_step = hs;
                // PI controller (Hairer & Wanner, beta = 0.04).
                double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.17) * std::pow(err_prev, 0.04);
                fac = std::clamp(fac, 0.2, 10.0);
                err_prev = std::max(en, 1e-4);
                if (!last || hs >= h) h = std::min(hs * fac, opt.max_step);
            } else {
                ++stats.rejected;
                h = hs * std::max(0.2, 0.9 * std::pow(en, -0.2));
            }
            if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                std::ostringstream os;
                os << "step size underflow at t = " << t;
                throw IntegratorFailure(os.str());
            }
        }
        observe(i, t, std::as_const(y));
    }
    return stats;
}

} // namespace superrad
