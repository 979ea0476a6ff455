#include "superrad/cumulant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "superrad/errors.hpp"

namespace superrad {

namespace {

void check_sizes(const CumulantState& s, const CouplingMatrices& c, const PumpPattern& p) {
    const auto n = static_cast<Eigen::Index>(s.size());
    if (c.size() != s.size() || p.size() != s.size() || s.pm.rows() != n || s.pm.cols() != n || s.eeee.rows() != n ||
        s.eeee.cols() != n) {
        throw InvalidInput("cumulant state, couplings and pump describe different emitter counts");
    }
}

Eigen::VectorXd rates_of(const PumpPattern& p) {
    return Eigen::Map<const Eigen::VectorXd>(p.rates().data(), static_cast<Eigen::Index>(p.size()));
}

/// Packed real layout: ee (N), Re/Im pm_nm for n < m, eeee_nm for n < m.
struct Packing {
    Eigen::Index n;

    Eigen::Index pairs() const { return n * (n - 1) / 2; }
    Eigen::Index size() const { return n + 3 * pairs(); }

    Eigen::VectorXd pack(const CumulantState& s) const {
        Eigen::VectorXd x(size());
        x.head(n) = s.ee;
        Eigen::Index k = 0;
        const Eigen::Index off_pm = n, off_ee = n + 2 * pairs();
        for (Eigen::Index a = 0; a < n; ++a) {
            for (Eigen::Index b = a + 1; b < n; ++b, ++k) {
                x(off_pm + 2 * k) = s.pm(a, b).real();
                x(off_pm + 2 * k + 1) = s.pm(a, b).imag();
                x(off_ee + k) = s.eeee(a, b);
            }
        }
        return x;
    }

    CumulantState unpack(const Eigen::VectorXd& x) const {
        CumulantState s;
        s.ee = x.head(n);
        s.pm = Eigen::MatrixXcd::Zero(n, n);
        s.eeee = Eigen::MatrixXd::Zero(n, n);
        Eigen::Index k = 0;
        const Eigen::Index off_pm = n, off_ee = n + 2 * pairs();
        for (Eigen::Index a = 0; a < n; ++a) {
            for (Eigen::Index b = a + 1; b < n; ++b, ++k) {
                const cplx v(x(off_pm + 2 * k), x(off_pm + 2 * k + 1));
                s.pm(a, b) = v;
                s.pm(b, a) = std::conj(v);
                s.eeee(a, b) = s.eeee(b, a) = x(off_ee + k);
            }
        }
        s.pm.diagonal() = s.ee.cast<cplx>();
        s.eeee.diagonal() = s.ee;
        return s;
    }
};

} // namespace

CumulantState CumulantState::ground(std::size_t emitters) {
    if (emitters == 0) throw InvalidInput("cumulant state needs at least one emitter");
    const auto n = static_cast<Eigen::Index>(emitters);
    return CumulantState{Eigen::VectorXd::Zero(n), Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
}

void CumulantState::validate() const {
    const auto n = ee.size();
    if (n == 0 || pm.rows() != n || pm.cols() != n || eeee.rows() != n || eeee.cols() != n) {
        throw InvalidInput("cumulant state blocks have inconsistent shapes");
    }
    for (Eigen::Index a = 0; a < n; ++a) {
        if (!(ee(a) >= -1e-6 && ee(a) <= 1.0 + 1e-6)) {
            std::ostringstream msg;
            msg << "cumulant state: population of emitter " << a << " is " << ee(a) << ", outside [0, 1]";
            throw InvalidInput(msg.str());
        }
    }
    const double scale = std::max(1.0, pm.cwiseAbs().maxCoeff());
    if ((pm - pm.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw InvalidInput("cumulant state: coherence matrix is not Hermitian");
    }
    if ((pm.diagonal().real() - ee).cwiseAbs().maxCoeff() > 1e-10 || pm.diagonal().imag().cwiseAbs().maxCoeff() > 1e-10) {
        throw InvalidInput("cumulant state: coherence diagonal differs from populations");
    }
}

std::vector<std::string> CumulantState::quality_warnings() const {
    std::vector<std::string> out;
    const auto n = ee.size();
    double worst = 0.0;
    Eigen::Index wa = 0, wb = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const double hi = eeee(a, b) - std::min(ee(a), ee(b));
            const double lo = -eeee(a, b);
            const double v = std::max(hi, lo);
            if (v > worst) {
                worst = v;
                wa = a;
                wb = b;
            }
        }
    }
    if (worst > 0.05) {
        std::ostringstream msg;
        msg << "truncation quality: joint population (" << wa << "," << wb << ") = " << eeee(wa, wb)
            << " lies outside [0, min(ee)] by " << worst;
        out.push_back(msg.str());
    }
    return out;
}

CumulantState cumulant_rhs(const CumulantState& s, const CouplingMatrices& c, const PumpPattern& p) {
    check_sizes(s, c, p);
    const auto n = static_cast<Eigen::Index>(s.size());
    const Eigen::VectorXd r = rates_of(p);
    const Eigen::VectorXd self = c.gamma.diagonal();

    Eigen::MatrixXcd gt = c.g;
    gt.diagonal().setZero();
    const Eigen::MatrixXcd q = gt * s.pm;               // q_nm = sum_k g_nk pm_km
    const Eigen::MatrixXcd a = s.pm * gt.conjugate();   // a_nm = sum_k pm_nk g*_km

    CumulantState d;
    d.ee.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d.ee(i) = -(self(i) + r(i)) * s.ee(i) + r(i) + 2.0 * q(i, i).real();
    }

    d.pm = Eigen::MatrixXcd::Zero(n, n);
    d.eeee = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const cplx g_ij = c.g(i, j);
            const cplx g_ji = c.g(j, i);
            const double zi = 2.0 * s.ee(i) - 1.0;
            const double zj = 2.0 * s.ee(j) - 1.0;
            // Sums over k outside {i, j}.
            const cplx left = a(i, j) - s.ee(i) * std::conj(g_ij);
            const cplx right = q(i, j) - g_ji * s.ee(j);
            const cplx dpm = -(0.5 * (self(i) + self(j)) + 0.5 * (r(i) + r(j))) * s.pm(i, j) +
                             2.0 * c.gamma(i, j) * s.eeee(i, j) + g_ij * s.ee(j) + std::conj(g_ij) * s.ee(i) -
                             (left * zj + right * zi);
            d.pm(i, j) = dpm;
            d.pm(j, i) = std::conj(dpm);

            const cplx src = s.ee(i) * (q(j, j) - gt(i, j) * s.pm(i, j)) + s.ee(j) * (q(i, i) - gt(j, i) * s.pm(j, i));
            const double dee2 = -(self(i) + self(j) + r(i) + r(j)) * s.eeee(i, j) + r(i) * s.ee(j) +
                                r(j) * s.ee(i) + 2.0 * src.real();
            d.eeee(i, j) = d.eeee(j, i) = dee2;
        }
    }
    d.pm.diagonal() = d.ee.cast<cplx>();
    d.eeee.diagonal() = d.ee;
    return d;
}

double max_abs(const CumulantState& d) {
    double m = d.ee.cwiseAbs().maxCoeff();
    const auto n = d.ee.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            m = std::max({m, std::abs(d.pm(i, j)), std::abs(d.eeee(i, j))});
        }
    }
    return m;
}

namespace {

struct PackedRhs {
    const CouplingMatrices& c;
    const PumpPattern& p;
    Packing layout;

    void operator()(double, const Eigen::VectorXd& x, Eigen::VectorXd& dx) const {
        dx = layout.pack(cumulant_rhs(layout.unpack(x), c, p));
    }
};

} // namespace

CumulantTrajectory integrate_cumulant(const CumulantState& s0, const CouplingMatrices& c, const PumpPattern& p,
                                      const std::vector<double>& t_grid, const OdeOptions& opts) {
    s0.validate();
    check_sizes(s0, c, p);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 0.0 || (i > 0 && !(t_grid[i] >= t_grid[i - 1]))) {
            throw InvalidInput("integrate_cumulant: time grid must be ascending and non-negative");
        }
    }
    const Packing layout{static_cast<Eigen::Index>(s0.size())};
    const PackedRhs rhs{c, p, layout};
    Eigen::VectorXd x = layout.pack(s0);
    CumulantTrajectory out;
    out.t = t_grid;
    out.states.reserve(t_grid.size());
    auto observe = [&](std::size_t, double, const Eigen::VectorXd& y) { out.states.push_back(layout.unpack(y)); };
    if (!t_grid.empty()) integrate_dopri5(rhs, x, 0.0, std::span<const double>(t_grid), opts, observe);
    const CumulantState& last = out.states.empty() ? s0 : out.states.back();
    out.final_rhs = max_abs(cumulant_rhs(last, c, p));
    out.steady = out.final_rhs < 1e-9;
    return out;
}

namespace {

/// Newton iterations on the packed system with a forward-difference Jacobian.
/// Accepts a step only if it lowers the residual.
bool newton_polish(const PackedRhs& rhs, Eigen::VectorXd& x, double tolerance) {
    Eigen::VectorXd f;
    rhs(0.0, x, f);
    double norm = f.cwiseAbs().maxCoeff();
    const Eigen::Index n = x.size();
    for (int iter = 0; iter < 8 && norm >= tolerance; ++iter) {
        Eigen::MatrixXd jac(n, n);
        Eigen::VectorXd xp = x, fp;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double h = 1e-7 * std::max(1.0, std::abs(x(k)));
            xp(k) = x(k) + h;
            rhs(0.0, xp, fp);
            jac.col(k) = (fp - f) / h;
            xp(k) = x(k);
        }
        const Eigen::VectorXd step = jac.partialPivLu().solve(-f);
        if (!step.allFinite()) return false;
        Eigen::VectorXd trial = x + step;
        Eigen::VectorXd ft;
        rhs(0.0, trial, ft);
        const double tnorm = ft.cwiseAbs().maxCoeff();
        if (!(tnorm < norm)) return false;
        x = trial;
        f = ft;
        norm = tnorm;
    }
    return norm < tolerance;
}

} // namespace

CumulantSteadyResult cumulant_steady_state(const CouplingMatrices& c, const PumpPattern& p,
                                           const CumulantSteadyOptions& opts) {
    const std::size_t n = c.size();
    if (p.size() != n) throw InvalidInput("cumulant steady state: pump and couplings differ in size");
    const Packing layout{static_cast<Eigen::Index>(n)};
    const PackedRhs rhs{c, p, layout};
    Eigen::VectorXd x = layout.pack(CumulantState::ground(n));

    CumulantSteadyResult out;
    double t = 0.0;
    double chunk = 1.0;
    Eigen::VectorXd f;
    rhs(0.0, x, f);
    double norm = f.cwiseAbs().maxCoeff();
    while (norm >= opts.tolerance && t < opts.t_max) {
        const double t_next = std::min(opts.t_max, t + chunk);
        const double span[] = {t_next - t};
        integrate_dopri5(rhs, x, 0.0, std::span<const double>(span), opts.ode, [](std::size_t, double, const auto&) {});
        t = t_next;
        chunk *= 1.5;
        rhs(0.0, x, f);
        norm = f.cwiseAbs().maxCoeff();
        // Hand over to Newton once the transient has settled.
        if (opts.newton_polish && layout.size() <= static_cast<Eigen::Index>(opts.newton_limit) && norm < 1e-4) {
            Eigen::VectorXd trial = x;
            if (newton_polish(rhs, trial, opts.tolerance)) {
                const CumulantState candidate = layout.unpack(trial);
                bool physical = true;
                try {
                    candidate.validate();
                } catch (const InvalidInput&) {
                    physical = false;
                }
                if (physical) {
                    x = trial;
                    rhs(0.0, x, f);
                    norm = f.cwiseAbs().maxCoeff();
                }
            }
        }
    }
    out.state = layout.unpack(x);
    out.time = t;
    out.rhs_norm = norm;
    out.converged = norm < opts.tolerance;
    if (!out.converged) {
        std::ostringstream msg;
        msg << "cumulant steady state not reached: max|rhs| = " << norm << " at t = " << t;
        out.warnings.push_back(msg.str());
    }
    try {
        out.state.validate();
    } catch (const InvalidInput& e) {
        out.warnings.push_back(e.what());
    }
    for (auto& w : out.state.quality_warnings()) out.warnings.push_back(std::move(w));
    return out;
}

Eigen::MatrixXcd regression_generator(const CumulantState& s_ss, const CouplingMatrices& c, const PumpPattern& p) {
    check_sizes(s_ss, c, p);
    const auto n = static_cast<Eigen::Index>(s_ss.size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            m(i, k) = i == k ? cplx(-0.5 * (c.gamma(i, i) + p.rate(static_cast<std::size_t>(i))))
                             : c.g(i, k) * (1.0 - 2.0 * s_ss.ee(i));
        }
    }
    return m;
}

LinearCorrelationModel regression_model(const CumulantState& s_ss, const CouplingMatrices& c, const PumpPattern& p) {
    return LinearCorrelationModel{regression_generator(s_ss, c, p), s_ss.pm};
}

CorrelationSeries regression_correlations(const CumulantState& s_ss, const CouplingMatrices& c, const PumpPattern& p,
                                          const std::vector<double>& tau_grid) {
    return regression_model(s_ss, c, p).sample(tau_grid);
}

} // namespace superrad
