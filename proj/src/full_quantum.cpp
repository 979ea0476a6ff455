#include "superrad/full_quantum.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <utility>
#include <numeric>
#include <sstream>

#include "krylov.hpp"
#include "sector.hpp"
#include "superrad/errors.hpp"

namespace superrad {

using detail::Block;
using detail::BlockLayout;
using detail::BlockMap;
using detail::ConstBlockMap;
using detail::LiouvillianCore;
using detail::VectorXc;

namespace {

constexpr double kStateTolerance = 1e-10;

std::vector<int> all_shifts(std::size_t n) {
    std::vector<int> shifts;
    for (int s = -static_cast<int>(n); s <= static_cast<int>(n); ++s) shifts.push_back(s);
    return shifts;
}

std::size_t hilbert_dim(std::size_t n) { return std::size_t{1} << n; }

void check_density_matrix(const DensityMatrix& rho, std::size_t emitters, const char* what) {
    if (rho.emitters != emitters || rho.dim() != hilbert_dim(emitters) || rho.data.cols() != rho.data.rows()) {
        throw InvalidInput(std::string(what) + ": density matrix dimension does not match the Liouvillian");
    }
    if (rho.trace_error() > kStateTolerance) {
        throw InvalidInput(std::string(what) + ": density matrix trace differs from 1");
    }
    if (rho.hermiticity_error() > kStateTolerance) {
        throw InvalidInput(std::string(what) + ": density matrix is not Hermitian");
    }
}

/// Shifts bra - ket for which rho has nonzero blocks.
std::vector<int> occupied_shifts(const detail::ExcitationBasis& basis, const Eigen::MatrixXcd& rho) {
    const std::size_t n = basis.emitters();
    std::vector<bool> used(2 * n + 1, false);
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(n));
    std::vector<int> weight(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) weight[static_cast<std::size_t>(i)] = std::popcount(static_cast<unsigned>(i));
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (rho(i, j) != cplx(0.0)) {
                used[static_cast<std::size_t>(weight[static_cast<std::size_t>(j)] - weight[static_cast<std::size_t>(i)] +
                                              static_cast<int>(n))] = true;
            }
        }
    }
    std::vector<int> shifts;
    for (std::size_t s = 0; s < used.size(); ++s) {
        if (used[s]) shifts.push_back(static_cast<int>(s) - static_cast<int>(n));
    }
    if (shifts.empty()) shifts.push_back(0);
    return shifts;
}

Eigen::MatrixXcd unpack_full(const detail::ExcitationBasis& basis, const BlockLayout& layout, const VectorXc& x) {
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(basis.emitters()));
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
    layout.unpack(basis, x, full);
    return full;
}

/// Dense lowering operator E = sum_n w_n s-_n on the full Hilbert space.
Eigen::MatrixXcd collective_lowering(std::size_t n, const Eigen::VectorXcd& w) {
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(n));
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t a = 0; a < n; ++a) {
        const Eigen::Index bit = Eigen::Index{1} << (n - 1 - a);
        for (Eigen::Index j = 0; j < dim; ++j) {
            if (j & bit) e(j ^ bit, j) += w(static_cast<Eigen::Index>(a));
        }
    }
    return e;
}

} // namespace

// ---------------------------------------------------------------------------

double DensityMatrix::trace_error() const { return std::abs(data.trace() - cplx(1.0)); }

double DensityMatrix::hermiticity_error() const {
    return data.rows() == 0 ? 0.0 : (data - data.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    const Eigen::MatrixXcd h = 0.5 * (data + data.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::ground(std::size_t emitters) {
    if (emitters == 0 || emitters > 20) throw InvalidInput("density matrix needs 1..20 emitters");
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(emitters));
    DensityMatrix rho{emitters, Eigen::MatrixXcd::Zero(dim, dim)};
    rho.data(0, 0) = 1.0;
    return rho;
}

DensityMatrix DensityMatrix::pure(std::size_t emitters, const Eigen::VectorXcd& psi) {
    if (emitters == 0 || emitters > 20 || static_cast<std::size_t>(psi.size()) != hilbert_dim(emitters)) {
        throw InvalidInput("state vector length must be 2^N");
    }
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-10) throw InvalidInput("state vector is not normalized");
    return DensityMatrix{emitters, psi * psi.adjoint()};
}

DensityMatrix DensityMatrix::product(const std::vector<double>& populations) {
    const std::size_t n = populations.size();
    if (n == 0 || n > 20) throw InvalidInput("density matrix needs 1..20 emitters");
    for (double p : populations) {
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("populations must lie in [0, 1]");
    }
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(n));
    DensityMatrix rho{n, Eigen::MatrixXcd::Zero(dim, dim)};
    for (Eigen::Index i = 0; i < dim; ++i) {
        double w = 1.0;
        for (std::size_t a = 0; a < n; ++a) {
            const bool excited = (i >> (n - 1 - a)) & 1;
            w *= excited ? populations[a] : 1.0 - populations[a];
        }
        rho.data(i, i) = w;
    }
    return rho;
}

std::size_t basis_index(const std::vector<int>& excited) {
    std::size_t index = 0;
    for (int s : excited) {
        if (s != 0 && s != 1) throw InvalidInput("basis labels must be 0 (ground) or 1 (excited)");
        index = (index << 1) | static_cast<std::size_t>(s);
    }
    return index;
}

// ---------------------------------------------------------------------------

Liouvillian::Liouvillian(const CouplingMatrices& c, const PumpPattern& p, std::size_t max_emitters) {
    if (c.size() != p.size()) {
        throw InvalidInput("coupling matrices describe " + std::to_string(c.size()) + " emitters but the pump has " +
                           std::to_string(p.size()));
    }
    if (c.size() > max_emitters) {
        throw CapacityError("exact engine is capped at " + std::to_string(max_emitters) + " emitters (got " +
                            std::to_string(c.size()) + "); use the cumulant engine for larger arrays");
    }
    core_ = std::make_shared<const LiouvillianCore>(c, p);
}

std::size_t Liouvillian::emitters() const noexcept { return core_->emitters(); }

std::size_t Liouvillian::dim() const noexcept { return hilbert_dim(core_->emitters()); }

DensityMatrix Liouvillian::apply(const DensityMatrix& rho) const {
    if (rho.dim() != dim()) throw InvalidInput("density matrix dimension does not match the Liouvillian");
    const auto& basis = core_->basis();
    const BlockLayout layout(basis, all_shifts(emitters()));
    const VectorXc x = layout.pack(basis, rho.data);
    VectorXc y;
    core_->apply(layout, x, y);
    return DensityMatrix{emitters(), unpack_full(basis, layout, y)};
}

Eigen::MatrixXcd Liouvillian::apply_adjoint(const Eigen::MatrixXcd& op) const {
    if (static_cast<std::size_t>(op.rows()) != dim() || op.rows() != op.cols()) {
        throw InvalidInput("operator dimension does not match the Liouvillian");
    }
    const auto& basis = core_->basis();
    const BlockLayout layout(basis, all_shifts(emitters()));
    const VectorXc x = layout.pack(basis, op);
    VectorXc y;
    core_->apply_adjoint(layout, x, y);
    return unpack_full(basis, layout, y);
}

Eigen::MatrixXcd Liouvillian::materialize() const {
    if (emitters() > 5) throw CapacityError("dense superoperator is only built for N <= 5");
    const auto d = static_cast<Eigen::Index>(dim());
    const auto& basis = core_->basis();
    const BlockLayout layout(basis, all_shifts(emitters()));
    Eigen::MatrixXcd out(d * d, d * d);
    Eigen::MatrixXcd unit = Eigen::MatrixXcd::Zero(d, d);
    VectorXc y;
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            unit(i, j) = 1.0;
            core_->apply(layout, layout.pack(basis, unit), y);
            const Eigen::MatrixXcd col = unpack_full(basis, layout, y);
            out.col(i + j * d) = col.reshaped();
            unit(i, j) = 0.0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<DensityMatrix> evolve(const Liouvillian& L, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                  const OdeOptions& opts) {
    check_density_matrix(rho0, L.emitters(), "evolve");
    if (t_grid.empty()) return {};
    if (t_grid.front() < 0.0) throw InvalidInput("evolve: time grid must start at or after 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= t_grid[i - 1])) throw InvalidInput("evolve: time grid must be ascending");
    }

    const auto& core = L.core();
    const auto& basis = core.basis();
    const BlockLayout layout(basis, occupied_shifts(basis, rho0.data));
    VectorXc x = layout.pack(basis, rho0.data);

    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());
    auto rhs = [&](double, const VectorXc& y, VectorXc& dy) { core.apply(layout, y, dy); };
    auto observe = [&](std::size_t, double t, const VectorXc& y) {
        DensityMatrix rho{L.emitters(), unpack_full(basis, layout, y)};
        if (rho.trace_error() > 1e-9 || rho.hermiticity_error() > 1e-9) {
            std::ostringstream msg;
            msg << "evolve: state lost trace or Hermiticity at t = " << t << " (trace error " << rho.trace_error()
                << ", Hermiticity error " << rho.hermiticity_error() << ")";
            throw IntegratorFailure(msg.str());
        }
        out.push_back(std::move(rho));
    };
    integrate_dopri5(rhs, x, 0.0, std::span<const double>(t_grid), opts, observe);
    return out;
}

double stationarity_residual(const Liouvillian& L, const DensityMatrix& rho) {
    const DensityMatrix d = L.apply(rho);
    return d.data.cwiseAbs().maxCoeff();
}

namespace {

/// Steady-state system on the zero-shift sector: blocks X_kk, k = 0..N, with
/// the (redundant) block-0 equation replaced by sum_k Tr X_kk = 1.
class SteadySystem {
public:
    explicit SteadySystem(const LiouvillianCore& core)
        : core_(core), layout_(core.basis(), {0}), sylvester_(core), n_(core.emitters()),
          neg_pump_(-core.pump_matrix()) {}

    const BlockLayout& layout() const { return layout_; }

    void apply(const VectorXc& x, VectorXc& y) const {
        core_.apply(layout_, x, y);
        y(0) = trace(x);
    }

    /// Symmetric block Gauss-Seidel sweep.
    void precondition(const VectorXc& r, VectorXc& z) const {
        const auto& blocks = layout_.blocks();
        VectorXc y = r;
        for (std::size_t k = 1; k <= n_; ++k) {
            const Block& b = blocks[k];
            BlockMap rhs = layout_.view(y, b);
            core_.add_raising_jump(b.ket, b.bra, neg_pump_, true, layout_.view(std::as_const(y), blocks[k - 1]), rhs);
            const Eigen::MatrixXcd c = rhs;
            sylvester_.solve(b.ket, b.bra, ConstBlockMap(c.data(), b.rows, b.cols), rhs);
        }
        z = y;
        Eigen::MatrixXcd up, corr;
        for (std::size_t k = n_; k-- > 1;) {
            const Block& b = blocks[k];
            up.setZero(b.rows, b.cols);
            corr.resize(b.rows, b.cols);
            BlockMap up_map(up.data(), b.rows, b.cols);
            BlockMap corr_map(corr.data(), b.rows, b.cols);
            core_.add_lowering_jump(b.ket, b.bra, core_.gamma(), false, layout_.view(std::as_const(z), blocks[k + 1]),
                                    up_map);
            sylvester_.solve(b.ket, b.bra, ConstBlockMap(up.data(), b.rows, b.cols), corr_map);
            layout_.view(z, b) -= corr;
        }
        for (std::size_t k = 1; k <= n_; ++k) z(0) -= layout_.view(std::as_const(z), blocks[k]).trace();
    }

    cplx trace(const VectorXc& x) const {
        cplx t = 0.0;
        for (const auto& b : layout_.blocks()) t += layout_.view(x, b).trace();
        return t;
    }

private:
    const LiouvillianCore& core_;
    BlockLayout layout_;
    detail::SylvesterSolver sylvester_;
    std::size_t n_;
    Eigen::MatrixXd neg_pump_;
};

} // namespace

DensityMatrix steady_state(const Liouvillian& L, const SteadyStateOptions& opts, SteadyStateInfo* info) {
    const auto& core = L.core();
    const std::size_t n = L.emitters();
    if (core.rates().maxCoeff() <= 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(core.gamma(), Eigen::EigenvaluesOnly);
        const double min_rate = es.eigenvalues().minCoeff();
        if (min_rate > 1e-8) {
            if (info) *info = SteadyStateInfo{0, 0.0};
            return DensityMatrix::ground(n);
        }
        std::ostringstream msg;
        msg << "steady state is not unique: no pump and the collective decay matrix has a dark mode (eigenvalue "
            << min_rate << "); evolve from the ground state instead";
        throw NonUniqueSteadyState(msg.str());
    }

    const SteadySystem system(core);
    const auto& basis = core.basis();
    const auto& layout = system.layout();

    std::vector<double> guess(n);
    for (std::size_t a = 0; a < n; ++a) {
        const double r = core.rates()(static_cast<Eigen::Index>(a));
        guess[a] = r / (r + core.gamma()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)));
    }
    VectorXc x = layout.pack(basis, DensityMatrix::product(guess).data);
    VectorXc b = VectorXc::Zero(layout.size());
    b(0) = 1.0;

    auto apply = [&](const VectorXc& in, VectorXc& out) { system.apply(in, out); };
    auto precondition = [&](const VectorXc& in, VectorXc& out) { system.precondition(in, out); };

    std::size_t iterations = 0;
    DensityMatrix rho;
    double residual = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < 4; ++attempt) {
        VectorXc r;
        system.apply(x, r);
        r = b - r;
        VectorXc dx = VectorXc::Zero(layout.size());
        const auto res = detail::fgmres(apply, precondition, r, dx, opts.tolerance, opts.restart,
                                        opts.max_iterations - std::min(iterations, opts.max_iterations));
        iterations += res.iterations;
        x += dx;
        if (!res.converged && res.relative_residual > 1e-6) {
            std::ostringstream msg;
            msg << "steady state: GMRES stalled after " << iterations << " iterations at relative residual "
                << res.relative_residual;
            throw SolverFailure(msg.str());
        }
        rho = DensityMatrix{n, unpack_full(basis, layout, x)};
        rho.data = 0.5 * (rho.data + rho.data.adjoint());
        rho.data /= rho.data.trace().real();
        residual = stationarity_residual(L, rho);
        if (residual < opts.residual_limit) break;
        x = layout.pack(basis, rho.data);
    }
    if (info) *info = SteadyStateInfo{iterations, residual};
    if (!(residual < opts.residual_limit)) {
        std::ostringstream msg;
        msg << "steady state: residual max|L[rho]| = " << residual << " exceeds " << opts.residual_limit;
        throw SolverFailure(msg.str());
    }
    return rho;
}

// ---------------------------------------------------------------------------

PairCorrelations pair_correlations(const DensityMatrix& rho) {
    const std::size_t n = rho.emitters;
    if (n == 0 || rho.dim() != hilbert_dim(n) || rho.data.cols() != rho.data.rows()) {
        throw InvalidInput("pair_correlations: density matrix shape does not match its emitter count");
    }
    const auto dim = static_cast<Eigen::Index>(rho.dim());
    const auto nn = static_cast<Eigen::Index>(n);
    PairCorrelations out{Eigen::VectorXd::Zero(nn), Eigen::MatrixXcd::Zero(nn, nn), Eigen::MatrixXd::Zero(nn, nn)};
    auto bit = [n](std::size_t a) { return Eigen::Index{1} << (n - 1 - a); };
    for (Eigen::Index j = 0; j < dim; ++j) {
        const double p = rho.data(j, j).real();
        for (std::size_t a = 0; a < n; ++a) {
            if (!(j & bit(a))) continue;
            out.populations(static_cast<Eigen::Index>(a)) += p;
            for (std::size_t b = 0; b < n; ++b) {
                if (j & bit(b)) out.joint(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += p;
            }
        }
    }
    // <s+_a s-_b> = sum_j rho(j, i) with i = s+_a s-_b j.
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            cplx acc = 0.0;
            for (Eigen::Index j = 0; j < dim; ++j) {
                if ((j & bit(b)) && !(j & bit(a))) acc += rho.data(j, j ^ bit(b) ^ bit(a));
            }
            out.coherences(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
        }
    }
    out.coherences.diagonal() = out.populations.cast<cplx>();
    return out;
}

namespace {

void check_correlation_inputs(const Liouvillian& L, const DensityMatrix& rho_ss, const std::vector<double>& tau_grid) {
    check_density_matrix(rho_ss, L.emitters(), "two_time_correlations");
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        if (tau_grid[i] < 0.0 || (i > 0 && !(tau_grid[i] >= tau_grid[i - 1]))) {
            throw InvalidInput("two_time_correlations: tau grid must be ascending and non-negative");
        }
    }
    if (const double res = stationarity_residual(L, rho_ss); res > 1e-6) {
        std::ostringstream msg;
        msg << "two_time_correlations: supplied state is not stationary (max|L[rho]| = " << res << ")";
        throw InvalidInput(msg.str());
    }
}

/// Propagates sum_m c_m s-_m rho_ss in the shift +1 sector and hands the
/// state at every tau to `observe(t, layout, y)`.
template <class Observer>
void propagate_lowered(const Liouvillian& L, const DensityMatrix& rho_ss, const Eigen::VectorXcd& c,
                       const std::vector<double>& tau_grid, const OdeOptions& opts, Observer&& observe) {
    const auto& core = L.core();
    const auto& basis = core.basis();
    const BlockLayout zero(basis, {0});
    const BlockLayout shifted(basis, {1});
    const VectorXc packed = zero.pack(basis, rho_ss.data);
    // Block (k-1, k) collects rows of rho_kk with emitter m lowered.
    VectorXc x = VectorXc::Zero(shifted.size());
    for (const auto& blk : shifted.blocks()) {
        BlockMap dst = shifted.view(x, blk);
        const ConstBlockMap src = zero.view(packed, zero.blocks()[static_cast<std::size_t>(blk.bra)]);
        for (Eigen::Index i = 0; i < src.rows(); ++i) {
            for (Eigen::Index m = 0; m < c.size(); ++m) {
                if (c(m) == 0.0) continue;
                const auto lo = basis.lowered(static_cast<std::size_t>(blk.bra), static_cast<std::size_t>(i),
                                              static_cast<std::size_t>(m));
                if (lo >= 0) dst.row(lo) += c(m) * src.row(i);
            }
        }
    }
    auto rhs = [&](double, const VectorXc& y, VectorXc& dy) { core.apply(shifted, y, dy); };
    auto obs = [&](std::size_t t, double, const VectorXc& y) { observe(t, shifted, y); };
    if (!tau_grid.empty()) integrate_dopri5(rhs, x, 0.0, std::span<const double>(tau_grid), opts, obs);
}

/// sum_a conj(d_a) Tr[s+_a Y] for a state Y in the shift +1 layout.
cplx raised_trace(const Liouvillian& L, const BlockLayout& layout, const VectorXc& y, const Eigen::VectorXcd& d) {
    const auto& basis = L.core().basis();
    cplx sum = 0.0;
    for (const auto& blk : layout.blocks()) {
        const ConstBlockMap v = layout.view(y, blk);
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            for (Eigen::Index a = 0; a < d.size(); ++a) {
                const auto up = basis.raised(static_cast<std::size_t>(blk.ket), static_cast<std::size_t>(i),
                                             static_cast<std::size_t>(a));
                if (up >= 0) sum += std::conj(d(a)) * v(i, up);
            }
        }
    }
    return sum;
}

} // namespace

CorrelationSeries two_time_correlations(const Liouvillian& L, const DensityMatrix& rho_ss,
                                        const std::vector<double>& tau_grid, const OdeOptions& opts) {
    check_correlation_inputs(L, rho_ss, tau_grid);
    const std::size_t n = L.emitters();
    const auto nn = static_cast<Eigen::Index>(n);
    CorrelationSeries out;
    out.tau = tau_grid;
    out.values.assign(tau_grid.size(), Eigen::MatrixXcd::Zero(nn, nn));
    for (Eigen::Index m = 0; m < nn; ++m) {
        const Eigen::VectorXcd unit_m = Eigen::VectorXcd::Unit(nn, m);
        propagate_lowered(L, rho_ss, unit_m, tau_grid, opts, [&](std::size_t t, const BlockLayout& layout, const VectorXc& y) {
            for (Eigen::Index a = 0; a < nn; ++a) {
                out.values[t](a, m) = raised_trace(L, layout, y, Eigen::VectorXcd::Unit(nn, a));
            }
        });
    }
    out.horizon_warning = horizon_too_short(out);
    return out;
}

std::vector<cplx> two_time_weighted(const Liouvillian& L, const DensityMatrix& rho_ss, const Eigen::VectorXcd& w,
                                    const std::vector<double>& tau_grid, const OdeOptions& opts) {
    check_correlation_inputs(L, rho_ss, tau_grid);
    if (static_cast<std::size_t>(w.size()) != L.emitters()) throw InvalidInput("two_time_weighted: weight length differs from N");
    std::vector<cplx> f(tau_grid.size());
    propagate_lowered(L, rho_ss, w, tau_grid, opts,
                      [&](std::size_t t, const BlockLayout& layout, const VectorXc& y) { f[t] = raised_trace(L, layout, y, w); });
    return f;
}

// ---------------------------------------------------------------------------

Vec3 Direction::unit() const {
    return Vec3(std::cos(phi) * std::sin(theta), std::sin(phi) * std::sin(theta), std::cos(theta));
}

Eigen::VectorXcd far_field_phases(const EmitterArray& array, const Direction& dir) {
    const Vec3 r_hat = dir.unit();
    Eigen::VectorXcd w(static_cast<Eigen::Index>(array.size()));
    for (std::size_t a = 0; a < array.size(); ++a) {
        w(static_cast<Eigen::Index>(a)) = std::exp(-kI * kWavenumber * r_hat.dot(array.position(a)));
    }
    return w;
}

double g2_zero(const DensityMatrix& rho, const EmitterArray& array, const Direction& dir, G2Ordering ordering) {
    const std::size_t n = rho.emitters;
    if (array.size() != n || rho.dim() != hilbert_dim(n)) {
        throw InvalidInput("g2_zero: density matrix and emitter array sizes differ");
    }
    if (n > 12) throw CapacityError("g2_zero: dense evaluation is limited to 12 emitters");
    const double transverse = 1.0 - std::pow(dir.unit().dot(array.dipole()), 2);
    if (transverse < 1e-12) throw UndefinedResult("g2_zero: no far field along the dipole axis");

    const Eigen::MatrixXcd lower = collective_lowering(n, far_field_phases(array, dir));
    const Eigen::MatrixXcd raise = lower.adjoint();
    // Tr[A B rho B^dagger A^dagger] with (A B) the annihilating side of the correlator.
    const Eigen::MatrixXcd& a = ordering == G2Ordering::FieldOperator ? raise : lower;
    const Eigen::MatrixXcd a_rho = a * rho.data;
    const double first = (a_rho * a.adjoint()).trace().real();
    const Eigen::MatrixXcd aa = a * a;
    const double second = (aa * rho.data * aa.adjoint()).trace().real();
    if (!(first > 1e-12)) throw UndefinedResult("g2_zero: vanishing field correlation in the requested direction");
    return second / (first * first);
}

} // namespace superrad
