#pragma once

#include <memory>
#include <vector>

#include "superrad/correlations.hpp"
#include "superrad/coupling.hpp"
#include "superrad/geometry.hpp"
#include "superrad/ode.hpp"
#include "superrad/types.hpp"

namespace superrad {

namespace detail {
class LiouvillianCore;
}

inline constexpr std::size_t kDefaultExactCap = 10;

/// Density matrix over the 2^N emitter Hilbert space. Basis index
/// i = sum_n s_n 2^(N-1-n) with s_n = 1 when emitter n is excited.
struct DensityMatrix {
    std::size_t emitters = 0;
    Eigen::MatrixXcd data;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(data.rows()); }
    double trace_error() const;
    double hermiticity_error() const;
    double min_eigenvalue() const;

    /// All emitters in |g>.
    static DensityMatrix ground(std::size_t emitters);
    /// |psi><psi| for a normalized state vector of length 2^N.
    static DensityMatrix pure(std::size_t emitters, const Eigen::VectorXcd& psi);
    /// Uncorrelated diagonal product state with the given excited populations.
    static DensityMatrix product(const std::vector<double>& populations);
};

/// Index of a computational basis state given per-emitter excitations.
std::size_t basis_index(const std::vector<int>& excited);

/// Generator of the master equation
///   d rho / dt = -i[H, rho] + L_decay[rho] + L_pump[rho].
/// Stored block-wise over excitation manifolds and applied matrix-free.
class Liouvillian {
public:
    /// Throws CapacityError when N exceeds `max_emitters`, InvalidInput on a
    /// size mismatch between couplings and pump.
    Liouvillian(const CouplingMatrices& c, const PumpPattern& p, std::size_t max_emitters = kDefaultExactCap);

    std::size_t emitters() const noexcept;
    std::size_t dim() const noexcept;

    DensityMatrix apply(const DensityMatrix& rho) const;
    /// Heisenberg-picture action L^dagger[O].
    Eigen::MatrixXcd apply_adjoint(const Eigen::MatrixXcd& op) const;
    /// Dense superoperator acting on column-stacked rho (N <= 5 only).
    Eigen::MatrixXcd materialize() const;

    const detail::LiouvillianCore& core() const noexcept { return *core_; }

private:
    std::shared_ptr<const detail::LiouvillianCore> core_;
};

std::vector<DensityMatrix> evolve(const Liouvillian& L, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                  const OdeOptions& opts = {});

struct SteadyStateOptions {
    double tolerance = 1e-13;       ///< relative residual of the Krylov solve
    double residual_limit = 1e-10;  ///< max |L[rho]| accepted
    std::size_t restart = 80;
    std::size_t max_iterations = 20000;
};

struct SteadyStateInfo {
    std::size_t iterations = 0;
    double residual = 0.0; ///< max |L[rho_ss]|
};

/// Unique stationary state. Uses preconditioned GMRES on the zero-coherence
/// excitation sector with the trace condition replacing one redundant
/// equation. Throws NonUniqueSteadyState when nothing is pumped and the
/// collective decay matrix has a dark direction; SolverFailure otherwise.
DensityMatrix steady_state(const Liouvillian& L, const SteadyStateOptions& opts = {}, SteadyStateInfo* info = nullptr);

/// Maximum modulus of L[rho].
double stationarity_residual(const Liouvillian& L, const DensityMatrix& rho);

struct PairCorrelations {
    Eigen::VectorXd populations;  ///< <s_ee_n>
    Eigen::MatrixXcd coherences;  ///< <s+_n s-_m>, diagonal = populations
    Eigen::MatrixXd joint;        ///< <s_ee_n s_ee_m>, diagonal = populations
};

PairCorrelations pair_correlations(const DensityMatrix& rho);

/// C_nm(tau) = <s+_n(tau) s-_m(0)> via the regression theorem: s-_m rho_ss is
/// propagated under L and traced against s+_n.
CorrelationSeries two_time_correlations(const Liouvillian& L, const DensityMatrix& rho_ss,
                                        const std::vector<double>& tau_grid, const OdeOptions& opts = {});

/// f(tau) = sum_nm conj(w_n) w_m C_nm(tau) from a single propagation of
/// sum_m w_m s-_m rho_ss; equals CorrelationSeries::weighted(w) at N times
/// lower cost.
std::vector<cplx> two_time_weighted(const Liouvillian& L, const DensityMatrix& rho_ss, const Eigen::VectorXcd& w,
                                    const std::vector<double>& tau_grid, const OdeOptions& opts = {});

struct Direction {
    double phi = 0.0;
    double theta = kPi / 2;

    /// (cos phi sin theta, sin phi sin theta, cos theta)
    Vec3 unit() const;
};

/// Far-field phase factors e^{-i k0 R.r_n} of the emitters for direction R.
Eigen::VectorXcd far_field_phases(const EmitterArray& array, const Direction& dir);

/// Operator ordering of the zero-delay correlation.
enum class G2Ordering {
    /// E+ = sum_n w_n s-_n inserted literally into <E+ E+ E- E->/<E+ E->^2.
    FieldOperator,
    /// Photodetection order <E- E- E+ E+>/<E- E+>^2 with E+ = sum_n w_n s-_n.
    Photodetection,
};

/// Zero-delay g2 of the far-field mode in `dir`. Throws UndefinedResult when
/// the denominator vanishes (for instance along the dipole axis).
double g2_zero(const DensityMatrix& rho, const EmitterArray& array, const Direction& dir,
               G2Ordering ordering = G2Ordering::FieldOperator);

} // namespace superrad
