#pragma once

#include <string>
#include <vector>

#include "superrad/correlations.hpp"
#include "superrad/coupling.hpp"
#include "superrad/geometry.hpp"
#include "superrad/ode.hpp"
#include "superrad/types.hpp"

namespace superrad {

/// Closed second-order moment set of the cumulant expansion.
struct CumulantState {
    Eigen::VectorXd ee;   ///< <s_ee_n>
    Eigen::MatrixXcd pm;  ///< <s+_n s-_m>, Hermitian, diagonal = ee
    Eigen::MatrixXd eeee; ///< <s_ee_n s_ee_m>, symmetric, diagonal = ee

    std::size_t size() const noexcept { return static_cast<std::size_t>(ee.size()); }

    /// All emitters in the ground state.
    static CumulantState ground(std::size_t emitters);

    /// Hard invariants (populations in [0,1] within 1e-6, pm Hermitian with
    /// diagonal ee). Throws InvalidInput naming the first violation.
    void validate() const;

    /// Soft truncation-quality diagnostics: joint populations outside
    /// [0, min(ee_n, ee_m)] by more than 0.05.
    std::vector<std::string> quality_warnings() const;
};

/// Time derivative of the second-order cumulant equations. The returned
/// state holds d/dt of every moment (pm derivative Hermitian by construction).
CumulantState cumulant_rhs(const CumulantState& s, const CouplingMatrices& c, const PumpPattern& p);

/// Largest modulus over all independent components of a derivative.
double max_abs(const CumulantState& d);

/// Integrator tolerances for trajectories: tight enough that integration
/// noise in the derivative stays below the stationarity threshold.
inline OdeOptions cumulant_ode_options() {
    OdeOptions o;
    o.rtol = 1e-11;
    o.atol = 1e-13;
    return o;
}

struct CumulantTrajectory {
    std::vector<double> t;
    std::vector<CumulantState> states;
    bool steady = false;      ///< max|rhs| < 1e-9 at the final output
    double final_rhs = 0.0;
};

CumulantTrajectory integrate_cumulant(const CumulantState& s0, const CouplingMatrices& c, const PumpPattern& p,
                                      const std::vector<double>& t_grid,
                                      const OdeOptions& opts = cumulant_ode_options());

struct CumulantSteadyOptions {
    double t_max = 200.0;        ///< integration horizon from the ground state
    double tolerance = 1e-9;     ///< max|rhs| accepted as stationary
    bool newton_polish = true;   ///< finish with Newton iterations when the packed size allows
    std::size_t newton_limit = 2500;
    OdeOptions ode{};
};

struct CumulantSteadyResult {
    CumulantState state;
    bool converged = false;
    double rhs_norm = 0.0;
    double time = 0.0;           ///< integration time used
    std::vector<std::string> warnings;
};

/// Stationary moments reached from the all-ground initial state. Returns the
/// best state with converged = false when the tolerance is not met.
CumulantSteadyResult cumulant_steady_state(const CouplingMatrices& c, const PumpPattern& p,
                                           const CumulantSteadyOptions& opts = {});

/// Linear generator M of dC_nm/dtau = sum_k M_nk C_km with coefficients
/// frozen at the stationary populations: M_nn = -(gamma_nn + R_n)/2,
/// M_nk = g_nk (1 - 2 ee_n).
Eigen::MatrixXcd regression_generator(const CumulantState& s_ss, const CouplingMatrices& c, const PumpPattern& p);

/// Regression model with initial condition C(0) = pm of the stationary state.
LinearCorrelationModel regression_model(const CumulantState& s_ss, const CouplingMatrices& c, const PumpPattern& p);

/// C_nm(tau) = <s+_n(tau) s-_m(0)> propagated column by column.
CorrelationSeries regression_correlations(const CumulantState& s_ss, const CouplingMatrices& c, const PumpPattern& p,
                                          const std::vector<double>& tau_grid);

} // namespace superrad
