#pragma once

#include <vector>

#include "superrad/types.hpp"

namespace superrad {

/// Sampled two-time correlations C_nm(tau) = <s+_n(tau) s-_m(0)> in the
/// stationary state.
struct CorrelationSeries {
    std::vector<double> tau;
    std::vector<Eigen::MatrixXcd> values; ///< values[t](n, m)
    bool horizon_warning = false; ///< |C(tau_max)| > 1e-3 |C(0)|

    std::size_t emitters() const { return values.empty() ? 0 : static_cast<std::size_t>(values.front().rows()); }

    /// f(tau_t) = sum_nm conj(w_n) w_m C_nm(tau_t).
    std::vector<cplx> weighted(const Eigen::VectorXcd& w) const;
};

/// Correlations generated by a linear system dC/dtau = M C with C(0) given,
/// each column of C propagating independently. Allows exact evaluation of the
/// one-sided Laplace transform through the resolvent of M.
struct LinearCorrelationModel {
    Eigen::MatrixXcd generator;
    Eigen::MatrixXcd initial;

    /// Samples exp(M tau) C(0) on `tau`.
    CorrelationSeries sample(const std::vector<double>& tau) const;
};

/// True when |C(tau_max)| exceeds 1e-3 |C(0)| (Frobenius norms).
bool horizon_too_short(const CorrelationSeries& s);

} // namespace superrad
