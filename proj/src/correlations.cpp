#include "superrad/correlations.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "superrad/errors.hpp"

namespace superrad {

std::vector<cplx> CorrelationSeries::weighted(const Eigen::VectorXcd& w) const {
    if (static_cast<std::size_t>(w.size()) != emitters()) throw InvalidInput("weight vector length differs from N");
    std::vector<cplx> f(values.size());
    for (std::size_t t = 0; t < values.size(); ++t) f[t] = w.dot(values[t] * w);
    return f;
}

CorrelationSeries LinearCorrelationModel::sample(const std::vector<double>& tau) const {
    if (generator.rows() != generator.cols() || initial.rows() != generator.rows()) {
        throw InvalidInput("correlation model: generator and initial condition shapes differ");
    }
    CorrelationSeries out;
    out.tau = tau;
    out.values.reserve(tau.size());
    Eigen::MatrixXcd state = initial;
    double t_prev = 0.0;
    double cached_step = -1.0;
    Eigen::MatrixXcd propagator;
    for (double t : tau) {
        if (!(t >= t_prev)) throw InvalidInput("correlation model: tau grid must be ascending and non-negative");
        const double step = t - t_prev;
        if (step > 0.0) {
            if (std::abs(step - cached_step) > 1e-12 * std::max(1.0, step)) {
                propagator = (generator * step).exp();
                cached_step = step;
            }
            state = propagator * state;
        }
        out.values.push_back(state);
        t_prev = t;
    }
    out.horizon_warning = horizon_too_short(out);
    return out;
}

bool horizon_too_short(const CorrelationSeries& s) {
    if (s.values.size() < 2) return false;
    const double first = s.values.front().norm();
    return first > 0.0 && s.values.back().norm() > 1e-3 * first;
}

} // namespace superrad
