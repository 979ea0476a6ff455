#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace superrad::detail {

struct KrylovResult {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Restarted flexible GMRES with right preconditioning. `apply(x, y)` computes
/// y = A x and `precondition(r, z)` computes z ~ A^{-1} r. `x` carries the
/// initial guess in and the solution out.
template <class Apply, class Precondition>
KrylovResult fgmres(Apply&& apply, Precondition&& precondition, const Eigen::VectorXcd& b, Eigen::VectorXcd& x,
                    double tol, std::size_t restart, std::size_t max_iterations) {
    using Vec = Eigen::VectorXcd;
    using cplx = std::complex<double>;
    KrylovResult result;
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        x.setZero(b.size());
        result.converged = true;
        return result;
    }
    if (x.size() != b.size()) x = Vec::Zero(b.size());

    const std::size_t m = std::max<std::size_t>(1, restart);
    std::vector<Vec> v(m + 1), z(m);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(m));
    std::vector<double> cs(m);
    std::vector<cplx> sn(m);
    Vec g(static_cast<Eigen::Index>(m + 1));
    Vec r(b.size()), w(b.size());

    while (true) {
        apply(x, r);
        r = b - r;
        double beta = r.norm();
        result.relative_residual = beta / bnorm;
        if (result.relative_residual < tol) {
            result.converged = true;
            return result;
        }
        if (result.iterations >= max_iterations) return result;

        v[0] = r / beta;
        g.setZero();
        g(0) = beta;
        h.setZero();
        std::size_t k = 0;
        for (std::size_t j = 0; j < m && result.iterations < max_iterations; ++j) {
            precondition(v[j], z[j]);
            apply(z[j], w);
            const auto jj = static_cast<Eigen::Index>(j);
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t i = 0; i <= j; ++i) {
                    const cplx hij = v[i].dot(w);
                    h(static_cast<Eigen::Index>(i), jj) += hij;
                    w -= hij * v[i];
                }
            }
            const double hnext = w.norm();
            h(jj + 1, jj) = hnext;
            if (hnext > 0.0) v[j + 1] = w / hnext;

            for (std::size_t i = 0; i < j; ++i) {
                const auto ii = static_cast<Eigen::Index>(i);
                const cplx a = h(ii, jj);
                const cplx c = h(ii + 1, jj);
                h(ii, jj) = cs[i] * a + sn[i] * c;
                h(ii + 1, jj) = -std::conj(sn[i]) * a + cs[i] * c;
            }
            const cplx a = h(jj, jj);
            const cplx c = h(jj + 1, jj);
            const double rho = std::hypot(std::abs(a), std::abs(c));
            if (std::abs(a) == 0.0) {
                cs[j] = 0.0;
                sn[j] = 1.0;
            } else {
                cs[j] = std::abs(a) / rho;
                sn[j] = (a / std::abs(a)) * std::conj(c) / rho;
            }
            h(jj, jj) = cs[j] * a + sn[j] * c;
            h(jj + 1, jj) = 0.0;
            g(jj + 1) = -std::conj(sn[j]) * g(jj);
            g(jj) = cs[j] * g(jj);

            ++result.iterations;
            k = j + 1;
            if (std::abs(g(jj + 1)) / bnorm < tol || hnext == 0.0) break;
        }
        const auto kk = static_cast<Eigen::Index>(k);
        const Vec y = h.topLeftCorner(kk, kk).triangularView<Eigen::Upper>().solve(g.head(kk));
        for (std::size_t i = 0; i < k; ++i) x += y(static_cast<Eigen::Index>(i)) * z[i];
    }
}

} // namespace superrad::detail
