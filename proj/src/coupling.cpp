#include "superrad/coupling.hpp"

#include <cmath>
#include <sstream>

#include "superrad/errors.hpp"
#include "csv_format.hpp"

namespace superrad {

namespace {

struct GreenCoefficients {
    cplx isotropic; ///< coefficient of the identity
    cplx dyadic;    ///< coefficient of r r^T / r^2 (sign included)
};

GreenCoefficients green_coefficients(double r) {
    const double k = kWavenumber;
    const double kr = k * r;
    const cplx phase = std::exp(kI * kr) / (4.0 * kPi * k * k * r * r * r);
    return {phase * cplx(kr * kr - 1.0, kr), -phase * cplx(kr * kr - 3.0, 3.0 * kr)};
}

} // namespace

GreenTensor green_tensor(const Vec3& r) {
    const double dist = r.norm();
    if (!(dist > 0.0)) {
        throw DomainError("Green's tensor is singular at zero separation");
    }
    const auto [iso, dyad] = green_coefficients(dist);
    const Vec3 unit = r / dist;
    GreenTensor out = dyad * (unit * unit.transpose()).cast<cplx>();
    out.diagonal().array() += iso;
    return out;
}

cplx dipole_green(const Vec3& r, const Vec3& dipole) {
    const double dist = r.norm();
    if (!(dist > 0.0)) {
        throw DomainError("Green's tensor is singular at zero separation");
    }
    const auto [iso, dyad] = green_coefficients(dist);
    const double proj = dipole.dot(r) / dist;
    return iso * dipole.squaredNorm() + dyad * proj * proj;
}

CouplingMatrices coupling_matrices(const EmitterArray& array) {
    const std::size_t n = array.size();
    const double gamma0 = array.gamma0();
    // -(mu0 w0^2) in units where Im of the self term reproduces gamma0.
    const double scale = 3.0 * kPi * gamma0 / kWavenumber;

    CouplingMatrices c;
    c.gamma0 = gamma0;
    c.omega = Eigen::MatrixXd::Zero(n, n);
    c.gamma = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        c.gamma(a, a) = gamma0;
        for (std::size_t b = a + 1; b < n; ++b) {
            const Vec3 sep = array.position(a) - array.position(b);
            if (sep.norm() < kCoincidenceDistance) {
                std::ostringstream os;
                os << "emitters " << a << " and " << b << " coincide";
                throw DomainError(os.str());
            }
            const cplx value = -scale * dipole_green(sep, array.dipole());
            c.omega(a, b) = c.omega(b, a) = value.real();
            c.gamma(a, b) = c.gamma(b, a) = -2.0 * value.imag();
        }
    }
    c.g = kI * c.omega.cast<cplx>() - 0.5 * c.gamma.cast<cplx>();

    if (n > 1) {
        const double min_eig = min_gamma_eigenvalue(c);
        if (min_eig < -1e-10 * gamma0) {
            std::ostringstream os;
            os << "dissipative coupling matrix is indefinite (min eigenvalue " << min_eig << ")";
            throw DomainError(os.str());
        }
    }
    return c;
}

double min_gamma_eigenvalue(const CouplingMatrices& c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.gamma, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

std::string CouplingMatrices::to_csv() const {
    std::string out = "row,col,omega,gamma\n";
    for (Eigen::Index a = 0; a < omega.rows(); ++a) {
        for (Eigen::Index b = 0; b < omega.cols(); ++b) {
            out += std::to_string(a) + ',' + std::to_string(b) + ',' + detail::format_double(omega(a, b)) +
                   ',' + detail::format_double(gamma(a, b)) + '\n';
        }
    }
    return out;
}

} // namespace superrad
