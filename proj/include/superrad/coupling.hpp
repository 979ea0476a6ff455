#pragma once

#include <string>

#include "superrad/geometry.hpp"
#include "superrad/types.hpp"

namespace superrad {

using GreenTensor = Eigen::Matrix3cd;

/// Free-space dyadic Green's tensor at the transition frequency for a
/// separation `r` given in units of lambda0:
///
///   G(r) = e^{ik r} / (4 pi k^2 r^3) [ (k^2 r^2 + i k r - 1) 1
///                                      - (k^2 r^2 + 3 i k r - 3) r r^T / r^2 ]
///
/// Throws DomainError for |r| = 0, where the real part diverges.
GreenTensor green_tensor(const Vec3& r);

/// d^T G(r) d for a real dipole, avoiding the full 3x3 assembly.
cplx dipole_green(const Vec3& r, const Vec3& dipole);

/// Coherent (omega) and dissipative (gamma) dipole-dipole couplings in units of
/// gamma0 together with g = i omega - gamma / 2.
struct CouplingMatrices {
    Eigen::MatrixXd omega; ///< symmetric, zero diagonal
    Eigen::MatrixXd gamma; ///< symmetric PSD, diagonal gamma0
    Eigen::MatrixXcd g;
    double gamma0 = 1.0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(omega.rows()); }

    /// CSV with columns row,col,omega,gamma.
    std::string to_csv() const;
};

/// Omega_nm - i Gamma_nm / 2 = -(3 pi gamma0 / k0) d.G(r_n - r_m).d for n != m;
/// Omega_nn = 0 and Gamma_nn = gamma0. Throws DomainError if gamma is
/// indefinite beyond round-off.
CouplingMatrices coupling_matrices(const EmitterArray& array);

/// Smallest eigenvalue of the dissipative matrix.
double min_gamma_eigenvalue(const CouplingMatrices& c);

} // namespace superrad
