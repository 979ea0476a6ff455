#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace superrad {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;

/// Transition wavenumber. Lengths are measured in units of the transition
/// wavelength, so k0 = 2 pi.
inline constexpr double kWavenumber = 2.0 * kPi;

inline constexpr cplx kI{0.0, 1.0};

} // namespace superrad
