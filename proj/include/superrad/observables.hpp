#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "superrad/correlations.hpp"
#include "superrad/coupling.hpp"
#include "superrad/full_quantum.hpp"
#include "superrad/geometry.hpp"
#include "superrad/types.hpp"

namespace superrad {

/// I = sum_nm Gamma_nm <s+_n s-_m>. Throws InvalidInput when pm is not
/// Hermitian to 1e-9 or its size differs from the couplings.
double total_emission(const CouplingMatrices& c, const Eigen::MatrixXcd& pm);

/// N_p R / (R + gamma0): emission of N_p independent pumped emitters.
double independent_emission(std::size_t n_pumped, double rate, double gamma0 = 1.0);

/// <E- E+>(r) up to the dropped constant mu0^2 omega0^4, with
/// E+(r) = sum_n G(r - r_n) d s-_n.
double field_intensity(const EmitterArray& array, const Eigen::MatrixXcd& pm, const Vec3& r);

enum class Axis { X = 0, Y = 1, Z = 2 };

/// Rectangular sampling plane perpendicular to `normal` at coordinate
/// `offset`. The in-plane coordinates (u, v) are (y, z), (x, z) or (x, y)
/// for normals x, y and z respectively.
struct PlaneSpec {
    Axis normal = Axis::Z;
    double offset = 1.0;
    double u_min = -2.0, u_max = 2.0;
    double v_min = -2.0, v_max = 2.0;
    std::size_t u_points = 101, v_points = 101;

    Vec3 point(double u, double v) const;
    void validate() const;
};

/// Points closer than this to an emitter are masked in intensity maps.
inline constexpr double kMaskRadius = 1e-3;

struct IntensityMap {
    PlaneSpec plane;
    std::vector<double> u, v;
    Eigen::MatrixXd values;  ///< values(j, i) at (u[i], v[j]); max 1 unless the field vanishes
    Eigen::MatrixXi masked;  ///< 1 where the point lies within kMaskRadius of an emitter
    double mask_value = 0.0; ///< value stored at masked points
    double raw_max = 0.0;    ///< unnormalized maximum

    /// CSV with the two in-plane coordinate names followed by `value`,
    /// e.g. x,y,value for a z-normal plane. Masked points are omitted.
    std::string to_csv() const;
};

/// Normalized intensity on a plane. Throws EmptyMap if every point is masked.
IntensityMap field_intensity_map(const EmitterArray& array, const Eigen::MatrixXcd& pm, const PlaneSpec& plane);

/// max/min of the unmasked map values whose in-plane distance from
/// (u0, v0) lies in [r_inner, r_outer]. Throws EmptyMap when no point
/// qualifies and UndefinedResult when the minimum vanishes.
double anisotropy_ratio(const IntensityMap& map, double u0, double v0, double r_inner, double r_outer);

/// (3 gamma0 / 8 pi)(1 - (R.d)^2).
double spectrum_prefactor(const EmitterArray& array, const Direction& dir);

struct LineShape {
    double fwhm = 0.0;
    double peak_position = 0.0;
    std::size_t peak_count = 0;
};

/// Width of the tallest peak from linearly interpolated half-maximum
/// crossings on both flanks, plus the number of interior local maxima above
/// 5% of the global maximum. `omega` must be ascending. Throws InvalidInput
/// without a positive sample and GridTooNarrow when a crossing lies outside
/// the grid.
LineShape linewidth_fwhm(const std::vector<double>& omega, const std::vector<double>& values);

struct SpectrumOptions {
    double half_width = 0.0;          ///< initial scan range +-half_width; 0 derives it from the data
    std::size_t coarse_points = 2001;
    std::size_t points_per_fwhm = 50; ///< refinement target inside every resolved peak
    std::size_t max_refinements = 12;
};

/// Scan range R_max + max_n sum_m |Omega_nm| + 5 (gamma0 + R_max).
double default_half_width(const CouplingMatrices& c, const PumpPattern& p);

struct SpectrumResult {
    std::vector<double> omega;  ///< detuning omega - omega0, ascending
    std::vector<double> values; ///< S(omega)
    Direction direction;
    double fwhm = 0.0;
    double peak_position = 0.0;
    std::size_t peak_count = 0;
    bool dark = false;            ///< detection along the dipole: zero spectrum, no width
    bool horizon_warning = false; ///< sampled correlations had not decayed to 1e-3

    /// Trapezoidal integral of S d(omega) / 2 pi over the sampled window.
    double integrated_power() const;

    /// CSV with columns omega,value.
    std::string to_csv() const;

    /// JSON sidecar with direction, width, peak position and count.
    std::string to_json() const;
};

/// Directional spectrum
///
///   S(omega) = prefactor * 2 Re int_0^inf dtau e^{-i omega tau} f(tau),
///   f(tau) = sum_nm e^{i k R.(r_n - r_m)} C_nm(tau),
///
/// from sampled correlations. The integral uses piecewise-linear (Filon)
/// weights on the tau grid and an exponential tail fitted to the last two
/// samples. The frequency grid is refined adaptively around every peak.
SpectrumResult far_field_spectrum(const CorrelationSeries& corr, const EmitterArray& array, const Direction& dir,
                                  const SpectrumOptions& opts = {});

/// Same spectrum from already weighted samples f(tau) on `tau`.
SpectrumResult far_field_spectrum(const std::vector<double>& tau, const std::vector<cplx>& f,
                                  const EmitterArray& array, const Direction& dir, const SpectrumOptions& opts = {});

/// Exact-engine spectrum: f(tau) from two_time_weighted on a uniform grid of
/// step pi / (4 half_width), lengthened (20, 40, ... up to 640 / gamma0)
/// until |f(tau_max)| < 1e-3 |f(0)|. Requires opts.half_width > 0.
SpectrumResult far_field_spectrum(const Liouvillian& L, const DensityMatrix& rho_ss, const EmitterArray& array,
                                  const Direction& dir, const SpectrumOptions& opts);

/// Same spectrum from a linear correlation model, evaluated exactly through
/// the resolvent (i omega - M)^{-1} C(0).
SpectrumResult far_field_spectrum(const LinearCorrelationModel& model, const EmitterArray& array,
                                  const Direction& dir, const SpectrumOptions& opts = {});

/// Resolvent spectrum on a caller-supplied ascending grid, without
/// refinement or line-shape extraction.
SpectrumResult far_field_spectrum_on_grid(const LinearCorrelationModel& model, const EmitterArray& array,
                                          const Direction& dir, const std::vector<double>& omega);

struct AngularGrid {
    std::size_t phi_points = 360;   ///< phi_i = 2 pi i / phi_points
    std::size_t theta_points = 180; ///< theta_j = pi j / theta_points
};

/// Far-field intensity per solid angle, (3 gamma0 / 8 pi)(1 - (R.d)^2) w^H pm w.
double far_field_intensity(const EmitterArray& array, const Eigen::MatrixXcd& pm, const Direction& dir);

/// Detection distance used to locate the maximal-emission direction.
inline constexpr double kDefaultDetectorRadius = 100.0;

/// Direction maximizing the emitted intensity over `grid`, ties broken by
/// smallest phi, then smallest theta. The intensity is evaluated with the
/// full Green's tensor at `detector_radius` from the array centroid; pass
/// infinity for the pure far-field pattern, which is inversion symmetric.
Direction max_emission_direction(const EmitterArray& array, const Eigen::MatrixXcd& pm, const AngularGrid& grid = {},
                                 double detector_radius = kDefaultDetectorRadius);

} // namespace superrad
