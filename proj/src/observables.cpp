#include "superrad/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "csv_format.hpp"
#include "superrad/errors.hpp"
#include "superrad/parallel.hpp"

namespace superrad {

namespace {

using detail::format_double;

void check_pm(const EmitterArray& array, const Eigen::MatrixXcd& pm) {
    const auto n = static_cast<Eigen::Index>(array.size());
    if (pm.rows() != n || pm.cols() != n) throw InvalidInput("coherence matrix size differs from the emitter count");
}

/// Columns are G(r - r_n) d.
Eigen::Matrix3Xcd radiated_fields(const EmitterArray& array, const Vec3& r) {
    Eigen::Matrix3Xcd a(3, static_cast<Eigen::Index>(array.size()));
    const Eigen::Vector3cd d = array.dipole().cast<cplx>();
    for (std::size_t n = 0; n < array.size(); ++n) a.col(static_cast<Eigen::Index>(n)) = green_tensor(r - array.position(n)) * d;
    return a;
}

double intensity_from_fields(const Eigen::Matrix3Xcd& a, const Eigen::MatrixXcd& pm) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < 3; ++c) {
        const Eigen::VectorXcd u = a.row(c).transpose();
        sum += u.dot(pm * u).real();
    }
    return sum;
}

const char* axis_name(int axis) { return axis == 0 ? "x" : axis == 1 ? "y" : "z"; }

std::pair<int, int> in_plane_axes(Axis normal) {
    switch (normal) {
    case Axis::X: return {1, 2};
    case Axis::Y: return {0, 2};
    case Axis::Z: break;
    }
    return {0, 1};
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

/// Frequency-domain evaluator returning S(omega).
using SpectralDensity = std::function<double(double)>;

/// Interior local maxima above `fraction` of the global maximum.
std::vector<std::size_t> local_maxima(const std::vector<double>& v, double fraction) {
    std::vector<std::size_t> out;
    if (v.size() < 3) return out;
    const double top = *std::max_element(v.begin(), v.end());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] > fraction * top) out.push_back(i);
    }
    return out;
}

/// Samples S on an adaptively refined grid: a uniform scan, widened while
/// the main peak is cut off, then refined until every peak above 5% of the
/// maximum holds the requested number of points within its half-maximum
/// region.
void sample_adaptively(const SpectralDensity& s, const SpectrumOptions& opts, const std::vector<double>& seeds,
                       SpectrumResult& out) {
    std::map<double, double> samples;
    auto add = [&](const std::vector<double>& omegas) {
        std::vector<double> fresh;
        for (double w : omegas) {
            if (std::isfinite(w) && !samples.contains(w)) fresh.push_back(w);
        }
        std::sort(fresh.begin(), fresh.end());
        fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
        std::vector<double> vals(fresh.size());
        parallel_for(fresh.size(), [&](std::size_t i) { vals[i] = s(fresh[i]); });
        for (std::size_t i = 0; i < fresh.size(); ++i) samples.emplace(fresh[i], vals[i]);
    };
    double width = opts.half_width;
    const std::size_t coarse = std::max<std::size_t>(opts.coarse_points, 3);
    add(linspace(-width, width, coarse));
    std::vector<double> inside;
    for (double w : seeds) {
        if (std::abs(w) <= width) inside.push_back(w);
    }
    add(inside);

    auto flatten = [&] {
        out.omega.clear();
        out.values.clear();
        for (const auto& [w, v] : samples) {
            out.omega.push_back(w);
            out.values.push_back(v);
        }
    };
    for (std::size_t round = 0;; ++round) {
        flatten();
        LineShape shape;
        try {
            shape = linewidth_fwhm(out.omega, out.values);
        } catch (const GridTooNarrow& e) {
            if (round >= opts.max_refinements) throw;
            width = std::max(e.suggested_half_width(), 2.0 * width);
            add(linspace(-width, width, coarse));
            continue;
        }
        out.fwhm = shape.fwhm;
        out.peak_position = shape.peak_position;
        out.peak_count = shape.peak_count;
        if (round >= opts.max_refinements) return;

        std::vector<double> extra;
        for (std::size_t i : local_maxima(out.values, 0.05)) {
            const double half = out.values[i] / 2;
            std::size_t lo = i, hi = i;
            while (lo > 0 && out.values[lo] > half && out.values[lo - 1] <= out.values[lo]) --lo;
            while (hi + 1 < out.values.size() && out.values[hi] > half && out.values[hi + 1] <= out.values[hi]) ++hi;
            if (hi - lo - 1 >= opts.points_per_fwhm) continue;
            const double a = out.omega[lo], b = out.omega[hi];
            const auto n = 2 * opts.points_per_fwhm + 1;
            for (double w : linspace(a, b, n)) extra.push_back(w);
        }
        const std::size_t before = samples.size();
        add(extra);
        if (samples.size() == before) return;
    }
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return sum;
}

/// One-sided Fourier transform of piecewise-linear samples plus an
/// exponential tail beyond the last sample.
class FilonTransform {
public:
    FilonTransform(std::vector<double> tau, std::vector<cplx> f) : tau_(std::move(tau)), f_(std::move(f)) {
        if (tau_.size() < 2 || tau_.front() != 0.0) {
            throw InvalidInput("spectrum: correlations must be sampled from tau = 0 with at least two points");
        }
        const std::size_t last = tau_.size() - 1;
        const double h = tau_[last] - tau_[last - 1];
        if (h > 0.0 && std::abs(f_[last - 1]) > 0.0 && std::abs(f_[last]) > 0.0) {
            const cplx rate = std::log(f_[last] / f_[last - 1]) / h;
            if (rate.real() < 0.0) tail_rate_ = rate;
        }
    }

    cplx operator()(double omega) const {
        cplx sum = 0.0;
        for (std::size_t k = 0; k + 1 < tau_.size(); ++k) {
            const double h = tau_[k + 1] - tau_[k];
            if (h <= 0.0) continue;
            const cplx z(0.0, -omega * h);
            cplx wa, wb;
            if (std::abs(z) < 0.1) {
                // Series of (e^z - 1 - z)/z^2 and (e^z (z - 1) + 1)/z^2.
                cplx term = 1.0, sa = 0.0, sb = 0.0;
                double fact = 2.0;
                for (int m = 2; m <= 9; ++m) {
                    sa += term / fact;
                    sb += term * static_cast<double>(m - 1) / fact;
                    term *= z;
                    fact *= m + 1;
                }
                wa = h * sa;
                wb = h * sb;
            } else {
                const cplx ez = std::exp(z);
                wa = h * (ez - 1.0 - z) / (z * z);
                wb = h * (ez * (z - 1.0) + 1.0) / (z * z);
            }
            sum += std::polar(1.0, -omega * tau_[k]) * (wa * f_[k] + wb * f_[k + 1]);
        }
        if (tail_rate_) {
            const double t = tau_.back();
            sum += f_.back() * std::polar(1.0, -omega * t) / (cplx(0.0, omega) - *tail_rate_);
        }
        return sum;
    }

private:
    std::vector<double> tau_;
    std::vector<cplx> f_;
    std::optional<cplx> tail_rate_;
};

/// F(omega) = y^H (i omega - M)^{-1} x, through the eigenbasis of M when it
/// is well conditioned, otherwise by a dense solve per frequency.
class Resolvent {
public:
    Resolvent(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) : m_(m), x_(x), y_(y) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
        if (es.info() == Eigen::Success) {
            const Eigen::MatrixXcd& v = es.eigenvectors();
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
            const auto& sv = svd.singularValues();
            if (sv(sv.size() - 1) > 1e-10 * sv(0)) {
                poles_ = es.eigenvalues();
                left_ = (y.adjoint() * v).transpose();
                right_ = v.partialPivLu().solve(x);
                diagonal_ = true;
            }
        }
    }

    cplx operator()(double omega) const {
        if (diagonal_) {
            cplx sum = 0.0;
            for (Eigen::Index k = 0; k < poles_.size(); ++k) sum += left_(k) * right_(k) / (cplx(0.0, omega) - poles_(k));
            return sum;
        }
        Eigen::MatrixXcd a = -m_;
        a.diagonal().array() += cplx(0.0, omega);
        return y_.dot(a.partialPivLu().solve(x_));
    }

    /// Frequencies near every line: Im(lambda) +- multiples of |Re(lambda)|.
    std::vector<double> seeds() const {
        std::vector<double> out;
        Eigen::VectorXcd poles = poles_;
        if (!diagonal_) poles = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(m_, false).eigenvalues();
        for (Eigen::Index k = 0; k < poles.size(); ++k) {
            const double nu = poles(k).imag(), kappa = std::abs(poles(k).real());
            for (double s : {0.0, -0.5, 0.5, -1.0, 1.0, -2.0, 2.0}) out.push_back(nu + s * kappa);
        }
        return out;
    }

private:
    Eigen::MatrixXcd m_;
    Eigen::VectorXcd x_, y_;
    bool diagonal_ = false;
    Eigen::VectorXcd poles_, left_, right_;
};

SpectrumResult dark_result(const Direction& dir, double width, const SpectrumOptions& opts) {
    SpectrumResult out;
    out.direction = dir;
    out.dark = true;
    out.omega = linspace(-width, width, std::max<std::size_t>(opts.coarse_points, 3));
    out.values.assign(out.omega.size(), 0.0);
    return out;
}

double initial_width(const SpectrumOptions& opts, double fallback) {
    return opts.half_width > 0.0 ? opts.half_width : fallback;
}

/// Scan width from the decay and oscillation rates of a sampled series.
double width_from_samples(const std::vector<double>& tau) {
    const double step = tau.size() > 1 ? tau[1] - tau[0] : 1.0;
    return std::max(10.0, 0.5 * kPi / std::max(step, 1e-6));
}

double generator_width(const Eigen::MatrixXcd& m) {
    double width = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) width = std::max(width, m.row(i).cwiseAbs().sum());
    return 5.0 * std::max(width, 1.0);
}

} // namespace

double total_emission(const CouplingMatrices& c, const Eigen::MatrixXcd& pm) {
    const auto n = static_cast<Eigen::Index>(c.size());
    if (pm.rows() != n || pm.cols() != n) throw InvalidInput("total_emission: coherence matrix size differs from N");
    const cplx sum = c.gamma.cast<cplx>().cwiseProduct(pm).sum();
    if (std::abs(sum.imag()) > 1e-9 * std::max(1.0, std::abs(sum.real()))) {
        throw InvalidInput("total_emission: coherence matrix is not Hermitian");
    }
    return sum.real();
}

double independent_emission(std::size_t n_pumped, double rate, double gamma0) {
    if (!(rate >= 0.0)) throw InvalidInput("independent_emission: pump rate must be non-negative");
    return static_cast<double>(n_pumped) * gamma0 * rate / (rate + gamma0);
}

double field_intensity(const EmitterArray& array, const Eigen::MatrixXcd& pm, const Vec3& r) {
    check_pm(array, pm);
    return intensity_from_fields(radiated_fields(array, r), pm);
}

Vec3 PlaneSpec::point(double u, double v) const {
    const auto [iu, iv] = in_plane_axes(normal);
    Vec3 r = Vec3::Zero();
    r(static_cast<int>(normal)) = offset;
    r(iu) = u;
    r(iv) = v;
    return r;
}

void PlaneSpec::validate() const {
    if (u_points < 1 || v_points < 1) throw InvalidInput("plane: resolution must be at least 1x1");
    if (!(u_max >= u_min) || !(v_max >= v_min)) throw InvalidInput("plane: empty extent");
}

std::string IntensityMap::to_csv() const {
    const auto [iu, iv] = in_plane_axes(plane.normal);
    std::ostringstream out;
    out << axis_name(iu) << ',' << axis_name(iv) << ",value\n";
    for (std::size_t j = 0; j < v.size(); ++j) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const auto ji = static_cast<Eigen::Index>(j), ii = static_cast<Eigen::Index>(i);
            if (masked(ji, ii)) continue;
            out << format_double(u[i]) << ',' << format_double(v[j]) << ',' << format_double(values(ji, ii)) << '\n';
        }
    }
    return out.str();
}

IntensityMap field_intensity_map(const EmitterArray& array, const Eigen::MatrixXcd& pm, const PlaneSpec& plane) {
    check_pm(array, pm);
    plane.validate();
    IntensityMap map;
    map.plane = plane;
    map.u = linspace(plane.u_min, plane.u_max, plane.u_points);
    map.v = linspace(plane.v_min, plane.v_max, plane.v_points);
    const auto nu = static_cast<Eigen::Index>(map.u.size()), nv = static_cast<Eigen::Index>(map.v.size());
    map.values = Eigen::MatrixXd::Zero(nv, nu);
    map.masked = Eigen::MatrixXi::Zero(nv, nu);
    parallel_for(static_cast<std::size_t>(nv), [&](std::size_t j) {
        const auto jj = static_cast<Eigen::Index>(j);
        for (Eigen::Index i = 0; i < nu; ++i) {
            const Vec3 r = plane.point(map.u[static_cast<std::size_t>(i)], map.v[j]);
            bool near = false;
            for (const auto& p : array.positions()) near = near || (r - p).norm() < kMaskRadius;
            if (near) {
                map.masked(jj, i) = 1;
                continue;
            }
            map.values(jj, i) = intensity_from_fields(radiated_fields(array, r), pm);
        }
    });
    if (map.masked.minCoeff() == 1) throw EmptyMap("intensity map: every sample lies on an emitter");
    double top = 0.0;
    for (Eigen::Index j = 0; j < nv; ++j) {
        for (Eigen::Index i = 0; i < nu; ++i) {
            if (!map.masked(j, i)) top = std::max(top, map.values(j, i));
        }
    }
    map.raw_max = top;
    if (top > 0.0) {
        map.values /= top;
        map.values = map.values.cwiseMax(0.0);
    }
    for (Eigen::Index j = 0; j < nv; ++j) {
        for (Eigen::Index i = 0; i < nu; ++i) {
            if (map.masked(j, i)) map.values(j, i) = map.mask_value;
        }
    }
    return map;
}

double anisotropy_ratio(const IntensityMap& map, double u0, double v0, double r_inner, double r_outer) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < map.v.size(); ++j) {
        for (std::size_t i = 0; i < map.u.size(); ++i) {
            const auto ji = static_cast<Eigen::Index>(j), ii = static_cast<Eigen::Index>(i);
            const double dist = std::hypot(map.u[i] - u0, map.v[j] - v0);
            if (map.masked(ji, ii) || dist < r_inner || dist > r_outer) continue;
            any = true;
            lo = std::min(lo, map.values(ji, ii));
            hi = std::max(hi, map.values(ji, ii));
        }
    }
    if (!any) throw EmptyMap("anisotropy_ratio: no unmasked sample in the annulus");
    if (!(lo > 0.0)) throw UndefinedResult("anisotropy_ratio: intensity vanishes in the annulus");
    return hi / lo;
}

double spectrum_prefactor(const EmitterArray& array, const Direction& dir) {
    const double proj = dir.unit().dot(array.dipole());
    return 3.0 * array.gamma0() / (8.0 * kPi) * std::max(0.0, 1.0 - proj * proj);
}

LineShape linewidth_fwhm(const std::vector<double>& omega, const std::vector<double>& values) {
    if (omega.size() != values.size()) throw InvalidInput("linewidth_fwhm: grid and values differ in length");
    for (std::size_t i = 1; i < omega.size(); ++i) {
        if (!(omega[i] > omega[i - 1])) throw InvalidInput("linewidth_fwhm: grid must be strictly ascending");
    }
    const auto top_it = std::max_element(values.begin(), values.end());
    if (top_it == values.end() || !(*top_it > 0.0)) throw InvalidInput("linewidth_fwhm: no positive sample");
    const auto g = static_cast<std::size_t>(top_it - values.begin());
    const double half = *top_it / 2;
    const double suggestion = 2.0 * std::max(std::abs(omega.front()), std::abs(omega.back()));

    std::size_t l = g;
    while (l > 0 && values[l] > half) --l;
    std::size_t r = g;
    while (r + 1 < values.size() && values[r] > half) ++r;
    if (values[l] > half || values[r] > half) {
        throw GridTooNarrow("linewidth_fwhm: half maximum not reached inside the frequency grid", suggestion);
    }
    auto cross = [&](std::size_t a, std::size_t b) {
        return omega[a] + (half - values[a]) * (omega[b] - omega[a]) / (values[b] - values[a]);
    };
    LineShape out;
    out.fwhm = cross(r, r - 1) - cross(l, l + 1);
    out.peak_position = omega[g];
    out.peak_count = local_maxima(values, 0.05).size();
    return out;
}

double default_half_width(const CouplingMatrices& c, const PumpPattern& p) {
    const double r = p.max_rate();
    double shift = 0.0;
    for (Eigen::Index i = 0; i < c.omega.rows(); ++i) shift = std::max(shift, c.omega.row(i).cwiseAbs().sum());
    return r + shift + 5.0 * (c.gamma0 + r);
}

double SpectrumResult::integrated_power() const { return trapezoid(omega, values) / (2.0 * kPi); }

std::string SpectrumResult::to_csv() const {
    std::ostringstream out;
    out << "omega,value\n";
    for (std::size_t i = 0; i < omega.size(); ++i) out << format_double(omega[i]) << ',' << format_double(values[i]) << '\n';
    return out.str();
}

std::string SpectrumResult::to_json() const {
    nlohmann::ordered_json j;
    j["direction"] = {{"phi", direction.phi}, {"theta", direction.theta}};
    j["dark"] = dark;
    j["fwhm"] = fwhm;
    j["peak_position"] = peak_position;
    j["peak_count"] = peak_count;
    j["points"] = omega.size();
    j["omega_min"] = omega.empty() ? 0.0 : omega.front();
    j["omega_max"] = omega.empty() ? 0.0 : omega.back();
    j["horizon_warning"] = horizon_warning;
    return j.dump(2);
}

SpectrumResult far_field_spectrum(const std::vector<double>& tau, const std::vector<cplx>& f,
                                  const EmitterArray& array, const Direction& dir, const SpectrumOptions& opts) {
    if (tau.size() != f.size()) throw InvalidInput("spectrum: tau grid and samples differ in length");
    const double width = initial_width(opts, width_from_samples(tau));
    const double pref = spectrum_prefactor(array, dir);
    if (pref < 1e-12) return dark_result(dir, width, opts);
    const FilonTransform ft(tau, f);
    SpectrumOptions o = opts;
    o.half_width = width;
    SpectrumResult out;
    out.direction = dir;
    out.horizon_warning = f.size() > 1 && std::abs(f.back()) > 1e-3 * std::abs(f.front());
    sample_adaptively([&](double w) { return pref * 2.0 * ft(w).real(); }, o, {}, out);
    return out;
}

SpectrumResult far_field_spectrum(const CorrelationSeries& corr, const EmitterArray& array, const Direction& dir,
                                  const SpectrumOptions& opts) {
    if (corr.emitters() != array.size()) throw InvalidInput("spectrum: correlation and array sizes differ");
    SpectrumResult out = far_field_spectrum(corr.tau, corr.weighted(far_field_phases(array, dir)), array, dir, opts);
    out.horizon_warning = corr.horizon_warning;
    return out;
}

SpectrumResult far_field_spectrum(const Liouvillian& L, const DensityMatrix& rho_ss, const EmitterArray& array,
                                  const Direction& dir, const SpectrumOptions& opts) {
    if (!(opts.half_width > 0.0)) throw InvalidInput("exact spectrum: a positive half width is required");
    if (L.emitters() != array.size()) throw InvalidInput("spectrum: Liouvillian and array sizes differ");
    if (spectrum_prefactor(array, dir) < 1e-12) return dark_result(dir, opts.half_width, opts);
    const Eigen::VectorXcd w = far_field_phases(array, dir);
    const double step = kPi / (4.0 * opts.half_width);
    std::vector<double> tau;
    std::vector<cplx> f;
    for (double t_max = 20.0;; t_max *= 2.0) {
        const auto count = static_cast<std::size_t>(std::ceil(t_max / step));
        tau.resize(count + 1);
        for (std::size_t k = 0; k <= count; ++k) tau[k] = step * static_cast<double>(k);
        f = two_time_weighted(L, rho_ss, w, tau);
        if (std::abs(f.back()) < 1e-3 * std::abs(f.front()) || t_max >= 640.0) break;
    }
    return far_field_spectrum(tau, f, array, dir, opts);
}

SpectrumResult far_field_spectrum(const LinearCorrelationModel& model, const EmitterArray& array, const Direction& dir,
                                  const SpectrumOptions& opts) {
    if (static_cast<std::size_t>(model.generator.rows()) != array.size()) {
        throw InvalidInput("spectrum: correlation model and array sizes differ");
    }
    const double width = initial_width(opts, generator_width(model.generator));
    const double pref = spectrum_prefactor(array, dir);
    if (pref < 1e-12) return dark_result(dir, width, opts);
    const Eigen::VectorXcd w = far_field_phases(array, dir);
    const Resolvent res(model.generator, model.initial * w, w);
    SpectrumOptions o = opts;
    o.half_width = width;
    SpectrumResult out;
    out.direction = dir;
    sample_adaptively([&](double om) { return pref * 2.0 * res(om).real(); }, o, res.seeds(), out);
    return out;
}

SpectrumResult far_field_spectrum_on_grid(const LinearCorrelationModel& model, const EmitterArray& array,
                                          const Direction& dir, const std::vector<double>& omega) {
    if (static_cast<std::size_t>(model.generator.rows()) != array.size()) {
        throw InvalidInput("spectrum: correlation model and array sizes differ");
    }
    SpectrumResult out;
    out.direction = dir;
    out.omega = omega;
    out.values.assign(omega.size(), 0.0);
    const double pref = spectrum_prefactor(array, dir);
    if (pref < 1e-12) {
        out.dark = true;
        return out;
    }
    const Eigen::VectorXcd w = far_field_phases(array, dir);
    const Resolvent res(model.generator, model.initial * w, w);
    parallel_for(omega.size(), [&](std::size_t i) { out.values[i] = pref * 2.0 * res(omega[i]).real(); });
    return out;
}

double far_field_intensity(const EmitterArray& array, const Eigen::MatrixXcd& pm, const Direction& dir) {
    check_pm(array, pm);
    const Eigen::VectorXcd w = far_field_phases(array, dir);
    return spectrum_prefactor(array, dir) * w.dot(pm * w).real();
}

Direction max_emission_direction(const EmitterArray& array, const Eigen::MatrixXcd& pm, const AngularGrid& grid,
                                 double detector_radius) {
    check_pm(array, pm);
    if (grid.phi_points < 1 || grid.theta_points < 1) throw InvalidInput("angular grid must be non-empty");
    if (!(detector_radius > 0.0)) throw InvalidInput("detector radius must be positive");
    const Vec3 center = array.centroid();
    const bool far = std::isinf(detector_radius);
    auto direction = [&](std::size_t i, std::size_t j) {
        return Direction{2.0 * kPi * static_cast<double>(i) / static_cast<double>(grid.phi_points),
                         kPi * static_cast<double>(j) / static_cast<double>(grid.theta_points)};
    };
    Eigen::MatrixXd p(static_cast<Eigen::Index>(grid.phi_points), static_cast<Eigen::Index>(grid.theta_points));
    parallel_for(grid.phi_points, [&](std::size_t i) {
        for (std::size_t j = 0; j < grid.theta_points; ++j) {
            const Direction d = direction(i, j);
            p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                far ? far_field_intensity(array, pm, d)
                    : intensity_from_fields(radiated_fields(array, center + detector_radius * d.unit()), pm);
        }
    });
    std::size_t bi = 0, bj = 0;
    double best = p(0, 0);
    for (std::size_t i = 0; i < grid.phi_points; ++i) {
        for (std::size_t j = 0; j < grid.theta_points; ++j) {
            const double v = p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (v > best + 1e-10 * std::abs(best)) {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }
    return direction(bi, bj);
}

} // namespace superrad
