#include <doctest.h>

#include <cmath>
#include <limits>

#include "superrad/coupling.hpp"
#include "superrad/cumulant.hpp"
#include "superrad/errors.hpp"
#include "superrad/full_quantum.hpp"
#include "superrad/observables.hpp"

using namespace superrad;

namespace {

std::vector<double> uniform(double lo, double hi, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return x;
}

double lorentzian(double w, double center, double hwhm, double height) {
    return height * hwhm * hwhm / ((w - center) * (w - center) + hwhm * hwhm);
}

struct CumulantSystem {
    EmitterArray array;
    CouplingMatrices c;
    PumpPattern p;
    CumulantState ss;

    LinearCorrelationModel model() const { return regression_model(ss, c, p); }
};

CumulantSystem cumulant_chain(std::size_t n, double a, const PumpPattern& p, const Vec3& dipole = Vec3(0, 0, 1)) {
    auto array = build_chain(n, a, dipole);
    auto c = coupling_matrices(array);
    auto ss = cumulant_steady_state(c, p);
    REQUIRE(ss.converged);
    return {array, c, p, ss.state};
}

} // namespace

TEST_CASE("total emission") {
    const auto c = coupling_matrices(build_chain(4, 0.2, Vec3(0, 0, 1)));
    CHECK(total_emission(c, Eigen::MatrixXcd::Zero(4, 4)) == 0.0);

    // Independent emitters: populations only.
    const double r = 3.0;
    Eigen::MatrixXcd pm = Eigen::MatrixXcd::Zero(4, 4);
    pm(0, 0) = pm(1, 1) = r / (r + 1.0);
    CHECK(total_emission(c, pm) == doctest::Approx(independent_emission(2, r)).epsilon(1e-14));

    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(4, 4);
    bad(0, 1) = cplx(0, 0.5);
    CHECK_THROWS_AS(total_emission(c, bad), InvalidInput);
    CHECK_THROWS_AS(total_emission(c, Eigen::MatrixXcd::Zero(3, 3)), InvalidInput);
}

TEST_CASE("independent emission") {
    CHECK(independent_emission(4, 10.0) == doctest::Approx(40.0 / 11.0).epsilon(1e-15));
    CHECK(independent_emission(6, 0.0) == 0.0);
    CHECK(independent_emission(8, 1e6) == doctest::Approx(8.0).epsilon(1e-5));
    CHECK_THROWS_AS(independent_emission(2, -1.0), InvalidInput);
}

TEST_CASE("dense fully pumped chain is superradiant") {
    const auto array = build_chain(4, 0.05, Vec3(0, 0, 1));
    const auto c = coupling_matrices(array);
    const auto p = pump_pattern_first(4, 4, 10.0);
    const auto rho = steady_state(Liouvillian(c, p));
    CHECK(total_emission(c, pair_correlations(rho).coherences) / independent_emission(4, 10.0) > 1.0);
}

TEST_CASE("single emitter intensity map") {
    const EmitterArray one({Vec3(0, 0, 0)}, Vec3(0, 0, 1));
    Eigen::MatrixXcd pm(1, 1);
    pm(0, 0) = 0.7;
    const Eigen::Vector3cd d(0, 0, 1);
    for (const Vec3& r : {Vec3(0.3, 0.2, 0.5), Vec3(-1.0, 0.1, 0.0)}) {
        CHECK(field_intensity(one, pm, r) == doctest::Approx(0.7 * (green_tensor(r) * d).squaredNorm()).epsilon(1e-13));
    }
    // Azimuthal symmetry about the dipole axis in the plane through the emitter.
    const double rho = 0.8;
    const double ref = field_intensity(one, pm, Vec3(rho, 0, 0));
    for (double phi : {0.3, 1.1, 2.5, 4.0}) {
        CHECK(field_intensity(one, pm, Vec3(rho * std::cos(phi), rho * std::sin(phi), 0)) ==
              doctest::Approx(ref).epsilon(1e-12));
    }

    PlaneSpec plane;
    plane.offset = 0.0;
    plane.u_points = plane.v_points = 41;
    const auto map = field_intensity_map(one, pm, plane);
    CHECK(map.values.maxCoeff() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(map.values.minCoeff() >= 0.0);
    CHECK(map.masked(20, 20) == 1);
    CHECK(map.masked.sum() == 1);
    CHECK(map.values(20, 20) == map.mask_value);
    CHECK(map.values(20, 30) == doctest::Approx(map.values(30, 20)).epsilon(1e-12));
    CHECK(map.to_csv().rfind("x,y,value\n", 0) == 0);

    PlaneSpec dot;
    dot.offset = 0.0;
    dot.u_min = dot.u_max = dot.v_min = dot.v_max = 0.0;
    dot.u_points = dot.v_points = 1;
    CHECK_THROWS_AS(field_intensity_map(one, pm, dot), EmptyMap);
}

TEST_CASE("partially pumped chain radiates out of its end") {
    const auto five = cumulant_chain(15, 0.15, pump_pattern_first(15, 5, 10.0));
    const Vec3 center = five.array.centroid();
    // Beyond the chain ends (half length 1.05) the -x axis outshines +y.
    for (double d : {1.5, 2.0, 2.5, 3.0}) {
        const double along = field_intensity(five.array, five.ss.pm, center + Vec3(-d, 0, 1));
        const double across = field_intensity(five.array, five.ss.pm, center + Vec3(0, d, 1));
        CHECK(along > across);
    }

    const auto all = cumulant_chain(15, 0.15, pump_pattern_first(15, 15, 10.0));
    PlaneSpec plane;
    plane.u_min = center.x() - 2.0;
    plane.u_max = center.x() + 2.0;
    const auto map5 = field_intensity_map(five.array, five.ss.pm, plane);
    const auto map15 = field_intensity_map(all.array, all.ss.pm, plane);
    CHECK(anisotropy_ratio(map5, center.x(), 0.0, 0.8, 1.0) > anisotropy_ratio(map15, center.x(), 0.0, 0.8, 1.0));
    CHECK_THROWS_AS(anisotropy_ratio(map5, center.x(), 0.0, 10.0, 11.0), EmptyMap);
}

TEST_CASE("linewidth of synthetic spectra") {
    SUBCASE("single Lorentzian") {
        const double g = 0.7;
        const auto w = uniform(-20 * g, 20 * g, 4096);
        std::vector<double> s;
        for (double x : w) s.push_back(lorentzian(x, 0.0, g, 2.0));
        const auto shape = linewidth_fwhm(w, s);
        CHECK(std::abs(shape.fwhm - 2 * g) < 0.005 * 2 * g);
        CHECK(shape.peak_count == 1);
        CHECK(std::abs(shape.peak_position) < 0.01 * g);
    }
    SUBCASE("two separated lines") {
        const auto w = uniform(-40, 40, 8001);
        std::vector<double> s;
        for (double x : w) s.push_back(lorentzian(x, -10.0, 1.0, 1.0) + lorentzian(x, 12.0, 3.0, 0.4));
        const auto shape = linewidth_fwhm(w, s);
        CHECK(shape.fwhm == doctest::Approx(2.0).epsilon(0.01));
        CHECK(shape.peak_position == doctest::Approx(-10.0).epsilon(1e-3));
        CHECK(shape.peak_count == 2);
    }
    SUBCASE("cut-off peak") {
        const auto w = uniform(-1, 1, 101);
        std::vector<double> s;
        for (double x : w) s.push_back(lorentzian(x, 0.0, 5.0, 1.0));
        CHECK_THROWS_AS(linewidth_fwhm(w, s), GridTooNarrow);
        try {
            linewidth_fwhm(w, s);
        } catch (const GridTooNarrow& e) {
            CHECK(e.suggested_half_width() > 1.0);
        }
    }
    SUBCASE("no positive sample") {
        CHECK_THROWS_AS(linewidth_fwhm({0.0, 1.0, 2.0}, {0.0, -1.0, 0.0}), InvalidInput);
    }
}

TEST_CASE("single emitter spectrum has width gamma0 + R") {
    for (double r : {1.0, 10.0}) {
        const auto sys = cumulant_chain(1, 0.3, PumpPattern({r}));
        const Direction dir{0.4, 1.2};
        const auto res = far_field_spectrum(sys.model(), sys.array, dir);
        CHECK(std::abs(res.fwhm - (1.0 + r)) < 0.02 * (1.0 + r));
        CHECK(res.peak_count == 1);
        CHECK(std::abs(res.peak_position) < 0.01);

        // Sampled path through the exact engine.
        const Liouvillian L(sys.c, sys.p);
        SpectrumOptions opts;
        opts.half_width = default_half_width(sys.c, sys.p);
        const auto exact = far_field_spectrum(L, steady_state(L), sys.array, dir, opts);
        CHECK(!exact.horizon_warning);
        CHECK(std::abs(exact.fwhm - (1.0 + r)) < 0.02 * (1.0 + r));
    }
}

TEST_CASE("sampled and resolvent spectra agree") {
    const auto sys = cumulant_chain(3, 0.12, pump_pattern_first(3, 2, 6.0));
    const Direction dir{2.0, 1.3};
    std::vector<double> tau;
    for (int k = 0; k <= 6000; ++k) tau.push_back(0.005 * k);
    const auto corr = sys.model().sample(tau);
    CHECK(!corr.horizon_warning);
    const auto sampled = far_field_spectrum(corr, sys.array, dir);
    const auto exact = far_field_spectrum_on_grid(sys.model(), sys.array, dir, sampled.omega);
    double peak = 0.0, dev = 0.0;
    for (std::size_t i = 0; i < sampled.omega.size(); ++i) {
        peak = std::max(peak, exact.values[i]);
        dev = std::max(dev, std::abs(exact.values[i] - sampled.values[i]));
    }
    CHECK(dev < 1e-3 * peak);
}

TEST_CASE("spectrum phase factors") {
    SUBCASE("detection along z gives the unweighted double sum") {
        const auto sys = cumulant_chain(4, 0.1, pump_pattern_first(4, 2, 5.0), Vec3(1, 0, 0));
        const auto m = sys.model();
        const auto w = uniform(-30, 30, 301);
        const auto res = far_field_spectrum_on_grid(m, sys.array, Direction{0.7, 0.0}, w);
        const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(4);
        for (std::size_t i = 0; i < w.size(); ++i) {
            Eigen::MatrixXcd a = -m.generator;
            a.diagonal().array() += cplx(0, w[i]);
            const cplx f = ones.dot(a.partialPivLu().solve(m.initial * ones));
            CHECK(res.values[i] == doctest::Approx(3.0 / (8.0 * kPi) * 2.0 * f.real()).epsilon(1e-10));
        }
    }
    SUBCASE("detection along the dipole is dark") {
        const auto sys = cumulant_chain(3, 0.1, pump_pattern_first(3, 3, 5.0));
        const auto res = far_field_spectrum(sys.model(), sys.array, Direction{0.0, 0.0});
        CHECK(res.dark);
        CHECK(res.fwhm == 0.0);
        CHECK(*std::max_element(res.values.begin(), res.values.end()) == 0.0);
    }
    SUBCASE("translation invariance") {
        const auto sys = cumulant_chain(5, 0.08, pump_pattern_first(5, 2, 12.0));
        const auto moved = sys.array.translated(Vec3(0.37, -1.2, 0.05));
        const auto w = uniform(-60, 60, 401);
        const Direction dir{2.6, 1.1};
        const auto a = far_field_spectrum_on_grid(sys.model(), sys.array, dir, w);
        const auto b = far_field_spectrum_on_grid(sys.model(), moved, dir, w);
        const double top = *std::max_element(a.values.begin(), a.values.end());
        for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-10 * top);
    }
    SUBCASE("uncoupled emitters radiate isotropically up to the dipole factor") {
        const auto sys = cumulant_chain(4, 50.0, pump_pattern_first(4, 4, 3.0));
        const auto w = uniform(-10, 10, 201);
        const Direction d1{0.0, kPi / 2}, d2{2.2, 0.6};
        const auto a = far_field_spectrum_on_grid(sys.model(), sys.array, d1, w);
        const auto b = far_field_spectrum_on_grid(sys.model(), sys.array, d2, w);
        const double pa = spectrum_prefactor(sys.array, d1), pb = spectrum_prefactor(sys.array, d2);
        const double top = *std::max_element(a.values.begin(), a.values.end()) / pa;
        for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(a.values[i] / pa - b.values[i] / pb) < 0.01 * top);
    }
}

TEST_CASE("sphere-integrated spectrum equals the total emission") {
    const auto sys = cumulant_chain(6, 0.1, pump_pattern_first(6, 3, 8.0));
    const auto w = uniform(-3000, 3000, 120001);
    // Gauss-Legendre nodes in cos(theta), uniform in phi.
    constexpr int kTheta = 12, kPhi = 24;
    Eigen::VectorXd x(kTheta), wt(kTheta);
    {
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(kTheta, kTheta);
        for (int i = 1; i < kTheta; ++i) j(i, i - 1) = j(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
        x = es.eigenvalues();
        wt = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    }
    double power = 0.0;
    for (int i = 0; i < kTheta; ++i) {
        for (int k = 0; k < kPhi; ++k) {
            const Direction dir{2.0 * kPi * k / kPhi, std::acos(x(i))};
            const auto s = far_field_spectrum_on_grid(sys.model(), sys.array, dir, w);
            power += s.integrated_power() * wt(i) * 2.0 * kPi / kPhi;
        }
    }
    const double emission = total_emission(sys.c, sys.ss.pm);
    CHECK(std::abs(power - emission) < 0.05 * emission);
}

TEST_CASE("maximal emission direction") {
    SUBCASE("single emitter ties resolve lexicographically") {
        const EmitterArray one({Vec3(0, 0, 0)}, Vec3(0, 0, 1));
        const Eigen::MatrixXcd pm = Eigen::MatrixXcd::Constant(1, 1, 0.5);
        for (double radius : {kDefaultDetectorRadius, std::numeric_limits<double>::infinity()}) {
            const auto d = max_emission_direction(one, pm, {}, radius);
            CHECK(d.phi == 0.0);
            CHECK(d.theta == doctest::Approx(kPi / 2).epsilon(1e-15));
        }
    }
    SUBCASE("left-pumped chain emits along -x, mirrored chain along +x") {
        const auto left = cumulant_chain(12, 0.1, pump_pattern_first(12, 4, 10.0));
        const auto d = max_emission_direction(left.array, left.ss.pm);
        CHECK(d.phi == doctest::Approx(kPi).epsilon(1e-15));
        CHECK(d.theta == doctest::Approx(kPi / 2).epsilon(1e-15));

        const auto right = cumulant_chain(12, 0.1, pump_pattern_last(12, 4, 10.0));
        const auto m = max_emission_direction(right.array, right.ss.pm);
        CHECK(m.phi == 0.0);
        CHECK(m.theta == doctest::Approx(kPi / 2).epsilon(1e-15));
    }
}

TEST_CASE("partial pumping narrows the line along the chain") {
    for (double a : {0.05, 0.1}) {
        CAPTURE(a);
        const Direction dir{kPi, kPi / 2};
        const auto part = cumulant_chain(12, a, pump_pattern_first(12, 4, 10.0));
        const auto full = cumulant_chain(12, a, pump_pattern_first(12, 12, 10.0));
        const auto s4 = far_field_spectrum(part.model(), part.array, dir);
        const auto s12 = far_field_spectrum(full.model(), full.array, dir);
        CHECK(s4.fwhm < 2.0);
        CHECK(s4.fwhm < s12.fwhm / 4.0);
        CHECK(std::abs(s4.peak_position) < std::abs(s12.peak_position));
    }
}
