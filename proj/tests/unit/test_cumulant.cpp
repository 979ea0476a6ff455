#include <doctest.h>

#include <cmath>
#include <random>

#include "brute_force.hpp"
#include "superrad/coupling.hpp"
#include "superrad/cumulant.hpp"
#include "superrad/errors.hpp"
#include "superrad/full_quantum.hpp"

using namespace superrad;

namespace {

/// Random product of single-emitter pure states with their moments.
struct ProductSample {
    DensityMatrix rho;
    CumulantState moments;
};

ProductSample random_product(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
    Eigen::VectorXcd amp_g(static_cast<Eigen::Index>(n)), amp_e(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = kPi * u(rng);
        const double phase = 2.0 * kPi * u(rng);
        const cplx g = std::cos(theta / 2);
        const cplx e = std::sin(theta / 2) * std::exp(cplx(0, phase));
        amp_g(static_cast<Eigen::Index>(k)) = g;
        amp_e(static_cast<Eigen::Index>(k)) = e;
        Eigen::VectorXcd next(psi.size() * 2);
        for (Eigen::Index i = 0; i < psi.size(); ++i) {
            next(2 * i) = psi(i) * g;
            next(2 * i + 1) = psi(i) * e;
        }
        psi = next;
    }
    ProductSample out{DensityMatrix::pure(n, psi), CumulantState::ground(n)};
    for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(n); ++a) {
        for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(n); ++b) {
            // <s+_a s-_b> = conj(e_a g_a*) ... = e_a^* g_a e_b g_b^* for a != b.
            out.moments.pm(a, b) = a == b ? cplx(std::norm(amp_e(a)))
                                          : std::conj(amp_e(a)) * amp_g(a) * amp_e(b) * std::conj(amp_g(b));
            out.moments.eeee(a, b) = a == b ? std::norm(amp_e(a)) : std::norm(amp_e(a)) * std::norm(amp_e(b));
        }
        out.moments.ee(a) = std::norm(amp_e(a));
    }
    return out;
}

EmitterArray cloud4() {
    return EmitterArray({Vec3(0, 0, 0), Vec3(0.09, 0.02, 0), Vec3(0.2, -0.05, 0.04), Vec3(0.26, 0.1, -0.03)},
                        Vec3(0.1, 0.3, 1));
}

double total_emission(const CouplingMatrices& c, const Eigen::MatrixXcd& pm) {
    return (c.gamma.cast<cplx>().cwiseProduct(pm.transpose())).sum().real();
}

} // namespace

TEST_CASE("vacuum is stationary without pump") {
    const auto c = coupling_matrices(build_chain(4, 0.1, Vec3(0, 0, 1)));
    const auto d = cumulant_rhs(CumulantState::ground(4), c, PumpPattern({0, 0, 0, 0}));
    CHECK(max_abs(d) == 0.0);
}

TEST_CASE("single emitter population equation") {
    const auto c = coupling_matrices(build_chain(1, 0.3, Vec3(0, 0, 1)));
    for (double r : {0.0, 2.0, 10.0}) {
        CumulantState s = CumulantState::ground(1);
        s.ee(0) = 0.3;
        s.pm(0, 0) = 0.3;
        s.eeee(0, 0) = 0.3;
        const auto d = cumulant_rhs(s, c, PumpPattern({r}));
        CHECK(d.ee(0) == doctest::Approx(-(1.0 + r) * 0.3 + r).epsilon(1e-14));
    }
}

TEST_CASE("right-hand side equals the exact derivative on product states") {
    const auto c = coupling_matrices(cloud4());
    const PumpPattern p({3.0, 0.0, 1.5, 0.4});
    const Liouvillian L(c, p);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto sample = random_product(4, seed);
        const Eigen::MatrixXcd drho = L.apply(sample.rho).data;
        const auto d = cumulant_rhs(sample.moments, c, p);
        for (std::size_t a = 0; a < 4; ++a) {
            const auto sa = brute::sigma_minus(4, a);
            const auto ia = static_cast<Eigen::Index>(a);
            CHECK(std::abs(d.ee(ia) - brute::expectation(sa.adjoint() * sa, drho)) < 1e-10);
            for (std::size_t b = 0; b < 4; ++b) {
                if (a == b) continue;
                const auto sb = brute::sigma_minus(4, b);
                const auto ib = static_cast<Eigen::Index>(b);
                const cplx exact_pm = (sa.adjoint() * sb * drho).trace();
                CHECK(std::abs(d.pm(ia, ib) - exact_pm) < 1e-10);
                const double exact_ee = brute::expectation(sa.adjoint() * sa * sb.adjoint() * sb, drho);
                CHECK(std::abs(d.eeee(ia, ib) - exact_ee) < 1e-10);
            }
        }
    }
}

TEST_CASE("photon balance holds identically in the truncated equations") {
    const auto c = coupling_matrices(cloud4());
    const PumpPattern p({3.0, 0.0, 1.5, 0.4});
    const auto s = random_product(4, 9).moments;
    const auto d = cumulant_rhs(s, c, p);
    double input = 0.0;
    for (Eigen::Index a = 0; a < 4; ++a) input += p.rate(static_cast<std::size_t>(a)) * (1.0 - s.ee(a));
    CHECK(std::abs(d.ee.sum() - (input - total_emission(c, s.pm))) < 1e-12);
}

TEST_CASE("single emitter matches the exact engine at all times") {
    const auto c = coupling_matrices(build_chain(1, 0.3, Vec3(0, 0, 1)));
    const PumpPattern p({2.5});
    const std::vector<double> t{0.0, 0.1, 0.5, 1.0, 3.0};
    const auto traj = integrate_cumulant(CumulantState::ground(1), c, p, t);
    const auto exact = evolve(Liouvillian(c, p), DensityMatrix::ground(1), t);
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(std::abs(traj.states[k].ee(0) - exact[k].data(1, 1).real()) < 1e-8);
    }

    const auto ss = cumulant_steady_state(c, PumpPattern({10.0}));
    CHECK(ss.converged);
    CHECK(std::abs(ss.state.ee(0) - 10.0 / 11.0) < 1e-9);
}

TEST_CASE("integration keeps pm Hermitian and flags stationarity") {
    const auto c = coupling_matrices(build_chain(5, 0.1, Vec3(0, 0, 1)));
    const auto p = pump_pattern_first(5, 2, 8.0);
    std::vector<double> t;
    for (int k = 0; k <= 30; ++k) t.push_back(static_cast<double>(k) * 5.0);
    const auto traj = integrate_cumulant(CumulantState::ground(5), c, p, t);
    for (const auto& s : traj.states) CHECK((s.pm - s.pm.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(traj.steady);

    const auto short_run = integrate_cumulant(CumulantState::ground(5), c, p, {0.0, 0.1});
    CHECK(!short_run.steady);

    CumulantState bad = CumulantState::ground(5);
    bad.ee(2) = 1.5;
    bad.pm(2, 2) = 1.5;
    CHECK_THROWS_AS(integrate_cumulant(bad, c, p, t), InvalidInput);
}

TEST_CASE("steady state obeys photon balance") {
    for (const auto& [n, np, r, a] : {std::tuple{6, 3, 8.0, 0.08}, std::tuple{10, 4, 20.0, 0.05},
                                      std::tuple{8, 8, 1.5, 0.1}}) {
        const auto c = coupling_matrices(build_chain(static_cast<std::size_t>(n), a, Vec3(0, 0, 1)));
        const auto p = pump_pattern_first(static_cast<std::size_t>(n), static_cast<std::size_t>(np), r);
        const auto ss = cumulant_steady_state(c, p);
        REQUIRE(ss.converged);
        double input = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) input += p.rate(static_cast<std::size_t>(k)) * (1.0 - ss.state.ee(k));
        const double out = total_emission(c, ss.state.pm);
        CHECK(std::abs(out - input) < 1e-6 * input);
    }
}

TEST_CASE("regression correlations") {
    SUBCASE("single emitter") {
        const double r = 4.0;
        const auto c = coupling_matrices(build_chain(1, 0.3, Vec3(0, 0, 1)));
        const PumpPattern p({r});
        const auto ss = cumulant_steady_state(c, p).state;
        std::vector<double> tau;
        for (int k = 0; k <= 50; ++k) tau.push_back(0.05 * k);
        const auto corr = regression_correlations(ss, c, p, tau);
        for (std::size_t k = 0; k < tau.size(); ++k) {
            CHECK(std::abs(corr.values[k](0, 0) - ss.ee(0) * std::exp(-(1.0 + r) * tau[k] / 2)) < 1e-12);
        }
    }
    SUBCASE("initial slice and column sums") {
        const auto c = coupling_matrices(build_chain(6, 0.07, Vec3(0, 0, 1)));
        const auto p = pump_pattern_first(6, 2, 15.0);
        const auto ss = cumulant_steady_state(c, p).state;
        const auto corr = regression_correlations(ss, c, p, {0.0, 0.3, 0.6, 0.9});
        CHECK((corr.values[0] - ss.pm).cwiseAbs().maxCoeff() == 0.0);
        // The summed vector obeys the same linear system.
        const Eigen::MatrixXcd m = regression_generator(ss, c, p);
        const LinearCorrelationModel summed{m, ss.pm.rowwise().sum()};
        const auto s = summed.sample({0.0, 0.3, 0.6, 0.9});
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK((corr.values[k].rowwise().sum() - s.values[k]).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SUBCASE("generator is stable at tested steady states") {
        for (const auto& [n, np, r, a] : {std::tuple{4, 2, 20.0, 0.1}, std::tuple{8, 4, 10.0, 0.05},
                                          std::tuple{12, 4, 20.0, 0.05}, std::tuple{8, 8, 1.5, 0.1}}) {
            const auto c = coupling_matrices(build_chain(static_cast<std::size_t>(n), a, Vec3(0, 0, 1)));
            const auto p = pump_pattern_first(static_cast<std::size_t>(n), static_cast<std::size_t>(np), r);
            const auto ss = cumulant_steady_state(c, p).state;
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(regression_generator(ss, c, p));
            CHECK(es.eigenvalues().real().maxCoeff() < 1e-8);
        }
    }
}

namespace {

/// Max deviation of the summed correlation against the exact engine, relative to its peak.
double regression_deviation(std::size_t n, std::size_t np) {
    const auto c = coupling_matrices(build_chain(n, 0.1, Vec3(0, 0, 1)));
    const auto p = pump_pattern_first(n, np, 20.0);
    std::vector<double> tau;
    for (int k = 0; k <= 60; ++k) tau.push_back(0.05 * k);
    const Liouvillian L(c, p);
    const auto exact = two_time_correlations(L, steady_state(L), tau);
    const auto approx = regression_correlations(cumulant_steady_state(c, p).state, c, p, tau);
    double peak = 0.0, dev = 0.0;
    for (std::size_t k = 0; k < tau.size(); ++k) {
        const cplx e = exact.values[k].sum();
        peak = std::max(peak, std::abs(e));
        dev = std::max(dev, std::abs(e - approx.values[k].sum()));
    }
    return dev / peak;
}

} // namespace

TEST_CASE("regression agrees with the exact engine for two pumped emitters") {
    CHECK(regression_deviation(2, 2) < 0.05);
}

TEST_CASE("regression agrees with the exact engine for four emitters, two pumped") {
    CHECK(regression_deviation(4, 2) < 0.05);
}
