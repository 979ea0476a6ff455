#include <doctest.h>

#include <cmath>

#include "superrad/coupling.hpp"
#include "superrad/errors.hpp"
#include "superrad/geometry.hpp"

using namespace superrad;

TEST_CASE("regular chain positions") {
    const auto a = build_chain(2, 0.5, Vec3(0, 0, 1));
    REQUIRE(a.size() == 2);
    CHECK(a.position(0).norm() == 0.0);
    CHECK((a.position(1) - Vec3(0.5, 0, 0)).norm() == 0.0);

    const auto b = build_chain(12, 0.1, Vec3(0, 0, 1));
    CHECK((b.position(11) - b.position(0)).norm() == doctest::Approx(1.1).epsilon(1e-14));
    for (std::size_t k = 0; k < 12; ++k) {
        CHECK(b.position(k).y() == 0.0);
        CHECK(b.position(k).z() == 0.0);
    }

    const auto c = build_chain(1, 0.3, Vec3(1, 0, 0));
    CHECK(c.size() == 1);
    CHECK(c.position(0).norm() == 0.0);
}

TEST_CASE("dipole is normalized and invalid input rejected") {
    const auto a = build_chain(3, 0.2, Vec3(0, 3, 4));
    CHECK(std::abs(a.dipole().norm() - 1.0) < 1e-12);
    CHECK_THROWS_AS(build_chain(3, 0.2, Vec3(0, 0, 0)), InvalidInput);
    CHECK_THROWS_AS(build_chain(3, 0.0, Vec3(0, 0, 1)), InvalidInput);
    CHECK_THROWS_AS(build_chain(3, -1.0, Vec3(0, 0, 1)), InvalidInput);
    CHECK_THROWS_AS(build_chain(0, 0.1, Vec3(0, 0, 1)), InvalidInput);
    CHECK_THROWS_AS(EmitterArray({Vec3(0, 0, 0), Vec3(0, 0, 0)}, Vec3(0, 0, 1)), DomainError);
}

TEST_CASE("pump patterns") {
    const auto p = pump_pattern_first(12, 4, 10.0);
    REQUIRE(p.size() == 12);
    for (std::size_t n = 0; n < 12; ++n) CHECK(p.rate(n) == (n < 4 ? 10.0 : 0.0));
    CHECK(p.total() == 40.0);

    const auto full = pump_pattern_first(8, 8, 20.0);
    for (double r : full.rates()) CHECK(r == 20.0);

    const auto none = pump_pattern_first(5, 0, 7.0);
    CHECK(!none.any_pumped());
    CHECK(none.total() == 0.0);

    const auto last = pump_pattern_last(6, 2, 3.0);
    CHECK(last.rate(4) == 3.0);
    CHECK(last.rate(5) == 3.0);
    CHECK(last.rate(0) == 0.0);

    CHECK_THROWS_AS(pump_pattern_first(4, 5, 1.0), InvalidInput);
    CHECK_THROWS_AS(pump_pattern_first(4, 2, -1.0), InvalidInput);
    CHECK_THROWS_AS(PumpPattern({1.0, -0.5}), InvalidInput);
}

TEST_CASE("disorder") {
    const auto chain = build_chain(8, 0.05, Vec3(0, 0, 1));

    DisorderConfig zero{0.0, 3, 17};
    const auto same = apply_disorder(chain, zero, 0.05, 1);
    for (std::size_t n = 0; n < chain.size(); ++n) CHECK(same.array.position(n) == chain.position(n));

    DisorderConfig cfg{0.05, 10, 1234};
    const auto r1 = apply_disorder(chain, cfg, 0.05, 3);
    const auto r2 = apply_disorder(chain, cfg, 0.05, 3);
    const auto r3 = apply_disorder(chain, cfg, 0.05, 4);
    bool differs = false;
    for (std::size_t n = 0; n < chain.size(); ++n) {
        CHECK(r1.array.position(n) == r2.array.position(n));
        CHECK(r1.array.position(n).z() == chain.position(n).z());
        differs = differs || r1.array.position(n) != r3.array.position(n);
    }
    CHECK(differs);

    CHECK_THROWS_AS(apply_disorder(chain, cfg, 0.05, 10), InvalidInput);
    CHECK_THROWS_AS((DisorderConfig{-0.1, 1, 0}.validate()), InvalidInput);
    CHECK_THROWS_AS((DisorderConfig{0.1, 0, 0}.validate()), InvalidInput);
}

TEST_CASE("disorder jitter has the configured standard deviation") {
    const auto single = build_chain(1, 0.05, Vec3(0, 0, 1));
    DisorderConfig cfg{0.05, 10000, 99};
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < cfg.realizations; ++k) {
        const double dx = apply_disorder(single, cfg, 0.05, k).array.position(0).x();
        sum += dx;
        sum_sq += dx * dx;
    }
    const double n = static_cast<double>(cfg.realizations);
    const double mean = sum / n;
    const double sd = std::sqrt(sum_sq / n - mean * mean);
    CHECK(std::abs(sd - 0.0025) < 0.03 * 0.0025);
}

TEST_CASE("translation leaves couplings unchanged") {
    const auto chain = build_chain(5, 0.13, Vec3(0, 1, 1));
    const auto shifted = chain.translated(Vec3(3.2, -1.7, 0.4));
    const auto c1 = coupling_matrices(chain);
    const auto c2 = coupling_matrices(shifted);
    CHECK((c1.omega - c2.omega).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((c1.gamma - c2.gamma).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("positions csv") {
    const auto a = build_chain(2, 0.5, Vec3(0, 0, 1));
    CHECK(a.positions_csv() == "index,x,y,z\n0,0,0,0\n1,0.5,0,0\n");
}
