#include "doctest.h"

#include <cmath>

#include "ulil/bounds.hpp"
#include "ulil/errors.hpp"
#include "ulil/rng.hpp"

using namespace ulil;

TEST_CASE("uniform Prohorov bound: direct substitutions") {
    CHECK(talagrand_bound(1.0, 1.0, 1.0, 1.0) == std::exp(-std::log(2.0)));
    CHECK(talagrand_bound(1.0, 1.0, 1.0, 1.0) == doctest::Approx(0.5));
    // second form with sigma^2 = 1, E|Z| = 0, U = 1 collapses to V = 1
    CHECK(talagrand_bound_weak_variance(1.0, 1.0, 1.0, 0.0, 1.0) ==
          talagrand_bound(1.0, 1.0, 1.0, 1.0));
    CHECK_THROWS_AS(talagrand_bound(0.0, 1.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(talagrand_bound(1.0, -1.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(talagrand_bound(1.0, 1.0, 0.0, 1.0), Error);
}

TEST_CASE("bound monotonicity in t and V") {
    double prev = 1.0;
    for (double t = 0.5; t < 64.0; t *= 2.0) {
        double b = talagrand_bound(t, 1.0, 1.0);
        CHECK(b < prev);
        prev = b;
    }
    double prev_v = 0.0;
    for (double v = 0.25; v < 64.0; v *= 2.0) {
        double b = talagrand_bound(2.0, 1.0, v);
        CHECK(b > prev_v);
        prev_v = b;
    }
    // decays to zero for large t
    CHECK(talagrand_bound(1e6, 1.0, 1.0) < 1e-300);
}

TEST_CASE("classical Prohorov and Bernstein forms") {
    // U -> 0 turns Bernstein into the Gaussian tail
    CHECK(bernstein_bound(3.0, 1e-12, 2.0) ==
          doctest::Approx(2.0 * std::exp(-9.0 / 4.0)).epsilon(1e-9));
    // prefactor caps both at 2
    for (int i = 0; i < 50; ++i) {
        double t = 0.1 + 10.0 * rng::uniform01(1, 0, i);
        double u = 0.1 + 3.0 * rng::uniform01(1, 1, i);
        double s2 = 0.1 + 3.0 * rng::uniform01(1, 2, i);
        double p = prohorov_bound(t, u, s2);
        double b = bernstein_bound(t, u, s2);
        CHECK(p > 0.0);
        CHECK(p <= 2.0);
        CHECK(b > 0.0);
        CHECK(b <= 2.0);
    }
    // far tail regime where the arcsinh saves a factor
    CHECK(prohorov_bound(10.0, 1.0, 1.0) < bernstein_bound(10.0, 1.0, 1.0));
    CHECK_THROWS_AS(prohorov_bound(1.0, 1.0, 0.0), Error);
    CHECK_THROWS_AS(bernstein_bound(-1.0, 1.0, 1.0), Error);
}

TEST_CASE("chaos lower-bound check on a scalar") {
    ChaosMatrix a(1, 1);
    a.at(0, 0) = 1.0;
    LatalaCheck r = latala_lower_check(a, 1.0, 0.1, LatalaMode::exhaustive);
    CHECK(r.probability == 1.0);  // the chaos is +-1, threshold is 0.1
    CHECK(r.threshold == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(r.holds);
}

TEST_CASE("chaos lower-bound check on the zero matrix") {
    ChaosMatrix z(2, 3);
    LatalaCheck r = latala_lower_check(z, 2.0, 0.05, LatalaMode::exhaustive);
    CHECK(r.probability == 1.0);  // |0| >= 0 always
    CHECK(r.threshold == 0.0);
    CHECK(r.holds);
}

TEST_CASE("chaos lower bound holds on random sign matrices") {
    for (std::uint64_t inst = 0; inst < 20; ++inst) {
        ChaosMatrix a(4, 4);
        for (std::size_t i = 0; i < a.entries.size(); ++i)
            a.entries[i] = rng::rademacher(900 + inst, 0, i);
        for (double t : {1.0, 2.0, std::log(16.0)}) {
            LatalaCheck r = latala_lower_check(a, t, 0.05, LatalaMode::exhaustive);
            CHECK(r.holds);
        }
    }
}

TEST_CASE("exhaustive and Monte Carlo probabilities agree") {
    ChaosMatrix a(3, 3);
    for (std::size_t i = 0; i < 9; ++i) a.entries[i] = rng::gaussian(77, 0, i);
    LatalaCheck ex = latala_lower_check(a, 1.0, 0.3, LatalaMode::exhaustive);
    LatalaCheck mc = latala_lower_check(a, 1.0, 0.3, LatalaMode::monte_carlo, 100000, 5);
    CHECK(mc.se > 0.0);
    CHECK(std::abs(ex.probability - mc.probability) <= 4.0 * mc.se + 1e-12);
}

TEST_CASE("exhaustive mode rejects oversized instances") {
    ChaosMatrix a(13, 13);
    CHECK_THROWS_AS(latala_lower_check(a, 1.0, 0.05, LatalaMode::exhaustive), Error);
}

TEST_CASE("sign-value enumeration matches the direct bilinear form") {
    ChaosMatrix a(2, 2);
    a.at(0, 0) = 1.0;
    a.at(0, 1) = -2.0;
    a.at(1, 0) = 0.5;
    a.at(1, 1) = 3.0;
    std::vector<double> values = chaos_sign_values(a);
    REQUIRE(values.size() == 16);
    double total = 0.0;
    for (double v : values) total += v;
    CHECK(total == doctest::Approx(0.0).epsilon(1e-12));  // signs are symmetric
    // first entry corresponds to all signs -1: sum of entries
    CHECK(values.front() == doctest::Approx(2.5));
}
