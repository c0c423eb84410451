#include "doctest.h"

#include <cmath>

#include "ulil/distribution.hpp"
#include "ulil/errors.hpp"

using namespace ulil;

TEST_CASE("sample_stream is deterministic and length-exact") {
    Distribution d = Distribution::rademacher();
    auto a = d.sample_stream(42, 0, 4);
    auto b = d.sample_stream(42, 0, 4);
    REQUIRE(a.size() == 4);
    CHECK(a == b);
    for (double v : a) CHECK((v == 1.0 || v == -1.0));
    CHECK(d.sample_stream(42, 1, 0).empty());
}

TEST_CASE("discrete law validates its parameters") {
    CHECK_THROWS_AS(Distribution::discrete({1.0}, {0.5}), Error);
    CHECK_THROWS_AS(Distribution::discrete({1.0, 2.0}, {0.6, 0.5}), Error);
    CHECK_THROWS_AS(Distribution::discrete({}, {}), Error);
    CHECK_THROWS_AS(Distribution::discrete({1.0, INFINITY}, {0.5, 0.5}), Error);
    CHECK_NOTHROW(Distribution::discrete({-1.0, 0.0, 1.0}, {0.3, 0.4, 0.3}));
}

TEST_CASE("discrete sampling matches the weights") {
    Distribution d = Distribution::discrete({-1.0, 0.0, 2.0}, {0.2, 0.5, 0.3});
    const std::size_t n = 100000;
    std::size_t c0 = 0, c1 = 0, c2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = d.sample(9, 0, i);
        if (v == -1.0) ++c0;
        else if (v == 0.0) ++c1;
        else ++c2;
    }
    auto within = [&](std::size_t c, double p) {
        return std::abs(double(c) / n - p) < 4.0 * std::sqrt(p * (1 - p) / n);
    };
    CHECK(within(c0, 0.2));
    CHECK(within(c1, 0.5));
    CHECK(within(c2, 0.3));
    CHECK(d.mean() == doctest::Approx(0.4));
}

TEST_CASE("quantiles invert the laws") {
    CHECK(Distribution::rademacher().quantile(0.25) == -1.0);
    CHECK(Distribution::rademacher().quantile(0.75) == 1.0);
    CHECK(Distribution::uniform01().quantile(0.3) == doctest::Approx(0.3));
    CHECK(Distribution::gaussian01().quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    Distribution d = Distribution::discrete({-1.0, 0.0, 1.0}, {0.3, 0.4, 0.3});
    CHECK(d.quantile(0.1) == -1.0);
    CHECK(d.quantile(0.5) == 0.0);
    CHECK(d.quantile(0.9) == 1.0);
    CHECK_THROWS(d.quantile(0.0));
}

TEST_CASE("moments") {
    CHECK(Distribution::rademacher().variance() == 1.0);
    CHECK(Distribution::uniform01().mean() == 0.5);
    CHECK(Distribution::gaussian01().centered());
    CHECK_FALSE(Distribution::uniform01().centered());
}

TEST_CASE("unknown names are rejected") {
    CHECK_THROWS_AS(Distribution::from_name("cauchy"), Error);
}
