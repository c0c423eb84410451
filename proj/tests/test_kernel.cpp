#include "doctest.h"

#include <cmath>
#include <vector>

#include "ulil/errors.hpp"
#include "ulil/kernel.hpp"
#include "ulil/rng.hpp"

using namespace ulil;

namespace {

std::vector<Kernel> catalog_sample() {
    Distribution rad = Distribution::rademacher();
    Distribution uni = Distribution::uniform01();
    Distribution gauss = Distribution::gaussian01();
    CatalogParams block;
    block.a = {0.5, 0.2, 0.9};
    block.b = {0.1, 0.1, 0.1};
    CatalogParams dexp;
    dexp.de_a = 1.0;
    dexp.de_b = 2.0;
    CatalogParams rank2;
    rank2.lambdas = {2.0, -1.0};
    CatalogParams hermite2;
    hermite2.lambdas = {1.0, 0.5};
    return {
        catalog("product", {}, rad),
        catalog("sum", {}, rad),
        catalog("zero", {}, rad),
        catalog("block", block, uni),
        catalog("block_doubleexp", dexp, uni),
        catalog("finite_rank", rank2, uni),
        catalog("finite_rank", hermite2, gauss),
    };
}

}  // namespace

TEST_CASE("catalog rejects unknown names and bad parameters") {
    Distribution uni = Distribution::uniform01();
    CHECK_THROWS_AS(catalog("mystery", {}, uni), Error);
    CatalogParams overfull;
    overfull.a = {1.0, 1.0};
    overfull.b = {0.6, 0.6};  // sum exceeds 1
    CHECK_THROWS_AS(catalog("block", overfull, uni), Error);
    CatalogParams block;
    block.a = {1.0};
    block.b = {0.5};
    CHECK_THROWS_AS(catalog("block", block, Distribution::rademacher()), Error);
}

TEST_CASE("catalog fills analytic facts") {
    Kernel prod = catalog("product", {}, Distribution::rademacher());
    CHECK(*prod.analytic().operator_norm == 1.0);
    CHECK(*prod.analytic().mean_h == 0.0);

    CatalogParams p;
    p.a = {0.5, 0.2, 0.9};
    p.b = {0.1, 0.1, 0.1};
    Kernel blk = catalog("block", p, Distribution::uniform01());
    CHECK(*blk.analytic().operator_norm == 0.9);
    CHECK(*blk.analytic().mean_h == 0.0);
}

TEST_CASE("doubly exponential block family truncates where doubles end") {
    CatalogParams p;
    p.de_a = 1.0;
    p.de_b = 2.0;
    Kernel k = catalog("block_doubleexp", p, Distribution::uniform01());
    // b_n = exp(-exp(n/2)) drops below 1e-300 between n = 13 and 14.
    int trunc = k.truncated_at();
    CHECK(trunc >= 10);
    CHECK(trunc <= 14);
    REQUIRE(k.block());
    CHECK(k.block()->block_count() == static_cast<std::size_t>(trunc));
    double last_b = k.block()->b().back();
    CHECK(last_b >= 1e-300);
    CHECK(std::exp(-std::exp((trunc + 1) / 2.0)) < 1e-300);
}

TEST_CASE("block kernel pointwise values") {
    BlockKernelSpec spec({0.5, 0.2}, {0.1, 0.2});
    // block 0: [0, 0.1), left half [0, 0.05); block 1: [0.1, 0.3)
    CHECK(spec.eval(0.01, 0.04) == doctest::Approx(5.0));    // left-left: +a/b
    CHECK(spec.eval(0.01, 0.08) == doctest::Approx(-5.0));   // left-right: -a/b
    CHECK(spec.eval(0.06, 0.09) == doctest::Approx(5.0));    // right-right
    CHECK(spec.eval(0.01, 0.15) == 0.0);                     // different blocks
    CHECK(spec.eval(0.5, 0.6) == 0.0);                       // outside all supports
    CHECK(spec.eval(0.15, 0.25) == doctest::Approx(-1.0));   // block 1: 0.2/0.2 with sign
    CHECK(block_kernel_eval(spec, 0.01, 0.04) == spec.eval(0.01, 0.04));
}

TEST_CASE("every catalog kernel is exactly symmetric on a thousand points") {
    for (const Kernel& k : catalog_sample()) {
        for (int i = 0; i < 1000; ++i) {
            double x = rng::uniform01(77, 0, i);
            double y = rng::uniform01(77, 1, i);
            if (k.name() == "finite_rank" && k.analytic().dist_name == "gaussian01") {
                x = rng::gaussian(77, 0, i);
                y = rng::gaussian(77, 1, i);
            }
            CHECK(k(x, y) == k(y, x));  // exact, not approximate
        }
    }
}

TEST_CASE("separable expansion reproduces direct evaluation") {
    for (const Kernel& k : catalog_sample()) {
        if (!k.has_separable()) continue;
        const auto& terms = k.separable();
        bool gaussian_basis = k.analytic().dist_name == "gaussian01";
        for (int i = 0; i < 300; ++i) {
            double x = gaussian_basis ? rng::gaussian(78, 0, i) : rng::uniform01(78, 0, i);
            double y = gaussian_basis ? rng::gaussian(78, 1, i) : rng::uniform01(78, 1, i);
            double direct = k(x, y);
            double expand = 0.0;
            for (const auto& t : terms) expand += t.lambda * (t.phi(x) * t.phi(y));
            CHECK(expand == doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("block kernel Monte Carlo moments: canonical mean and per-block mass") {
    CatalogParams p;
    p.a = {0.5, 0.2, 0.9};
    p.b = {0.1, 0.1, 0.1};
    Kernel k = catalog("block", p, Distribution::uniform01());
    const std::size_t n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> block_sq(3, 0.0);
    const BlockKernelSpec& spec = *k.block();
    for (std::size_t i = 0; i < n; ++i) {
        double x = rng::uniform01(5, 0, i);
        double y = rng::uniform01(5, 1, i);
        double h = k(x, y);
        sum += h;
        sumsq += h * h;
        std::size_t bx = spec.locate(x);
        if (bx != BlockKernelSpec::npos && bx == spec.locate(y)) block_sq[bx] += h * h;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    double se = std::sqrt(var / n);
    CHECK(std::abs(mean) <= 4.0 * se);  // integral of each block vanishes

    // E h^2 1{pair in block n} = a_n^2
    for (std::size_t b = 0; b < 3; ++b) {
        double est = block_sq[b] / n;
        double a2 = p.a[b] * p.a[b];
        double peak = a2 / (p.b[b] * p.b[b]);
        // h^2 is a2/b^2 on an event of probability b^2
        double se_b = std::sqrt(peak * peak * 0.01 / double(n));
        CHECK(std::abs(est - a2) <= 4.0 * se_b);
    }
}

TEST_CASE("identity basis rejects rank above one") {
    CatalogParams p;
    p.lambdas = {1.0, 2.0};
    p.phi = "identity";
    CHECK_THROWS_AS(catalog("finite_rank", p, Distribution::rademacher()), Error);
}

TEST_CASE("legendre and hermite members are orthonormal by quadrature") {
    // Gauss-Legendre style midpoint check at high resolution for the
    // uniform family; Hermite against gaussian moments via quadrature
    // over a wide grid.
    const int grid = 20000;
    for (unsigned a = 1; a <= 3; ++a) {
        for (unsigned b = a; b <= 3; ++b) {
            double acc = 0.0;
            for (int i = 0; i < grid; ++i) {
                double x = (i + 0.5) / grid;
                acc += basis::legendre01(a, x) * basis::legendre01(b, x);
            }
            acc /= grid;
            CHECK(acc == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-6));
        }
    }
    const int g2 = 40000;
    for (unsigned a = 1; a <= 3; ++a) {
        for (unsigned b = a; b <= 3; ++b) {
            double acc = 0.0;
            for (int i = 0; i < g2; ++i) {
                double x = -10.0 + 20.0 * (i + 0.5) / g2;
                double w = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
                acc += basis::hermite_normal(a, x) * basis::hermite_normal(b, x) * w;
            }
            acc *= 20.0 / g2;
            CHECK(acc == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-5));
        }
    }
}

TEST_CASE("block second-moment curve closed form") {
    BlockKernelSpec spec({1.0, 1.0}, {0.5, 0.25});
    // peaks: (1/0.5)^2 = 4 and (1/0.25)^2 = 16
    CHECK(spec.second_moment_curve(2.0) ==
          doctest::Approx(2.0 * 0.25 + 2.0 * 0.0625));  // both unsaturated
    CHECK(spec.second_moment_curve(8.0) == doctest::Approx(1.0 + 8.0 * 0.0625));
    CHECK(spec.second_moment_curve(100.0) == doctest::Approx(2.0));  // both saturated
}
