#include "doctest.h"

#include <cmath>
#include <vector>

#include "ulil/conditions.hpp"
#include "ulil/errors.hpp"
#include "ulil/rng.hpp"

using namespace ulil;

TEST_CASE("iterated logarithm floors at one") {
    CHECK(iterated_log(0.5) == 1.0);
    CHECK(iterated_log(10.0) == doctest::Approx(std::log(10.0)));
    CHECK(iterated_log2(10.0) == 1.0);  // log log 10 < 1
    CHECK(iterated_log2(1e300) == doctest::Approx(std::log(300.0 * std::log(10.0))));
}

TEST_CASE("geometric grid endpoints and monotonicity") {
    auto g = geometric_grid(10.0, 1e12, 50);
    CHECK(g.front() == 10.0);
    CHECK(g.back() == 1e12);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK_THROWS_AS(geometric_grid(10.0, 5.0, 10), Error);
}

TEST_CASE("truncated moment curve, analytic product kernel") {
    Kernel k = catalog("product", {}, Distribution::rademacher());
    auto grid = geometric_grid(10.0, 1e300, 200);
    TruncatedMomentCurve c =
        truncated_moment_curve(k, Distribution::rademacher(), grid, 0, 1);
    CHECK(c.analytic);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(c.values[i] == 1.0);  // E X^2 Y^2 = 1, saturated past u = 1
        CHECK(c.ratio[i] == doctest::Approx(1.0 / iterated_log2(grid[i])));
    }
    // finite second moment: the normalized curve decays toward zero as
    // the grid extends (log-log slowly)
    CHECK(c.limsup_estimate < 0.25);
    auto shorter = geometric_grid(10.0, 1e100, 200);
    TruncatedMomentCurve c100 =
        truncated_moment_curve(k, Distribution::rademacher(), shorter, 0, 1);
    CHECK(c.limsup_estimate < c100.limsup_estimate);
}

TEST_CASE("truncated moment curve, zero kernel") {
    Kernel k = catalog("zero", {}, Distribution::uniform01());
    auto grid = geometric_grid(10.0, 1e20, 30);
    TruncatedMomentCurve c = truncated_moment_curve(k, Distribution::uniform01(), grid, 0, 1);
    for (double v : c.values) CHECK(v == 0.0);
    CHECK(c.limsup_estimate == 0.0);
}

TEST_CASE("truncated moment curve, Monte Carlo path") {
    // custom kernel without metadata forces sampling; compare against the
    // known curve of the product kernel under fair signs
    Kernel k("custom_product", [](double x, double y) { return x * y; });
    auto grid = geometric_grid(10.0, 1e6, 12);
    TruncatedMomentCurve c =
        truncated_moment_curve(k, Distribution::rademacher(), grid, 20000, 3);
    CHECK_FALSE(c.analytic);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(c.values[i] == doctest::Approx(1.0).epsilon(1e-12));  // x^2 y^2 = 1 exactly
        if (i) CHECK(c.values[i] >= c.values[i - 1]);               // shared sample
    }
    CHECK_THROWS_AS(truncated_moment_curve(k, Distribution::rademacher(), grid, 100, 3), Error);
    std::vector<double> bad = {5.0, 20.0};
    CHECK_THROWS_AS(truncated_moment_curve(k, Distribution::rademacher(), bad, 2000, 3), Error);
    std::vector<double> unsorted = {100.0, 20.0};
    CHECK_THROWS_AS(truncated_moment_curve(k, Distribution::rademacher(), unsorted, 2000, 3),
                    Error);
}

TEST_CASE("analytic and Monte Carlo curves agree within four standard errors") {
    CatalogParams p;
    p.a = {0.5, 0.2, 0.9};
    p.b = {0.1, 0.1, 0.1};
    Kernel blk = catalog("block", p, Distribution::uniform01());
    Kernel raw("custom_block", [spec = *blk.block()](double x, double y) { return spec.eval(x, y); });
    auto grid = geometric_grid(10.0, 1e4, 8);
    TruncatedMomentCurve analytic =
        truncated_moment_curve(blk, Distribution::uniform01(), grid, 0, 1);
    TruncatedMomentCurve mc =
        truncated_moment_curve(raw, Distribution::uniform01(), grid, 200000, 17);
    REQUIRE(analytic.analytic);
    REQUIRE_FALSE(mc.analytic);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(analytic.values[i] - mc.values[i]) <= 4.0 * mc.se[i] + 1e-12);
}

TEST_CASE("operator norm: analytic block value and empirical product value") {
    CatalogParams p;
    p.a = {0.5, 0.2, 0.9};
    p.b = {0.1, 0.1, 0.1};
    Kernel blk = catalog("block", p, Distribution::uniform01());
    OperatorNormEstimate a = operator_norm(blk, Distribution::uniform01(), 100, 1);
    CHECK(a.method == OperatorNormMethod::analytic);
    CHECK(a.value == 0.9);

    // product kernel sample matrix is exactly rank one with norm m
    Kernel raw("custom_product", [](double x, double y) { return x * y; });
    OperatorNormEstimate e =
        operator_norm_empirical(raw, Distribution::rademacher(), 200, 2, 16);
    CHECK(e.method == OperatorNormMethod::svd_empirical);
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(e.lo <= e.value);
    CHECK(e.hi >= e.value);
    CHECK(e.bootstrap_resamples == 16);

    Kernel z = catalog("zero", {}, Distribution::uniform01());
    OperatorNormEstimate zn = operator_norm_empirical(z, Distribution::uniform01(), 60, 1, 4);
    CHECK(zn.value == 0.0);

    CHECK_THROWS_AS(operator_norm_empirical(raw, Distribution::rademacher(), 10, 1, 0), Error);
}

TEST_CASE("power iteration value is invariant under permutation of the sample matrix") {
    ChaosMatrix m(40, 40);
    for (std::size_t i = 0; i < m.entries.size(); ++i)
        m.entries[i] = rng::gaussian(31, 0, i);
    double base = power_iteration_sigma_max(m, 1e-10, 10000, 7);
    ChaosMatrix perm(40, 40);
    for (std::size_t i = 0; i < 40; ++i)
        for (std::size_t j = 0; j < 40; ++j)
            perm.at((i + 11) % 40, (j + 29) % 40) = m.at(i, j);
    double permuted = power_iteration_sigma_max(perm, 1e-10, 10000, 7);
    CHECK(permuted == doctest::Approx(base).epsilon(1e-8));
}

TEST_CASE("schur bound dominates and hits equality cases") {
    // |2 x y| integrates to 2 under fair signs
    CatalogParams p2;
    p2.scale = 2.0;
    Kernel twice = catalog("product", p2, Distribution::rademacher());
    SchurBound s = schur_bound(twice, Distribution::rademacher(), 1000, 1);
    CHECK(s.bound == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.estimate_only);

    Kernel constant("constant_one", [](double, double) { return 1.0; });
    SchurBound c = schur_bound(constant, Distribution::uniform01(), 500, 1);
    CHECK(c.bound == doctest::Approx(1.0).epsilon(1e-12));

    // dominates the certified norm on catalog kernels
    Kernel prod = catalog("product", {}, Distribution::rademacher());
    OperatorNormEstimate on = operator_norm(prod, Distribution::rademacher(), 200, 3);
    SchurBound sb = schur_bound(prod, Distribution::rademacher(), 1000, 3);
    CHECK(sb.bound >= on.value - 1e-9);

    CHECK_THROWS_AS(schur_bound(prod, Distribution::rademacher(), 50, 1), Error);
}

TEST_CASE("schur bound dominates the empirical norm across the catalog") {
    Distribution uni = Distribution::uniform01();
    Distribution rad = Distribution::rademacher();
    CatalogParams blockp;
    blockp.a = {0.5, 0.2, 0.9};
    blockp.b = {0.1, 0.1, 0.1};
    CatalogParams rank2;
    rank2.lambdas = {2.0, -1.0};
    struct Case {
        Kernel kernel;
        Distribution dist;
    };
    std::vector<Case> cases;
    cases.push_back({catalog("product", {}, rad), rad});
    cases.push_back({catalog("zero", {}, uni), uni});
    cases.push_back({catalog("block", blockp, uni), uni});
    cases.push_back({catalog("finite_rank", rank2, uni), uni});
    for (const Case& c : cases) {
        OperatorNormEstimate on = operator_norm_empirical(c.kernel, c.dist, 400, 3, 32);
        SchurBound sb = schur_bound(c.kernel, c.dist, 4000, 3);
        double bootstrap_se = (on.hi - on.lo) / 4.0;
        CHECK(sb.bound >= on.value - 3.0 * bootstrap_se - 1e-9);
    }
}

TEST_CASE("truncation profile: product kernel conditional moments") {
    Kernel raw("custom_product", [](double x, double y) { return x * y; });
    std::vector<double> probes = {-1.0, 0.5, 1.0, 2.0};
    TruncationProfile prof =
        truncation_profile(raw, Distribution::rademacher(), 1, 4, probes, 2000, 1);
    for (std::size_t li = 0; li < prof.n.size(); ++li)
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            // min(x^2 y^2, 2^(4n)) = x^2 for these probes
            CHECK(prof.f[li][pi] == doctest::Approx(probes[pi] * probes[pi]).epsilon(1e-12));
            // the truncation event is empty once 2^n n^2 exceeds |h| = |x|
            int n = prof.n[li];
            if (std::ldexp(1.0, n) * n * n > std::abs(probes[pi]))
                CHECK(prof.g[li][pi] == 0.0);
        }
    CHECK_THROWS_AS(truncation_profile(raw, Distribution::rademacher(), 0, 4, probes, 2000, 1),
                    Error);
    CHECK_THROWS_AS(truncation_profile(raw, Distribution::rademacher(), 1, 65, probes, 2000, 1),
                    Error);
}

TEST_CASE("truncation profile: block closed forms against quadrature") {
    CatalogParams p;
    p.a = {1.0, 2.0};
    p.b = {0.5, 0.25};
    Kernel blk = catalog("block", p, Distribution::uniform01());
    std::vector<double> probes = {0.1, 0.6, 0.9};
    TruncationProfile prof =
        truncation_profile(blk, Distribution::uniform01(), 2, 4, probes, 0, 1);
    CHECK(prof.analytic);

    // midpoint quadrature over [0,1]^2, aligned with the block edges
    const int g = 400;
    const BlockKernelSpec& spec = *blk.block();
    for (std::size_t li = 0; li < prof.n.size(); ++li) {
        int n = prof.n[li];
        double clow = std::ldexp(1.0, n) / (double(n) * double(n));
        double chigh = std::ldexp(1.0, n) * double(n) * double(n);
        double acc = 0.0;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                double h = spec.eval((i + 0.5) / g, (j + 0.5) / g);
                double ah = std::abs(h);
                if (ah > clow && ah <= chigh) acc += h * h;
            }
        acc /= double(g) * double(g);
        CHECK(prof.c[li] == doctest::Approx(acc).epsilon(1e-10));
        // conditional truncated moments per probe
        double cap = std::ldexp(1.0, 4 * n);
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            double facc = 0.0;
            for (int j = 0; j < g; ++j) {
                double h = spec.eval(probes[pi], (j + 0.5) / g);
                facc += std::min(h * h, cap);
            }
            CHECK(prof.f[li][pi] == doctest::Approx(facc / g).epsilon(1e-10));
        }
    }
}

TEST_CASE("certify: product kernel under fair signs") {
    Kernel k = catalog("product", {}, Distribution::rademacher());
    CertifyConfig cfg;
    cfg.mc_samples = 4000;
    cfg.operator_m = 200;
    ConditionReport r = certify(k, Distribution::rademacher(), cfg);
    CHECK(r.canonical == ConditionStatus::pass);
    CHECK(r.canonical_certified);
    CHECK(r.cond_b_limsup < 0.25);  // 1 / L2(u) at the top of the grid
    CHECK(r.cond_c_value == 1.0);
    CHECK(r.to_text().find("canonical.status = pass") != std::string::npos);
}

TEST_CASE("certify: block kernel carries its parameters") {
    CatalogParams p;
    p.a = {0.5, 0.2, 0.9};
    p.b = {0.1, 0.1, 0.1};
    Kernel k = catalog("block", p, Distribution::uniform01());
    CertifyConfig cfg;
    cfg.mc_samples = 2000;
    cfg.operator_m = 100;
    ConditionReport r = certify(k, Distribution::uniform01(), cfg);
    CHECK(r.canonical == ConditionStatus::pass);
    CHECK(r.cond_c_value == 0.9);
    CHECK(r.cond_b_certified);
}

TEST_CASE("certify: x + y under a centered law fails canonicality") {
    Distribution d = Distribution::discrete({-1.0, 0.0, 1.0}, {0.3, 0.4, 0.3});
    Kernel k = catalog("sum", {}, d);
    CertifyConfig cfg;
    cfg.mc_samples = 2000;
    cfg.operator_m = 100;
    ConditionReport r = certify(k, d, cfg);
    CHECK(r.canonical == ConditionStatus::fail);  // E_X (X + y) = y != 0
}

TEST_CASE("certify: zero kernel passes with zeros") {
    Kernel k = catalog("zero", {}, Distribution::uniform01());
    CertifyConfig cfg;
    cfg.mc_samples = 2000;
    cfg.operator_m = 100;
    ConditionReport r = certify(k, Distribution::uniform01(), cfg);
    CHECK(r.canonical == ConditionStatus::pass);
    CHECK(r.cond_b_limsup == 0.0);
    CHECK(r.cond_c_value == 0.0);
}

TEST_CASE("scaling: analytic quantities scale linearly and quadratically") {
    CatalogParams p3;
    p3.scale = 3.0;
    Kernel k3 = catalog("product", p3, Distribution::rademacher());
    CHECK(*k3.analytic().operator_norm == 3.0);
    auto grid = geometric_grid(10.0, 1e20, 20);
    TruncatedMomentCurve c1 = truncated_moment_curve(
        catalog("product", {}, Distribution::rademacher()), Distribution::rademacher(), grid, 0, 1);
    TruncatedMomentCurve c3 =
        truncated_moment_curve(k3, Distribution::rademacher(), grid, 0, 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        // h -> 3h multiplies the saturated part by 9 exactly
        CHECK(c3.values[i] == doctest::Approx(9.0 * c1.values[i]));
    }

    CatalogParams blk;
    blk.a = {0.5, 0.2, 0.9};
    blk.b = {0.1, 0.1, 0.1};
    blk.scale = 2.0;
    Kernel b2 = catalog("block", blk, Distribution::uniform01());
    CHECK(*b2.analytic().operator_norm == doctest::Approx(1.8));
}
