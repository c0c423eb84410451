#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "ulil/ulil.h"

namespace {

struct DistGuard {
    ulil_dist* p = nullptr;
    ~DistGuard() { ulil_dist_destroy(p); }
};
struct KernelGuard {
    ulil_kernel* p = nullptr;
    ~KernelGuard() { ulil_kernel_destroy(p); }
};

}  // namespace

TEST_CASE("error reporting carries a message and the argument code") {
    ulil_dist* d = nullptr;
    CHECK(ulil_dist_create("cauchy", &d) == ULIL_ERR_ARGUMENT);
    CHECK(std::string(ulil_last_error()).find("cauchy") != std::string::npos);
    CHECK(ulil_dist_create(nullptr, &d) == ULIL_ERR_ARGUMENT);
}

TEST_CASE("sampling through the C surface is deterministic") {
    DistGuard d;
    REQUIRE(ulil_dist_create("rademacher", &d.p) == ULIL_OK);
    double a[8], b[8];
    REQUIRE(ulil_sample_stream(d.p, 42, 0, 8, a) == ULIL_OK);
    REQUIRE(ulil_sample_stream(d.p, 42, 0, 8, b) == ULIL_OK);
    CHECK(std::memcmp(a, b, sizeof a) == 0);
    for (double v : a) CHECK((v == 1.0 || v == -1.0));
    double q = 0.0;
    REQUIRE(ulil_dist_quantile(d.p, 0.75, &q) == ULIL_OK);
    CHECK(q == 1.0);
}

TEST_CASE("discrete laws validate through the C surface") {
    double values[2] = {1.0, 2.0};
    double bad[2] = {0.7, 0.6};
    ulil_dist* d = nullptr;
    CHECK(ulil_dist_create_discrete(values, bad, 2, &d) == ULIL_ERR_ARGUMENT);
    double good[2] = {0.5, 0.5};
    DistGuard g;
    CHECK(ulil_dist_create_discrete(values, good, 2, &g.p) == ULIL_OK);
}

TEST_CASE("kernels evaluate and advertise their expansions") {
    DistGuard d;
    REQUIRE(ulil_dist_create("uniform01", &d.p) == ULIL_OK);
    KernelGuard k;
    double lambdas[2] = {2.0, -1.0};
    REQUIRE(ulil_kernel_create_finite_rank(d.p, lambdas, 2, "auto", 1.0, &k.p) == ULIL_OK);
    CHECK(ulil_kernel_has_separable(k.p) == 1);
    double hxy = 0.0, hyx = 0.0;
    REQUIRE(ulil_kernel_eval(k.p, 0.2, 0.8, &hxy) == ULIL_OK);
    REQUIRE(ulil_kernel_eval(k.p, 0.8, 0.2, &hyx) == ULIL_OK);
    CHECK(hxy == hyx);

    KernelGuard blk;
    double a[3] = {0.5, 0.2, 0.9}, b[3] = {0.1, 0.1, 0.1};
    REQUIRE(ulil_kernel_create_block(d.p, a, b, 3, 1.0, &blk.p) == ULIL_OK);
    double v = 0.0;
    REQUIRE(ulil_kernel_eval(blk.p, 0.01, 0.02, &v) == ULIL_OK);
    CHECK(v == doctest::Approx(5.0));

    KernelGuard dexp;
    REQUIRE(ulil_kernel_create_block_doubleexp(d.p, 1.0, 2.0, 1.0, &dexp.p) == ULIL_OK);
    int trunc = 0;
    REQUIRE(ulil_kernel_truncated_at(dexp.p, &trunc) == ULIL_OK);
    CHECK(trunc > 0);
}

TEST_CASE("pair sums through the C surface match the identity") {
    DistGuard d;
    REQUIRE(ulil_dist_create("rademacher", &d.p) == ULIL_OK);
    KernelGuard k;
    REQUIRE(ulil_kernel_create_product(d.p, 1.0, &k.p) == ULIL_OK);
    double x[64];
    REQUIRE(ulil_sample_stream(d.p, 7, 0, 64, x) == ULIL_OK);
    double s = 0.0;
    for (double v : x) s += v;
    double exact = 0.0, fast = 0.0;
    REQUIRE(ulil_sum_exact(k.p, ULIL_SUM_PLAIN, x, 64, nullptr, 0, nullptr, 0, nullptr, 0,
                           &exact) == ULIL_OK);
    REQUIRE(ulil_sum_separable(k.p, ULIL_SUM_PLAIN, x, 64, nullptr, 0, nullptr, 0, nullptr, 0,
                               &fast) == ULIL_OK);
    CHECK(exact == s * s - 64.0);
    CHECK(fast == doctest::Approx(exact).epsilon(1e-12));
    // missing sign vector is an argument error
    double out = 0.0;
    CHECK(ulil_sum_exact(k.p, ULIL_SUM_RANDOMIZED, x, 64, nullptr, 0, nullptr, 0, nullptr, 0,
                         &out) == ULIL_ERR_ARGUMENT);
}

TEST_CASE("projection handles expose the decomposition") {
    DistGuard d;
    REQUIRE(ulil_dist_create("rademacher", &d.p) == ULIL_OK);
    KernelGuard k;
    REQUIRE(ulil_kernel_create_product(d.p, 1.0, &k.p) == ULIL_OK);
    ulil_projection* p = nullptr;
    REQUIRE(ulil_projection_create(k.p, d.p, 500, 3, &p) == ULIL_OK);
    CHECK(ulil_projection_analytic(p) == 1);
    double mean = 1.0, pi1 = 1.0, pi2 = 0.0;
    CHECK(ulil_projection_mean(p, &mean) == ULIL_OK);
    CHECK(ulil_projection_pi1(p, 0.7, &pi1) == ULIL_OK);
    CHECK(ulil_projection_pi2(p, 1.0, -1.0, &pi2) == ULIL_OK);
    CHECK(mean == 0.0);
    CHECK(pi1 == 0.0);
    CHECK(pi2 == -1.0);
    ulil_projection_destroy(p);
}

TEST_CASE("chaos norm and oracle through the C surface") {
    double eye2[4] = {1.0, 0.0, 0.0, 1.0};
    ulil_chaos_result r;
    double b[2], c[2];
    REQUIRE(ulil_chaos_norm(eye2, 2, 2, 1.0, 16, &r, b, c) == ULIL_OK);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.converged == 1);
    double oracle = 0.0;
    REQUIRE(ulil_chaos_norm_oracle(eye2, 2, 2, 1.0, 0.1, &oracle) == ULIL_OK);
    CHECK(oracle == doctest::Approx(1.0).epsilon(0.02));
    CHECK(ulil_chaos_norm(eye2, 2, 2, -1.0, 16, &r, nullptr, nullptr) == ULIL_ERR_ARGUMENT);
}

TEST_CASE("bound calculators through the C surface") {
    double v = 0.0;
    REQUIRE(ulil_talagrand_bound(1.0, 1.0, 1.0, 1.0, &v) == ULIL_OK);
    CHECK(v == 0.5);
    REQUIRE(ulil_prohorov_bound(1.0, 1.0, 1.0, &v) == ULIL_OK);
    CHECK(v > 0.0);
    CHECK(ulil_bernstein_bound(0.0, 1.0, 1.0, &v) == ULIL_ERR_ARGUMENT);

    double ones[4] = {1.0, 1.0, 1.0, 1.0};
    ulil_latala_result lr;
    REQUIRE(ulil_latala_lower_check(ones, 2, 2, 1.0, 0.05, 1, 0, 1, &lr) == ULIL_OK);
    CHECK(lr.holds == 1);
    double values[16];
    REQUIRE(ulil_chaos_sign_values(ones, 2, 2, values) == ULIL_OK);
    CHECK(values[0] == 4.0);  // all signs -1 on the all-ones matrix
}

TEST_CASE("condition estimators and the report through the C surface") {
    DistGuard d;
    REQUIRE(ulil_dist_create("uniform01", &d.p) == ULIL_OK);
    KernelGuard k;
    double a[3] = {0.5, 0.2, 0.9}, b[3] = {0.1, 0.1, 0.1};
    REQUIRE(ulil_kernel_create_block(d.p, a, b, 3, 1.0, &k.p) == ULIL_OK);

    ulil_opnorm_result on;
    REQUIRE(ulil_operator_norm(k.p, d.p, 100, 1, &on) == ULIL_OK);
    CHECK(on.method == 0);
    CHECK(on.value == 0.9);

    ulil_report* report = nullptr;
    REQUIRE(ulil_certify(k.p, d.p, 20, 2000, 100, 1, &report) == ULIL_OK);
    double pass = 0.0, cond_c = 0.0;
    CHECK(ulil_report_value(report, "canonical.pass", &pass) == ULIL_OK);
    CHECK(ulil_report_value(report, "cond_c.value", &cond_c) == ULIL_OK);
    CHECK(pass == 1.0);
    CHECK(cond_c == 0.9);
    CHECK(ulil_report_value(report, "nonsense", &pass) == ULIL_ERR_ARGUMENT);
    size_t needed = 0;
    CHECK(ulil_report_text(report, nullptr, 0, &needed) == ULIL_OK);
    std::vector<char> buf(needed);
    CHECK(ulil_report_text(report, buf.data(), buf.size(), nullptr) == ULIL_OK);
    CHECK(std::string(buf.data()).find("cond_c.value = 0.9") != std::string::npos);
    ulil_report_destroy(report);
}

TEST_CASE("trajectories and aggregates through the C surface") {
    DistGuard d;
    REQUIRE(ulil_dist_create("uniform01", &d.p) == ULIL_OK);
    KernelGuard k;
    double lambdas[2] = {2.0, -1.0};
    REQUIRE(ulil_kernel_create_finite_rank(d.p, lambdas, 2, "legendre", 1.0, &k.p) == ULIL_OK);

    std::vector<ulil_trajectory*> trajs;
    for (uint64_t seed = 1; seed <= 6; ++seed) {
        ulil_trajectory* t = nullptr;
        REQUIRE(ulil_run_trajectory(k.p, d.p, ULIL_SUM_PLAIN, 1, 10, seed, &t) == ULIL_OK);
        REQUIRE(ulil_trajectory_size(t) == 10);
        ulil_checkpoint row;
        REQUIRE(ulil_trajectory_row(t, 9, &row) == ULIL_OK);
        CHECK(row.k == 10);
        CHECK(row.n == 1024);
        CHECK(ulil_trajectory_overflow(t) == 0);
        trajs.push_back(t);
    }
    ulil_limsup_result ls;
    std::vector<double> per_seed(trajs.size());
    REQUIRE(ulil_limsup_estimate(trajs.data(), trajs.size(), ulil_default_burn_in(10), &ls,
                                 per_seed.data(), nullptr) == ULIL_OK);
    CHECK(ls.median_nl2n > 0.0);

    ulil_limit_set_result lset;
    REQUIRE(ulil_limit_set_estimate(trajs.data(), trajs.size(), 5, k.p, d.p, 2000, 9, &lset,
                                    nullptr, 0) == ULIL_OK);
    CHECK(lset.has_predicted == 1);
    CHECK(lset.predicted_lo == -1.0);
    CHECK(lset.predicted_hi == 2.0);
    std::vector<double> points(lset.point_count);
    REQUIRE(ulil_limit_set_estimate(trajs.data(), trajs.size(), 5, k.p, d.p, 2000, 9, &lset,
                                    points.data(), points.size()) == ULIL_OK);

    double lo = 0.0, hi = 0.0;
    REQUIRE(ulil_numerical_range(k.p, d.p, 2000, 9, &lo, &hi) == ULIL_OK);
    CHECK(lo == -1.0);
    CHECK(hi == 2.0);

    double certified = 0.0, ratio = 0.0;
    int flagged = 0;
    REQUIRE(ulil_sandwich(0.0, 0.0, 0.0, &certified, &ratio, &flagged) == ULIL_OK);
    CHECK(ratio == 1.0);

    for (ulil_trajectory* t : trajs) ulil_trajectory_destroy(t);
}

TEST_CASE("catalog text lists the families") {
    size_t needed = 0;
    REQUIRE(ulil_catalog_text(nullptr, 0, &needed) == ULIL_OK);
    std::vector<char> buf(needed);
    REQUIRE(ulil_catalog_text(buf.data(), buf.size(), nullptr) == ULIL_OK);
    std::string text(buf.data());
    CHECK(text.find("product") != std::string::npos);
    CHECK(text.find("block") != std::string::npos);
}
