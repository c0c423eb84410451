#include "ulil/ulil.h"

#include <cstring>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "ulil/bounds.hpp"
#include "ulil/chaos.hpp"
#include "ulil/conditions.hpp"
#include "ulil/distribution.hpp"
#include "ulil/errors.hpp"
#include "ulil/hoeffding.hpp"
#include "ulil/kernel.hpp"
#include "ulil/simulate.hpp"

struct ulil_dist {
    ulil::Distribution value;
};
struct ulil_kernel {
    ulil::Kernel value;
};
struct ulil_projection {
    ulil::ProjectionEstimate value;
};
struct ulil_report {
    ulil::ConditionReport value;
};
struct ulil_trajectory {
    ulil::TrajectoryResult value;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
ulil_status guard(Fn&& fn) {
    try {
        fn();
        return ULIL_OK;
    } catch (const ulil::Error& e) {
        g_last_error = e.what();
        return e.code() == ulil::ErrorCode::bad_argument ? ULIL_ERR_ARGUMENT : ULIL_ERR_NUMERIC;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return ULIL_ERR_NUMERIC;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ULIL_ERR_NUMERIC;
    }
}

void require(bool ok, const char* what) {
    if (!ok) ulil::throw_bad_argument(what);
}

ulil::SumVariant to_variant(ulil_sum_variant v) {
    switch (v) {
        case ULIL_SUM_PLAIN: return ulil::SumVariant::plain_offdiag;
        case ULIL_SUM_RANDOMIZED: return ulil::SumVariant::randomized;
        case ULIL_SUM_DECOUPLED: return ulil::SumVariant::decoupled;
        case ULIL_SUM_DECOUPLED_RANDOMIZED: return ulil::SumVariant::decoupled_randomized;
    }
    ulil::throw_bad_argument("unknown sum variant code");
}

ulil::ChaosMatrix to_matrix(const double* entries, size_t rows, size_t cols) {
    require(entries != nullptr && rows > 0 && cols > 0, "matrix must be nonempty");
    ulil::ChaosMatrix m(rows, cols);
    std::memcpy(m.entries.data(), entries, rows * cols * sizeof(double));
    return m;
}

ulil_status copy_text(const std::string& text, char* buf, size_t cap, size_t* needed) {
    if (needed) *needed = text.size() + 1;
    if (!buf) return ULIL_OK;
    if (cap == 0) {
        g_last_error = "buffer too small";
        return ULIL_ERR_ARGUMENT;
    }
    size_t n = text.size() < cap - 1 ? text.size() : cap - 1;
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
    return ULIL_OK;
}

void fill_opnorm(const ulil::OperatorNormEstimate& e, ulil_opnorm_result* out) {
    out->value = e.value;
    out->method = static_cast<int>(e.method);
    out->sample_m = e.sample_m;
    out->lo = e.lo;
    out->hi = e.hi;
    out->bootstrap_resamples = e.bootstrap_resamples;
}

std::vector<ulil::TrajectoryResult> collect(const ulil_trajectory* const* trajectories,
                                            size_t count) {
    require(trajectories != nullptr && count > 0, "need at least one trajectory");
    std::vector<ulil::TrajectoryResult> rs;
    rs.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        require(trajectories[i] != nullptr, "null trajectory");
        rs.push_back(trajectories[i]->value);
    }
    return rs;
}

}  // namespace

extern "C" {

const char* ulil_last_error(void) { return g_last_error.c_str(); }

const char* ulil_version(void) { return "0.1.0"; }

ulil_status ulil_dist_create(const char* name, ulil_dist** out) {
    return guard([&] {
        require(name && out, "dist_create: null argument");
        *out = new ulil_dist{ulil::Distribution::from_name(name)};
    });
}

ulil_status ulil_dist_create_discrete(const double* values, const double* weights, size_t n,
                                      ulil_dist** out) {
    return guard([&] {
        require(values && weights && out, "dist_create_discrete: null argument");
        *out = new ulil_dist{ulil::Distribution::discrete(
            std::vector<double>(values, values + n), std::vector<double>(weights, weights + n))};
    });
}

void ulil_dist_destroy(ulil_dist* d) { delete d; }

ulil_status ulil_sample_stream(const ulil_dist* d, uint64_t seed, uint64_t stream, size_t n,
                               double* out) {
    return guard([&] {
        require(d && (out || n == 0), "sample_stream: null argument");
        for (size_t i = 0; i < n; ++i) out[i] = d->value.sample(seed, stream, i);
    });
}

ulil_status ulil_dist_quantile(const ulil_dist* d, double p, double* out) {
    return guard([&] {
        require(d && out, "dist_quantile: null argument");
        *out = d->value.quantile(p);
    });
}

ulil_status ulil_kernel_create_product(const ulil_dist* d, double scale, ulil_kernel** out) {
    return guard([&] {
        require(d && out, "kernel_create: null argument");
        ulil::CatalogParams params;
        params.scale = scale;
        *out = new ulil_kernel{ulil::catalog("product", params, d->value)};
    });
}

ulil_status ulil_kernel_create_sum(const ulil_dist* d, double scale, ulil_kernel** out) {
    return guard([&] {
        require(d && out, "kernel_create: null argument");
        ulil::CatalogParams params;
        params.scale = scale;
        *out = new ulil_kernel{ulil::catalog("sum", params, d->value)};
    });
}

ulil_status ulil_kernel_create_zero(const ulil_dist* d, ulil_kernel** out) {
    return guard([&] {
        require(d && out, "kernel_create: null argument");
        *out = new ulil_kernel{ulil::catalog("zero", {}, d->value)};
    });
}

ulil_status ulil_kernel_create_block(const ulil_dist* d, const double* a, const double* b,
                                     size_t blocks, double scale, ulil_kernel** out) {
    return guard([&] {
        require(d && a && b && out, "kernel_create_block: null argument");
        ulil::CatalogParams params;
        params.a.assign(a, a + blocks);
        params.b.assign(b, b + blocks);
        params.scale = scale;
        *out = new ulil_kernel{ulil::catalog("block", params, d->value)};
    });
}

ulil_status ulil_kernel_create_block_doubleexp(const ulil_dist* d, double a, double b,
                                               double scale, ulil_kernel** out) {
    return guard([&] {
        require(d && out, "kernel_create_block_doubleexp: null argument");
        ulil::CatalogParams params;
        params.de_a = a;
        params.de_b = b;
        params.scale = scale;
        *out = new ulil_kernel{ulil::catalog("block_doubleexp", params, d->value)};
    });
}

ulil_status ulil_kernel_create_finite_rank(const ulil_dist* d, const double* lambdas, size_t rank,
                                           const char* phi_family, double scale,
                                           ulil_kernel** out) {
    return guard([&] {
        require(d && out && (lambdas || rank == 0), "kernel_create_finite_rank: null argument");
        ulil::CatalogParams params;
        params.lambdas.assign(lambdas, lambdas + rank);
        params.phi = phi_family ? phi_family : "auto";
        params.scale = scale;
        *out = new ulil_kernel{ulil::catalog("finite_rank", params, d->value)};
    });
}

void ulil_kernel_destroy(ulil_kernel* k) { delete k; }

ulil_status ulil_kernel_eval(const ulil_kernel* k, double x, double y, double* out) {
    return guard([&] {
        require(k && out, "kernel_eval: null argument");
        *out = k->value(x, y);
    });
}

ulil_status ulil_kernel_truncated_at(const ulil_kernel* k, int* out) {
    return guard([&] {
        require(k && out, "kernel_truncated_at: null argument");
        *out = k->value.truncated_at();
    });
}

int ulil_kernel_has_separable(const ulil_kernel* k) {
    return k && k->value.has_separable() ? 1 : 0;
}

ulil_status ulil_catalog_text(char* buf, size_t cap, size_t* needed) {
    std::string text;
    text += "product        h(x,y) = x y; rank-1 expansion; norm = E X^2\n";
    text += "sum            h(x,y) = x + y; not canonical unless degenerate\n";
    text += "zero           h = 0\n";
    text += "block          indicator blocks on [0,1]: (a_n/b_n) I_n(x) I_n(y); norm = sup |a_n|\n";
    text += "block_doubleexp  a_n = a, b_n = exp(-exp(a^2 n / b)); truncated-moment limsup = b\n";
    text += "finite_rank    sum_m lambda_m phi_m(x) phi_m(y) over an orthonormal basis\n";
    return copy_text(text, buf, cap, needed);
}

ulil_status ulil_sum_exact(const ulil_kernel* k, ulil_sum_variant variant, const double* x,
                           size_t nx, const double* y, size_t ny, const double* eps, size_t neps,
                           const double* eps2, size_t neps2, double* out) {
    return guard([&] {
        require(k && out && (x || nx == 0), "sum_exact: null argument");
        *out = ulil::sum_exact(k->value, to_variant(variant), std::span<const double>(x, nx),
                               std::span<const double>(y, y ? ny : 0),
                               std::span<const double>(eps, eps ? neps : 0),
                               std::span<const double>(eps2, eps2 ? neps2 : 0));
    });
}

ulil_status ulil_sum_separable(const ulil_kernel* k, ulil_sum_variant variant, const double* x,
                               size_t nx, const double* y, size_t ny, const double* eps,
                               size_t neps, const double* eps2, size_t neps2, double* out) {
    return guard([&] {
        require(k && out && (x || nx == 0), "sum_separable: null argument");
        *out = ulil::sum_separable(k->value, to_variant(variant), std::span<const double>(x, nx),
                                   std::span<const double>(y, y ? ny : 0),
                                   std::span<const double>(eps, eps ? neps : 0),
                                   std::span<const double>(eps2, eps2 ? neps2 : 0));
    });
}

ulil_status ulil_projection_create(const ulil_kernel* k, const ulil_dist* d, size_t m,
                                   uint64_t seed, ulil_projection** out) {
    return guard([&] {
        require(k && d && out, "projection_create: null argument");
        *out = new ulil_projection{ulil::project(k->value, d->value, m, seed)};
    });
}

void ulil_projection_destroy(ulil_projection* p) { delete p; }

ulil_status ulil_projection_mean(const ulil_projection* p, double* out) {
    return guard([&] {
        require(p && out, "projection_mean: null argument");
        *out = p->value.mean_h();
    });
}

ulil_status ulil_projection_pi1(const ulil_projection* p, double x, double* out) {
    return guard([&] {
        require(p && out, "projection_pi1: null argument");
        *out = p->value.pi1(x);
    });
}

ulil_status ulil_projection_pi2(const ulil_projection* p, double x, double y, double* out) {
    return guard([&] {
        require(p && out, "projection_pi2: null argument");
        *out = p->value.pi2(x, y);
    });
}

int ulil_projection_analytic(const ulil_projection* p) {
    return p && p->value.analytic() ? 1 : 0;
}

ulil_status ulil_chaos_norm(const double* entries, size_t rows, size_t cols, double t,
                            int restarts, ulil_chaos_result* out, double* b_out, double* c_out) {
    return guard([&] {
        require(out != nullptr, "chaos_norm: null result");
        ulil::ChaosNormResult r = ulil::chaos_norm(to_matrix(entries, rows, cols), t, restarts);
        out->value = r.value;
        out->restarts_used = r.restarts_used;
        out->converged = r.converged ? 1 : 0;
        if (b_out) std::memcpy(b_out, r.b.data(), rows * sizeof(double));
        if (c_out) std::memcpy(c_out, r.c.data(), cols * sizeof(double));
    });
}

ulil_status ulil_chaos_norm_oracle(const double* entries, size_t rows, size_t cols, double t,
                                   double grid_step, double* out) {
    return guard([&] {
        require(out != nullptr, "chaos_norm_oracle: null result");
        *out = ulil::chaos_norm_oracle(to_matrix(entries, rows, cols), t, grid_step);
    });
}

ulil_status ulil_talagrand_bound(double t, double u, double v, double k, double* out) {
    return guard([&] {
        require(out != nullptr, "talagrand_bound: null result");
        *out = ulil::talagrand_bound(t, u, v, k);
    });
}

ulil_status ulil_talagrand_bound_weak_variance(double t, double u, double sigma2, double ez_abs,
                                               double k, double* out) {
    return guard([&] {
        require(out != nullptr, "talagrand_bound: null result");
        *out = ulil::talagrand_bound_weak_variance(t, u, sigma2, ez_abs, k);
    });
}

ulil_status ulil_prohorov_bound(double t, double u, double sigma2, double* out) {
    return guard([&] {
        require(out != nullptr, "prohorov_bound: null result");
        *out = ulil::prohorov_bound(t, u, sigma2);
    });
}

ulil_status ulil_bernstein_bound(double t, double u, double sigma2, double* out) {
    return guard([&] {
        require(out != nullptr, "bernstein_bound: null result");
        *out = ulil::bernstein_bound(t, u, sigma2);
    });
}

ulil_status ulil_latala_lower_check(const double* entries, size_t rows, size_t cols, double t,
                                    double c, int exhaustive, size_t samples, uint64_t seed,
                                    ulil_latala_result* out) {
    return guard([&] {
        require(out != nullptr, "latala_lower_check: null result");
        ulil::LatalaCheck r = ulil::latala_lower_check(
            to_matrix(entries, rows, cols), t, c,
            exhaustive ? ulil::LatalaMode::exhaustive : ulil::LatalaMode::monte_carlo, samples,
            seed);
        out->probability = r.probability;
        out->threshold = r.threshold;
        out->se = r.se;
        out->holds = r.holds ? 1 : 0;
    });
}

ulil_status ulil_chaos_sign_values(const double* entries, size_t rows, size_t cols, double* out) {
    return guard([&] {
        require(out != nullptr, "chaos_sign_values: null result");
        std::vector<double> values = ulil::chaos_sign_values(to_matrix(entries, rows, cols));
        std::memcpy(out, values.data(), values.size() * sizeof(double));
    });
}

ulil_status ulil_truncated_moment_curve(const ulil_kernel* k, const ulil_dist* d, const double* u,
                                        size_t n, size_t mc_samples, uint64_t seed, double* values,
                                        double* se, double* ratio, double* limsup, int* analytic) {
    return guard([&] {
        require(k && d && u, "truncated_moment_curve: null argument");
        ulil::TruncatedMomentCurve curve = ulil::truncated_moment_curve(
            k->value, d->value, std::span<const double>(u, n), mc_samples, seed);
        if (values) std::memcpy(values, curve.values.data(), n * sizeof(double));
        if (se) std::memcpy(se, curve.se.data(), n * sizeof(double));
        if (ratio) std::memcpy(ratio, curve.ratio.data(), n * sizeof(double));
        if (limsup) *limsup = curve.limsup_estimate;
        if (analytic) *analytic = curve.analytic ? 1 : 0;
    });
}

ulil_status ulil_operator_norm(const ulil_kernel* k, const ulil_dist* d, size_t m, uint64_t seed,
                               ulil_opnorm_result* out) {
    return guard([&] {
        require(k && d && out, "operator_norm: null argument");
        fill_opnorm(ulil::operator_norm(k->value, d->value, m, seed), out);
    });
}

ulil_status ulil_operator_norm_empirical(const ulil_kernel* k, const ulil_dist* d, size_t m,
                                         uint64_t seed, int bootstrap, ulil_opnorm_result* out) {
    return guard([&] {
        require(k && d && out, "operator_norm: null argument");
        fill_opnorm(ulil::operator_norm_empirical(k->value, d->value, m, seed, bootstrap), out);
    });
}

ulil_status ulil_schur_bound(const ulil_kernel* k, const ulil_dist* d, size_t probe_m,
                             uint64_t seed, double* bound) {
    return guard([&] {
        require(k && d && bound, "schur_bound: null argument");
        *bound = ulil::schur_bound(k->value, d->value, probe_m, seed).bound;
    });
}

ulil_status ulil_truncation_profile(const ulil_kernel* k, const ulil_dist* d, int n_lo, int n_hi,
                                    const double* probes, size_t n_probes, size_t mc_samples,
                                    uint64_t seed, double* f, double* g, double* c) {
    return guard([&] {
        require(k && d && probes, "truncation_profile: null argument");
        ulil::TruncationProfile profile = ulil::truncation_profile(
            k->value, d->value, n_lo, n_hi, std::span<const double>(probes, n_probes), mc_samples,
            seed);
        const size_t levels = profile.n.size();
        for (size_t li = 0; li < levels; ++li) {
            if (f)
                std::memcpy(f + li * n_probes, profile.f[li].data(), n_probes * sizeof(double));
            if (g)
                std::memcpy(g + li * n_probes, profile.g[li].data(), n_probes * sizeof(double));
        }
        if (c) std::memcpy(c, profile.c.data(), levels * sizeof(double));
    });
}

ulil_status ulil_certify(const ulil_kernel* k, const ulil_dist* d, size_t probe_count,
                         size_t mc_samples, size_t operator_m, uint64_t seed, ulil_report** out) {
    return guard([&] {
        require(k && d && out, "certify: null argument");
        ulil::CertifyConfig config;
        if (probe_count) config.probe_count = probe_count;
        if (mc_samples) config.mc_samples = mc_samples;
        if (operator_m) config.operator_m = operator_m;
        config.seed = seed;
        *out = new ulil_report{ulil::certify(k->value, d->value, config)};
    });
}

void ulil_report_destroy(ulil_report* r) { delete r; }

ulil_status ulil_report_value(const ulil_report* r, const char* key, double* out) {
    return guard([&] {
        require(r && key && out, "report_value: null argument");
        const ulil::ConditionReport& rep = r->value;
        std::string k(key);
        if (k == "canonical.pass")
            *out = rep.canonical == ulil::ConditionStatus::pass ? 1.0 : 0.0;
        else if (k == "canonical.certified")
            *out = rep.canonical_certified ? 1.0 : 0.0;
        else if (k == "canonical.max_abs")
            *out = rep.canonical_max_abs;
        else if (k == "canonical.threshold")
            *out = rep.canonical_threshold;
        else if (k == "cond_b.limsup")
            *out = rep.cond_b_limsup;
        else if (k == "cond_b.certified")
            *out = rep.cond_b_certified ? 1.0 : 0.0;
        else if (k == "cond_b.grid_top")
            *out = rep.cond_b_grid_top;
        else if (k == "cond_c.value")
            *out = rep.cond_c_value;
        else if (k == "cond_c.method")
            *out = static_cast<double>(rep.cond_c_method);
        else if (k == "cond_c.ci_lo")
            *out = rep.cond_c_lo;
        else if (k == "cond_c.ci_hi")
            *out = rep.cond_c_hi;
        else if (k == "schur.upper")
            *out = rep.schur_upper;
        else
            ulil::throw_bad_argument("report_value: unknown key " + k);
    });
}

ulil_status ulil_report_text(const ulil_report* r, char* buf, size_t cap, size_t* needed) {
    if (!r) {
        g_last_error = "report_text: null report";
        return ULIL_ERR_ARGUMENT;
    }
    return copy_text(r->value.to_text(), buf, cap, needed);
}

ulil_status ulil_run_trajectory(const ulil_kernel* k, const ulil_dist* d,
                                ulil_sum_variant variant, int engine, int max_exponent,
                                uint64_t seed, ulil_trajectory** out) {
    return guard([&] {
        require(k && d && out, "run_trajectory: null argument");
        require(engine == 0 || engine == 1, "run_trajectory: engine must be 0 or 1");
        ulil::TrajectoryConfig config;
        config.variant = to_variant(variant);
        config.engine = engine == 0 ? ulil::Engine::generic : ulil::Engine::separable;
        config.max_exponent = max_exponent;
        *out = new ulil_trajectory{ulil::run_trajectory(k->value, d->value, config, seed)};
    });
}

void ulil_trajectory_destroy(ulil_trajectory* t) { delete t; }

size_t ulil_trajectory_size(const ulil_trajectory* t) { return t ? t->value.rows.size() : 0; }

ulil_status ulil_trajectory_row(const ulil_trajectory* t, size_t index, ulil_checkpoint* out) {
    return guard([&] {
        require(t && out, "trajectory_row: null argument");
        require(index < t->value.rows.size(), "trajectory_row: index out of range");
        const ulil::CheckpointRow& row = t->value.rows[index];
        out->k = row.k;
        out->n = row.n;
        out->raw_sum = row.raw_sum;
        out->norm_nl2n = row.norm_nl2n;
        out->norm_2nl2n = row.norm_2nl2n;
        out->intrablock_sup = row.intrablock_sup;
    });
}

int ulil_trajectory_overflow(const ulil_trajectory* t) {
    return t && t->value.overflow ? 1 : 0;
}

int ulil_default_burn_in(int max_exponent) { return ulil::default_burn_in(max_exponent); }

ulil_status ulil_limsup_estimate(const ulil_trajectory* const* trajectories, size_t count,
                                 int burn_in, ulil_limsup_result* out, double* per_seed_nl2n,
                                 double* per_seed_2nl2n) {
    return guard([&] {
        require(out != nullptr, "limsup_estimate: null result");
        std::vector<ulil::TrajectoryResult> rs = collect(trajectories, count);
        ulil::LimsupStats stats = ulil::limsup_estimate(rs, burn_in);
        out->median_nl2n = stats.median_nl2n;
        out->iqr_nl2n = stats.iqr_nl2n;
        out->median_2nl2n = stats.median_2nl2n;
        out->iqr_2nl2n = stats.iqr_2nl2n;
        if (per_seed_nl2n)
            std::memcpy(per_seed_nl2n, stats.per_seed_nl2n.data(), count * sizeof(double));
        if (per_seed_2nl2n)
            std::memcpy(per_seed_2nl2n, stats.per_seed_2nl2n.data(), count * sizeof(double));
    });
}

ulil_status ulil_limit_set_estimate(const ulil_trajectory* const* trajectories, size_t count,
                                    int burn_in, const ulil_kernel* k, const ulil_dist* d,
                                    size_t gram_m, uint64_t gram_seed,
                                    ulil_limit_set_result* out, double* points,
                                    size_t points_cap) {
    return guard([&] {
        require(out && k && d, "limit_set_estimate: null argument");
        std::vector<ulil::TrajectoryResult> rs = collect(trajectories, count);
        ulil::LimitSetEstimate est =
            ulil::limit_set_estimate(rs, burn_in, k->value, d->value, gram_m, gram_seed);
        out->hull_lo = est.hull_lo;
        out->hull_hi = est.hull_hi;
        out->has_predicted = est.has_predicted ? 1 : 0;
        out->predicted_lo = est.predicted_lo;
        out->predicted_hi = est.predicted_hi;
        out->point_count = est.points.size();
        if (points) {
            require(points_cap >= est.points.size(), "limit_set_estimate: points buffer too small");
            std::memcpy(points, est.points.data(), est.points.size() * sizeof(double));
        }
    });
}

ulil_status ulil_numerical_range(const ulil_kernel* k, const ulil_dist* d, size_t gram_m,
                                 uint64_t seed, double* lo, double* hi) {
    return guard([&] {
        require(k && d && lo && hi, "numerical_range: null argument");
        auto range = ulil::numerical_range(k->value, d->value, gram_m, seed);
        *lo = range.first;
        *hi = range.second;
    });
}

ulil_status ulil_sandwich(double operator_norm, double trunc_limsup, double empirical,
                          double* certified, double* ratio, int* flagged) {
    return guard([&] {
        require(certified && ratio && flagged, "sandwich: null argument");
        ulil::ConditionReport report;
        report.cond_c_value = operator_norm;
        report.cond_b_limsup = trunc_limsup;
        ulil::LimsupStats stats;
        stats.median_nl2n = empirical;
        ulil::SandwichReport s = ulil::sandwich_report(report, stats);
        *certified = s.certified;
        *ratio = s.ratio;
        *flagged = s.flagged ? 1 : 0;
    });
}

}  // extern "C"
