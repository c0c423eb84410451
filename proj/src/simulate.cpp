#include "ulil/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ulil/compensated.hpp"
#include "ulil/errors.hpp"
#include "ulil/rng.hpp"

namespace ulil {

namespace {

constexpr std::uint64_t kStreamX = 0;
constexpr std::uint64_t kStreamY = 1;
constexpr std::uint64_t kStreamEps = 2;
constexpr std::uint64_t kStreamEps2 = 3;

double normalizer(std::uint64_t n) {
    double dn = static_cast<double>(n);
    return dn * iterated_log2(dn);
}

}  // namespace

Engine engine_from_name(const std::string& name) {
    if (name == "generic") return Engine::generic;
    if (name == "separable") return Engine::separable;
    throw_bad_argument("unknown engine: " + name);
}

std::string engine_name(Engine e) { return e == Engine::generic ? "generic" : "separable"; }

int default_burn_in(int max_exponent) {
    // keep checkpoints k >= ceil(max_exponent / 2)
    return (max_exponent + 1) / 2 - 1;
}

double TrajectoryResult::running_sup_from(int k_from, bool half_normalization) const {
    double sup = 0.0;
    for (const auto& row : rows)
        if (row.k >= k_from)
            sup = std::max(sup, std::abs(half_normalization ? row.norm_2nl2n : row.norm_nl2n));
    return sup;
}

namespace {

TrajectoryResult run_generic(const Kernel& kernel, const Distribution& dist,
                             const TrajectoryConfig& config, std::uint64_t seed) {
    if (config.max_exponent > 14)
        throw_bad_argument("generic engine caps max_exponent at 14; use the separable engine");
    const bool needs_y = variant_needs_y(config.variant);
    const bool needs_signs = variant_needs_signs(config.variant);
    const std::uint64_t n_max = std::uint64_t{1} << config.max_exponent;

    TrajectoryResult out;
    out.seed = seed;
    out.variant = config.variant;
    out.engine = Engine::generic;

    std::vector<double> x, y, eps, eps2;
    x.reserve(n_max);
    CompensatedSum total;
    int next_k = 1;
    for (std::uint64_t j = 0; j < n_max; ++j) {
        double xj = dist.sample(seed, kStreamX, j);
        double ej = needs_signs ? rng::rademacher(seed, kStreamEps, j) : 1.0;
        double yj = 0.0, e2j = 1.0;
        if (needs_y) {
            yj = dist.sample(seed, kStreamY, j);
            if (config.variant == SumVariant::decoupled_randomized)
                e2j = rng::rademacher(seed, kStreamEps2, j);
        }

        CompensatedSum inc;
        switch (config.variant) {
            case SumVariant::plain_offdiag:
                for (std::uint64_t i = 0; i < j; ++i) inc += kernel(x[i], xj);
                total += 2.0 * inc.value();
                break;
            case SumVariant::randomized:
                for (std::uint64_t i = 0; i < j; ++i) inc += eps[i] * kernel(x[i], xj);
                total += 2.0 * ej * inc.value();
                break;
            case SumVariant::decoupled: {
                for (std::uint64_t i = 0; i < j; ++i) inc += kernel(x[i], yj);
                CompensatedSum inc2;
                for (std::uint64_t i = 0; i < j; ++i) inc2 += kernel(xj, y[i]);
                total += inc.value();
                total += inc2.value();
                total += kernel(xj, yj);
                break;
            }
            case SumVariant::decoupled_randomized: {
                for (std::uint64_t i = 0; i < j; ++i) inc += eps[i] * kernel(x[i], yj);
                CompensatedSum inc2;
                for (std::uint64_t i = 0; i < j; ++i) inc2 += eps2[i] * kernel(xj, y[i]);
                total += e2j * inc.value();
                total += ej * inc2.value();
                total += ej * e2j * kernel(xj, yj);
                break;
            }
        }
        x.push_back(xj);
        if (needs_signs) eps.push_back(ej);
        if (needs_y) {
            y.push_back(yj);
            if (config.variant == SumVariant::decoupled_randomized) eps2.push_back(e2j);
        }

        std::uint64_t count = j + 1;
        if (count == (std::uint64_t{1} << next_k)) {
            CheckpointRow row;
            row.k = next_k;
            row.n = count;
            row.raw_sum = total.value();
            double z = normalizer(count);
            row.norm_nl2n = row.raw_sum / z;
            row.norm_2nl2n = row.raw_sum / (2.0 * z);
            row.intrablock_sup = std::numeric_limits<double>::quiet_NaN();
            if (!std::isfinite(row.raw_sum)) out.overflow = true;
            out.rows.push_back(row);
            ++next_k;
        }
    }
    return out;
}

TrajectoryResult run_separable(const Kernel& kernel, const Distribution& dist,
                               const TrajectoryConfig& config, std::uint64_t seed) {
    if (config.max_exponent > 26)
        throw_bad_argument("separable engine caps max_exponent at 26");
    if (!kernel.has_separable())
        throw_bad_argument("separable engine requires a kernel with a separable expansion");
    const bool needs_y = variant_needs_y(config.variant);
    const bool needs_signs = variant_needs_signs(config.variant);
    const std::uint64_t n_max = std::uint64_t{1} << config.max_exponent;

    TrajectoryResult out;
    out.seed = seed;
    out.variant = config.variant;
    out.engine = Engine::separable;

    SeparableAccumulator acc(kernel);
    int next_k = 1;
    double block_sup = 0.0;
    for (std::uint64_t j = 0; j < n_max; ++j) {
        double xj = dist.sample(seed, kStreamX, j);
        acc.append_x(xj, needs_signs ? rng::rademacher(seed, kStreamEps, j) : 1.0);
        if (needs_y) {
            double yj = dist.sample(seed, kStreamY, j);
            acc.append_y(yj, config.variant == SumVariant::decoupled_randomized
                                 ? rng::rademacher(seed, kStreamEps2, j)
                                 : 1.0);
        }
        std::uint64_t count = j + 1;
        double s = acc.value(config.variant);
        block_sup = std::max(block_sup, std::abs(s) / normalizer(count));
        if (count == (std::uint64_t{1} << next_k)) {
            CheckpointRow row;
            row.k = next_k;
            row.n = count;
            row.raw_sum = s;
            double z = normalizer(count);
            row.norm_nl2n = s / z;
            row.norm_2nl2n = s / (2.0 * z);
            row.intrablock_sup = block_sup;
            if (!std::isfinite(row.raw_sum)) out.overflow = true;
            out.rows.push_back(row);
            ++next_k;
            block_sup = 0.0;
        }
    }
    return out;
}

}  // namespace

TrajectoryResult run_trajectory(const Kernel& kernel, const Distribution& dist,
                                const TrajectoryConfig& config, std::uint64_t seed) {
    if (config.max_exponent < 1) throw_bad_argument("max_exponent must be at least 1");
    return config.engine == Engine::generic ? run_generic(kernel, dist, config, seed)
                                            : run_separable(kernel, dist, config, seed);
}

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile_of(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    double pos = p * static_cast<double>(v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    double w = pos - static_cast<double>(lo);
    return (1.0 - w) * v[lo] + w * v[hi];
}

}  // namespace

LimsupStats limsup_estimate(std::span<const TrajectoryResult> results, int burn_in_exponent) {
    if (results.empty()) throw_bad_argument("limsup_estimate: no trajectories");
    LimsupStats out;
    for (const auto& traj : results) {
        bool any = false;
        double sup1 = 0.0, sup2 = 0.0;
        for (const auto& row : traj.rows) {
            if (row.k <= burn_in_exponent) continue;
            any = true;
            sup1 = std::max(sup1, std::abs(row.norm_nl2n));
            sup2 = std::max(sup2, std::abs(row.norm_2nl2n));
        }
        if (!any) throw_bad_argument("limsup_estimate: burn-in leaves an empty tail");
        out.per_seed_nl2n.push_back(sup1);
        out.per_seed_2nl2n.push_back(sup2);
    }
    out.median_nl2n = median_of(out.per_seed_nl2n);
    out.median_2nl2n = median_of(out.per_seed_2nl2n);
    out.iqr_nl2n = quantile_of(out.per_seed_nl2n, 0.75) - quantile_of(out.per_seed_nl2n, 0.25);
    out.iqr_2nl2n = quantile_of(out.per_seed_2nl2n, 0.75) - quantile_of(out.per_seed_2nl2n, 0.25);
    return out;
}

std::pair<double, double> numerical_range(const Kernel& kernel, const Distribution& dist,
                                          std::size_t gram_m, std::uint64_t seed) {
    const auto& terms = kernel.separable();  // throws when absent
    const std::size_t r = terms.size();
    if (r > 0) {
        // Gram check: sample moments of phi_a phi_b must match the
        // identity within 3 standard errors.
        std::vector<double> xs = dist.sample_stream(seed, kStreamX, gram_m);
        for (std::size_t a = 0; a < r; ++a) {
            for (std::size_t b = a; b < r; ++b) {
                CompensatedSum mean, sq;
                for (double x : xs) {
                    double v = terms[a].phi(x) * terms[b].phi(x);
                    mean += v;
                    sq += v * v;
                }
                double mu = mean.value() / static_cast<double>(gram_m);
                double var =
                    std::max(sq.value() / static_cast<double>(gram_m) - mu * mu, 0.0);
                double se = std::sqrt(var / static_cast<double>(gram_m));
                double expect = (a == b) ? 1.0 : 0.0;
                if (std::abs(mu - expect) > 3.0 * se + 1e-9)
                    throw_numeric("numerical_range: expansion basis fails the orthonormality check under " +
                                  dist.name());
            }
        }
    }
    double lo = 0.0, hi = 0.0;
    for (const auto& term : terms) {
        lo = std::min(lo, term.lambda);
        hi = std::max(hi, term.lambda);
    }
    return {lo, hi};
}

LimitSetEstimate limit_set_estimate(std::span<const TrajectoryResult> results,
                                    int burn_in_exponent, const Kernel& kernel,
                                    const Distribution& dist, std::size_t gram_m,
                                    std::uint64_t gram_seed) {
    if (results.empty()) throw_bad_argument("limit_set_estimate: no trajectories");
    for (const auto& traj : results)
        if (traj.variant != SumVariant::plain_offdiag)
            throw_bad_argument("limit_set_estimate: needs plain-variant trajectories");

    LimitSetEstimate out;
    for (const auto& traj : results)
        for (const auto& row : traj.rows)
            if (row.k > burn_in_exponent) out.points.push_back(row.norm_2nl2n);
    if (out.points.empty()) throw_bad_argument("limit_set_estimate: burn-in leaves an empty tail");

    out.hull_lo = *std::min_element(out.points.begin(), out.points.end());
    out.hull_hi = *std::max_element(out.points.begin(), out.points.end());
    if (kernel.has_separable()) {
        auto range = numerical_range(kernel, dist, gram_m, gram_seed);
        out.has_predicted = true;
        out.predicted_lo = range.first;
        out.predicted_hi = range.second;
    }
    out.histogram.assign(32, 0);
    double width = out.hull_hi - out.hull_lo;
    for (double p : out.points) {
        std::size_t bin = width > 0.0
                              ? std::min<std::size_t>(31, static_cast<std::size_t>(
                                                              (p - out.hull_lo) / width * 32.0))
                              : 0;
        ++out.histogram[bin];
    }
    return out;
}

SandwichReport sandwich_report(const ConditionReport& report, const LimsupStats& stats) {
    SandwichReport out;
    out.certified = report.cond_c_value + std::sqrt(std::max(report.cond_b_limsup, 0.0));
    out.empirical = stats.median_nl2n;
    if (out.certified == 0.0 && out.empirical == 0.0) {
        out.ratio = 1.0;  // zero kernel: both sides vanish
    } else if (out.certified == 0.0) {
        out.ratio = std::numeric_limits<double>::infinity();
    } else {
        out.ratio = out.empirical / out.certified;
    }
    out.flagged = !(out.ratio >= out.band_lo && out.ratio <= out.band_hi);
    return out;
}

}  // namespace ulil
