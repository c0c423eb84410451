#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ulil/conditions.hpp"
#include "ulil/distribution.hpp"
#include "ulil/hoeffding.hpp"
#include "ulil/kernel.hpp"

namespace ulil {

enum class Engine { generic, separable };

Engine engine_from_name(const std::string& name);
std::string engine_name(Engine e);

struct TrajectoryConfig {
    SumVariant variant = SumVariant::plain_offdiag;
    Engine engine = Engine::generic;
    int max_exponent = 10;  // checkpoints at n = 2^k, k = 1..max_exponent
};

struct CheckpointRow {
    int k = 0;
    std::uint64_t n = 0;
    double raw_sum = 0.0;
    double norm_nl2n = 0.0;   // raw / (n L2 n)
    double norm_2nl2n = 0.0;  // raw / (2 n L2 n)
    // sup over j in the dyadic block (2^(k-1), 2^k] of |S_j| / (j L2 j);
    // tracked by the separable engine only, NaN otherwise.
    double intrablock_sup = 0.0;
};

struct TrajectoryResult {
    std::uint64_t seed = 0;
    SumVariant variant = SumVariant::plain_offdiag;
    Engine engine = Engine::generic;
    std::vector<CheckpointRow> rows;
    bool overflow = false;

    // Supremum of |normalized| over checkpoints with k >= k_from.
    double running_sup_from(int k_from, bool half_normalization) const;
};

// Default burn-in: discard checkpoints below max_exponent / 2.
int default_burn_in(int max_exponent);

// One LIL trajectory at dyadic checkpoints. The generic engine accepts
// any kernel up to max_exponent 14 (quadratic cost); the separable
// engine needs an expansion and goes to 26.
TrajectoryResult run_trajectory(const Kernel& kernel, const Distribution& dist,
                                const TrajectoryConfig& config, std::uint64_t seed);

struct LimsupStats {
    std::vector<double> per_seed_nl2n;   // tail sup of |raw|/(n L2 n), one per seed
    std::vector<double> per_seed_2nl2n;  // tail sup of |raw|/(2n L2 n)
    double median_nl2n = 0.0, iqr_nl2n = 0.0;
    double median_2nl2n = 0.0, iqr_2nl2n = 0.0;
};

// Tail suprema beyond a burn-in exponent (checkpoints with k > burn_in),
// summarized across seeds.
LimsupStats limsup_estimate(std::span<const TrajectoryResult> results, int burn_in_exponent);

struct LimitSetEstimate {
    std::vector<double> points;  // signed raw/(2n L2 n) beyond burn-in, all seeds
    double hull_lo = 0.0, hull_hi = 0.0;
    bool has_predicted = false;
    double predicted_lo = 0.0, predicted_hi = 0.0;
    std::vector<std::size_t> histogram;  // 32 bins over [hull_lo, hull_hi]
};

// Limit-set view of plain-variant trajectories; the predicted interval
// comes from the expansion eigenvalues when the kernel is separable.
LimitSetEstimate limit_set_estimate(std::span<const TrajectoryResult> results,
                                    int burn_in_exponent, const Kernel& kernel,
                                    const Distribution& dist, std::size_t gram_m = 4000,
                                    std::uint64_t gram_seed = 99);

// Numerical range (min(lambda_min, 0), max(lambda_max, 0)) of the
// self-adjoint operator of a separable kernel. The basis is verified
// orthonormal under the law by a Monte Carlo Gram check within 3 SE.
std::pair<double, double> numerical_range(const Kernel& kernel, const Distribution& dist,
                                          std::size_t gram_m = 4000, std::uint64_t seed = 99);

struct SandwichReport {
    double certified = 0.0;  // operator norm + sqrt(truncated-moment limsup)
    double empirical = 0.0;  // median tail sup of |raw|/(n L2 n)
    double ratio = 1.0;
    bool flagged = false;
    double band_lo = 1.0 / 50.0, band_hi = 50.0;
};

// Diagnostic comparison of the certified two-term bound against the
// empirical limsup; the universal constant is unknown, so this flags
// rather than asserts.
SandwichReport sandwich_report(const ConditionReport& report, const LimsupStats& stats);

}  // namespace ulil
