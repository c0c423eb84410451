#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ulil/chaos.hpp"
#include "ulil/distribution.hpp"
#include "ulil/kernel.hpp"

namespace ulil {

// L(x) = max(log x, 1) and its iterate.
double iterated_log(double x);
double iterated_log2(double x);

// Geometric grid from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, std::size_t points);

struct TruncatedMomentCurve {
    std::vector<double> u;
    std::vector<double> values;  // E(h^2 ∧ u)
    std::vector<double> se;      // zero in analytic mode
    std::vector<double> ratio;   // values / L2(u)
    bool analytic = false;
    // max of ratio over the tail third of the grid
    double limsup_estimate = 0.0;
};

// Growth curve of the truncated second moment. Uses the kernel's
// closed form when it matches the law; otherwise Monte Carlo over a
// shared sample (so values stay monotone in u). MC mode requires
// mc_samples >= 1000.
TruncatedMomentCurve truncated_moment_curve(const Kernel& kernel, const Distribution& dist,
                                            std::span<const double> u_grid,
                                            std::size_t mc_samples, std::uint64_t seed);

enum class OperatorNormMethod { analytic, svd_empirical, schur_bound };

struct OperatorNormEstimate {
    double value = 0.0;
    OperatorNormMethod method = OperatorNormMethod::svd_empirical;
    std::size_t sample_m = 0;
    double lo = 0.0, hi = 0.0;  // bootstrap CI (hull includes the point estimate)
    int bootstrap_resamples = 0;
};

// Largest singular value of (h(X_i, Y_j))_{i,j<=m} divided by m: the
// discrete bilinear-form supremum. Power iteration at relative
// tolerance 1e-8; bootstrap CI over 32 index resamples.
OperatorNormEstimate operator_norm_empirical(const Kernel& kernel, const Distribution& dist,
                                             std::size_t m, std::uint64_t seed,
                                             int bootstrap_resamples = 32);

// Analytic metadata when available for the law, else empirical.
OperatorNormEstimate operator_norm(const Kernel& kernel, const Distribution& dist, std::size_t m,
                                   std::uint64_t seed);

struct SchurBound {
    double bound = 0.0;     // sqrt(s1 * s2)
    double s1 = 0.0;        // sup_x E_Y|h(x,Y)| over probes
    double s2 = 0.0;        // sup_y E_X|h(X,y)| over probes
    bool estimate_only = true;
};

SchurBound schur_bound(const Kernel& kernel, const Distribution& dist, std::size_t probe_m,
                       std::uint64_t seed);

struct TruncationProfile {
    std::vector<int> n;            // the level range
    std::vector<double> probes;    // probe points x
    // f[level][probe] = E_Y min(h^2(x,Y), 2^(4n))
    std::vector<std::vector<double>> f;
    // g[level][probe] = E_Y h 1{|h| >= 2^n n^2}
    std::vector<std::vector<double>> g;
    std::vector<double> c;         // E h^2 1{2^n/n^2 < |h| <= 2^n n^2}
    bool analytic = false;
    bool clamped = false;          // thresholds clipped at the double range
};

// Truncated conditional moments at probe points over a level range.
// Levels must lie in [1, 64].
TruncationProfile truncation_profile(const Kernel& kernel, const Distribution& dist, int n_lo,
                                     int n_hi, std::span<const double> probes,
                                     std::size_t mc_samples, std::uint64_t seed);

enum class ConditionStatus { pass, fail };

struct ConditionReport {
    std::string kernel_name, dist_name;

    ConditionStatus canonical = ConditionStatus::fail;
    bool canonical_certified = false;
    double canonical_max_abs = 0.0;  // worst probe |E_X h(X,y)|
    double canonical_threshold = 0.0;

    double cond_b_limsup = 0.0;
    bool cond_b_certified = false;  // analytic curve
    double cond_b_grid_top = 0.0;

    double cond_c_value = 0.0;
    OperatorNormMethod cond_c_method = OperatorNormMethod::svd_empirical;
    double cond_c_lo = 0.0, cond_c_hi = 0.0;

    double schur_upper = 0.0;

    std::string to_text() const;
};

struct CertifyConfig {
    std::size_t probe_count = 20;
    std::size_t mc_samples = 20000;    // canonicality / curve sampling
    std::size_t operator_m = 400;      // empirical operator-norm sample side
    std::size_t curve_points = 600;
    std::uint64_t seed = 1;
};

// Bundles the canonicality probe, the truncated-moment limsup and the
// bilinear-form norm into one report.
ConditionReport certify(const Kernel& kernel, const Distribution& dist,
                        const CertifyConfig& config);

}  // namespace ulil
