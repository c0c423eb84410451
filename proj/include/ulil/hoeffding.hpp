#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ulil/compensated.hpp"
#include "ulil/distribution.hpp"
#include "ulil/kernel.hpp"

namespace ulil {

// The four pair-sum flavours. The diagonal convention is fixed here and
// nowhere else: single-sample sums run over i != j, decoupled sums run
// over all (i, j) including the diagonal.
enum class SumVariant { plain_offdiag, randomized, decoupled, decoupled_randomized };

bool variant_needs_y(SumVariant v);
bool variant_needs_signs(SumVariant v);
std::string variant_name(SumVariant v);
SumVariant variant_from_name(const std::string& name);

// Direct evaluation of the pair sum for a variant. Lengths must be
// consistent: x everywhere; y for decoupled variants; eps for the
// randomized variants; eps2 for decoupled_randomized.
double sum_exact(const Kernel& kernel, SumVariant variant, std::span<const double> x,
                 std::span<const double> y = {}, std::span<const double> eps = {},
                 std::span<const double> eps2 = {});

// Same value through per-rank partial sums; requires a separable
// expansion. O(rank * n) instead of O(n^2).
double sum_separable(const Kernel& kernel, SumVariant variant, std::span<const double> x,
                     std::span<const double> y = {}, std::span<const double> eps = {},
                     std::span<const double> eps2 = {});

// Incremental form of sum_separable: appending one sample costs
// O(rank). Single-owner object; give each worker its own.
class SeparableAccumulator {
public:
    explicit SeparableAccumulator(const Kernel& kernel);

    void append_x(double x, double sign = 1.0);
    void append_y(double y, double sign = 1.0);

    double value(SumVariant variant) const;
    std::size_t count_x() const { return nx_; }
    std::size_t count_y() const { return ny_; }

private:
    std::shared_ptr<const std::vector<SeparableTerm>> terms_;
    std::vector<CompensatedSum> sum_phi_x_, sum_phi2_x_, sum_sign_phi_x_;
    std::vector<CompensatedSum> sum_phi_y_, sum_sign_phi_y_;
    std::size_t nx_ = 0, ny_ = 0;
};

// Hoeffding projections of a kernel under a law. Analytic when the
// kernel supplies E_Y h(x, Y); otherwise empirical against a background
// sample of size m drawn once at construction, after which pi1/pi2 are
// deterministic functions.
class ProjectionEstimate {
public:
    ProjectionEstimate(const Kernel& kernel, const Distribution& dist, std::size_t m,
                       std::uint64_t seed);

    double mean_h() const { return mean_h_; }
    double pi1(double x) const;
    double pi2(double x, double y) const;
    bool analytic() const { return analytic_; }
    std::size_t background_m() const { return m_; }
    // Standard-error proxy 1/sqrt(m); zero in analytic mode.
    double se_scale() const { return analytic_ ? 0.0 : 1.0 / std::sqrt(double(m_)); }

private:
    Kernel kernel_;
    bool analytic_;
    std::size_t m_;
    double mean_h_ = 0.0;
    std::vector<double> bg_;  // background Y-sample (empirical mode)
};

ProjectionEstimate project(const Kernel& kernel, const Distribution& dist, std::size_t m,
                           std::uint64_t seed);

// (h(x,y) + h(y,x)) / 2: entry point for kernels that are not symmetric
// in their arguments. Metadata and expansions do not carry over.
Kernel symmetrize(const Kernel& kernel);

}  // namespace ulil
