#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ulil/distribution.hpp"

namespace ulil {

// One term of a finite-rank expansion h(x,y) = sum_m lambda_m phi_m(x) phi_m(y).
struct SeparableTerm {
    double lambda;
    std::function<double(double)> phi;
    std::string phi_name;
};

// Closed-form facts about a kernel under one fixed input law. Filled by
// the catalog where simple algebra supplies them; estimators fall back
// to Monte Carlo when a field is absent or the law does not match.
struct AnalyticInfo {
    std::string dist_name;  // law the facts below are valid for
    std::optional<double> mean_h;
    std::optional<double> operator_norm;
    std::function<double(double)> cond_mean;           // x -> E_Y h(x,Y)
    std::function<double(double)> second_moment_curve; // u -> E(h^2 ∧ u)
};

// Indicator-block kernel: disjoint intervals packed left to right in
// [0,1]; block n is +1 on the left half and -1 on the right half of an
// interval of length b_n, scaled by a_n / b_n.
class BlockKernelSpec {
public:
    // b_n > 0 with sum(b) <= 1 (supports must pack into [0,1]); a bounded.
    BlockKernelSpec(std::vector<double> a, std::vector<double> b);

    std::size_t block_count() const { return a_.size(); }
    const std::vector<double>& a() const { return a_; }
    const std::vector<double>& b() const { return b_; }

    // I_n(x) in {-1, 0, +1}.
    double indicator(std::size_t n, double x) const;
    // Index of the block whose support contains x, or npos. O(log blocks).
    std::size_t locate(double x) const;
    double eval(double x, double y) const;

    double sup_abs_a() const;
    // E(h^2 ∧ u) under independent uniform inputs:
    // sum over blocks of a_n^2 when a_n^2/b_n^2 <= u, else u * b_n^2.
    double second_moment_curve(double u) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<double> a_, b_;
    std::vector<double> edges_;  // support start of each block; edges_[n+1] = end
};

// A symmetric two-argument kernel plus optional analytic metadata and
// optional separable expansion. Immutable after construction; cheap to
// copy (shared internals) and safe to use from many threads.
class Kernel {
public:
    Kernel() = default;
    Kernel(std::string name, std::function<double(double, double)> eval);

    double operator()(double x, double y) const { return eval_(x, y); }
    const std::string& name() const { return name_; }

    bool has_separable() const { return !!separable_; }
    const std::vector<SeparableTerm>& separable() const;

    const AnalyticInfo& analytic() const { return analytic_; }
    bool analytic_matches(const Distribution& dist) const {
        return analytic_.dist_name == dist.name();
    }

    const std::shared_ptr<const BlockKernelSpec>& block() const { return block_; }

    // Truncation index for the doubly-exponential block family
    // (-1 when not applicable).
    int truncated_at() const { return truncated_at_; }

    Kernel& set_separable(std::vector<SeparableTerm> terms);
    Kernel& set_analytic(AnalyticInfo info);
    Kernel& set_block(std::shared_ptr<const BlockKernelSpec> spec);
    Kernel& set_truncated_at(int n) { truncated_at_ = n; return *this; }

private:
    std::string name_;
    std::function<double(double, double)> eval_;
    std::shared_ptr<const std::vector<SeparableTerm>> separable_;
    AnalyticInfo analytic_;
    std::shared_ptr<const BlockKernelSpec> block_;
    int truncated_at_ = -1;
};

// Orthonormal function families for finite-rank kernels. Index m >= 1.
namespace basis {
// Shifted Legendre, orthonormal under uniform01: sqrt(2m+1) P_m(2x-1).
double legendre01(unsigned m, double x);
// Probabilists' Hermite over the standard normal: He_m(x)/sqrt(m!).
double hermite_normal(unsigned m, double x);
}  // namespace basis

struct CatalogParams {
    std::vector<double> a;        // block: per-block amplitudes
    std::vector<double> b;        // block: per-block support lengths
    double de_a = 1.0;            // block_doubleexp: constant amplitude
    double de_b = 1.0;            // block_doubleexp: target limsup value
    std::vector<double> lambdas;  // finite_rank
    std::string phi = "auto";     // finite_rank: legendre | hermite | identity | auto
    double scale = 1.0;           // multiplies the kernel
};

// Catalog families: "product" (xy), "sum" (x+y), "zero", "block",
// "block_doubleexp" (a_n = a, b_n = exp(-exp(a^2 n / b)), truncated at the
// first b_n < 1e-300), "finite_rank". Analytic metadata is filled for the
// supplied law where closed forms exist.
Kernel catalog(const std::string& name, const CatalogParams& params, const Distribution& dist);

// Convenience: (a_n / b_n) I_n(x) I_n(y) for a standalone spec.
double block_kernel_eval(const BlockKernelSpec& spec, double x, double y);

std::vector<std::string> catalog_names();

}  // namespace ulil
