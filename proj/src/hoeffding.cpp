#include "ulil/hoeffding.hpp"

#include <cmath>
#include <sstream>

#include "ulil/errors.hpp"
#include "ulil/rng.hpp"

namespace ulil {

bool variant_needs_y(SumVariant v) {
    return v == SumVariant::decoupled || v == SumVariant::decoupled_randomized;
}

bool variant_needs_signs(SumVariant v) {
    return v == SumVariant::randomized || v == SumVariant::decoupled_randomized;
}

std::string variant_name(SumVariant v) {
    switch (v) {
        case SumVariant::plain_offdiag: return "plain";
        case SumVariant::randomized: return "randomized";
        case SumVariant::decoupled: return "decoupled";
        case SumVariant::decoupled_randomized: return "decoupled_randomized";
    }
    return "?";
}

SumVariant variant_from_name(const std::string& name) {
    if (name == "plain" || name == "plain_offdiag") return SumVariant::plain_offdiag;
    if (name == "randomized") return SumVariant::randomized;
    if (name == "decoupled") return SumVariant::decoupled;
    if (name == "decoupled_randomized") return SumVariant::decoupled_randomized;
    throw_bad_argument("unknown sum variant: " + name);
}

namespace {

void check_lengths(SumVariant variant, std::span<const double> x, std::span<const double> y,
                   std::span<const double> eps, std::span<const double> eps2) {
    if (variant_needs_y(variant) && y.size() != x.size())
        throw_bad_argument("sum: decoupled variants need y with the same length as x");
    if (variant_needs_signs(variant) && eps.size() != x.size())
        throw_bad_argument("sum: randomized variants need one sign per x sample");
    if (variant == SumVariant::decoupled_randomized && eps2.size() != x.size())
        throw_bad_argument("sum: decoupled_randomized needs one second sign per y sample");
}

}  // namespace

double sum_exact(const Kernel& kernel, SumVariant variant, std::span<const double> x,
                 std::span<const double> y, std::span<const double> eps,
                 std::span<const double> eps2) {
    check_lengths(variant, x, y, eps, eps2);
    const std::size_t n = x.size();
    CompensatedSum acc;
    switch (variant) {
        case SumVariant::plain_offdiag:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j) acc += kernel(x[i], x[j]);
            break;
        case SumVariant::randomized:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j) acc += eps[i] * eps[j] * kernel(x[i], x[j]);
            break;
        case SumVariant::decoupled:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) acc += kernel(x[i], y[j]);
            break;
        case SumVariant::decoupled_randomized:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) acc += eps[i] * eps2[j] * kernel(x[i], y[j]);
            break;
    }
    return acc.value();
}

double sum_separable(const Kernel& kernel, SumVariant variant, std::span<const double> x,
                     std::span<const double> y, std::span<const double> eps,
                     std::span<const double> eps2) {
    check_lengths(variant, x, y, eps, eps2);
    SeparableAccumulator acc(kernel);
    for (std::size_t i = 0; i < x.size(); ++i)
        acc.append_x(x[i], variant_needs_signs(variant) ? eps[i] : 1.0);
    if (variant_needs_y(variant))
        for (std::size_t j = 0; j < y.size(); ++j)
            acc.append_y(y[j], variant == SumVariant::decoupled_randomized ? eps2[j] : 1.0);
    return acc.value(variant);
}

SeparableAccumulator::SeparableAccumulator(const Kernel& kernel) {
    const auto& terms = kernel.separable();  // throws if absent
    terms_ = std::make_shared<const std::vector<SeparableTerm>>(terms);
    std::size_t r = terms_->size();
    sum_phi_x_.resize(r);
    sum_phi2_x_.resize(r);
    sum_sign_phi_x_.resize(r);
    sum_phi_y_.resize(r);
    sum_sign_phi_y_.resize(r);
}

void SeparableAccumulator::append_x(double x, double sign) {
    for (std::size_t m = 0; m < terms_->size(); ++m) {
        double v = (*terms_)[m].phi(x);
        sum_phi_x_[m] += v;
        sum_phi2_x_[m] += v * v;
        sum_sign_phi_x_[m] += sign * v;
    }
    ++nx_;
}

void SeparableAccumulator::append_y(double y, double sign) {
    for (std::size_t m = 0; m < terms_->size(); ++m) {
        double v = (*terms_)[m].phi(y);
        sum_phi_y_[m] += v;
        sum_sign_phi_y_[m] += sign * v;
    }
    ++ny_;
}

double SeparableAccumulator::value(SumVariant variant) const {
    if (variant_needs_y(variant) && ny_ != nx_)
        throw_bad_argument("separable accumulator: decoupled value needs equal x and y counts");
    CompensatedSum acc;
    for (std::size_t m = 0; m < terms_->size(); ++m) {
        double lambda = (*terms_)[m].lambda;
        switch (variant) {
            case SumVariant::plain_offdiag: {
                double s = sum_phi_x_[m].value();
                acc += lambda * (s * s - sum_phi2_x_[m].value());
                break;
            }
            case SumVariant::randomized: {
                double s = sum_sign_phi_x_[m].value();
                // eps_i^2 = 1, so the diagonal of the squared sum is sum phi^2.
                acc += lambda * (s * s - sum_phi2_x_[m].value());
                break;
            }
            case SumVariant::decoupled:
                acc += lambda * (sum_phi_x_[m].value() * sum_phi_y_[m].value());
                break;
            case SumVariant::decoupled_randomized:
                acc += lambda * (sum_sign_phi_x_[m].value() * sum_sign_phi_y_[m].value());
                break;
        }
    }
    return acc.value();
}

namespace {

constexpr std::uint64_t kBackgroundStreamX = 101;
constexpr std::uint64_t kBackgroundStreamY = 102;

[[noreturn]] void report_nonfinite(double x, double y, double h) {
    std::ostringstream os;
    os << "non-finite kernel value " << h << " at (" << x << ", " << y << ")";
    throw_numeric(os.str());
}

}  // namespace

ProjectionEstimate::ProjectionEstimate(const Kernel& kernel, const Distribution& dist,
                                       std::size_t m, std::uint64_t seed)
    : kernel_(kernel) {
    analytic_ = static_cast<bool>(kernel.analytic().cond_mean) && kernel.analytic_matches(dist) &&
                kernel.analytic().mean_h.has_value();
    m_ = m;
    if (analytic_) {
        mean_h_ = *kernel.analytic().mean_h;
        return;
    }
    if (m < 100) throw_bad_argument("project: empirical mode needs a background sample of m >= 100");
    // One decoupled background draw, reused for every pi1/pi2 query.
    std::vector<double> bx = dist.sample_stream(seed, kBackgroundStreamX, m);
    bg_ = dist.sample_stream(seed, kBackgroundStreamY, m);
    CompensatedSum mean;
    for (std::size_t i = 0; i < m; ++i) {
        double h = kernel_(bx[i], bg_[i]);
        if (!std::isfinite(h)) report_nonfinite(bx[i], bg_[i], h);
        mean += h;
    }
    mean_h_ = mean.value() / static_cast<double>(m);
}

double ProjectionEstimate::pi1(double x) const {
    if (analytic_) return kernel_.analytic().cond_mean(x) - mean_h_;
    CompensatedSum acc;
    for (double yj : bg_) {
        double h = kernel_(x, yj);
        if (!std::isfinite(h)) report_nonfinite(x, yj, h);
        acc += h;
    }
    return acc.value() / static_cast<double>(m_) - mean_h_;
}

double ProjectionEstimate::pi2(double x, double y) const {
    return kernel_(x, y) - pi1(x) - pi1(y) - mean_h_;
}

ProjectionEstimate project(const Kernel& kernel, const Distribution& dist, std::size_t m,
                           std::uint64_t seed) {
    return ProjectionEstimate(kernel, dist, m, seed);
}

Kernel symmetrize(const Kernel& kernel) {
    Kernel inner = kernel;
    return Kernel("symmetrized_" + kernel.name(),
                  [inner](double x, double y) { return 0.5 * (inner(x, y) + inner(y, x)); });
}

}  // namespace ulil
