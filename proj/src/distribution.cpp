#include "ulil/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "ulil/errors.hpp"
#include "ulil/rng.hpp"

namespace ulil {

Distribution Distribution::rademacher() {
    return Distribution(DistFamily::rademacher, "rademacher");
}

Distribution Distribution::uniform01() {
    return Distribution(DistFamily::uniform01, "uniform01");
}

Distribution Distribution::gaussian01() {
    return Distribution(DistFamily::gaussian01, "gaussian01");
}

Distribution Distribution::discrete(std::vector<double> values, std::vector<double> weights) {
    if (values.empty() || values.size() != weights.size())
        throw_bad_argument("discrete distribution: values and weights must be nonempty and equal length");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw_bad_argument("discrete distribution: values must be finite");
        if (!(weights[i] >= 0.0))
            throw_bad_argument("discrete distribution: weights must be nonnegative");
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw_bad_argument("discrete distribution: weights must sum to 1 within 1e-12");
    Distribution d(DistFamily::discrete, "discrete");
    d.values_ = std::move(values);
    d.weights_ = std::move(weights);
    d.cumulative_.resize(d.weights_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < d.weights_.size(); ++i) {
        acc += d.weights_[i];
        d.cumulative_[i] = acc;
    }
    d.cumulative_.back() = 1.0;
    return d;
}

Distribution Distribution::from_name(const std::string& name) {
    if (name == "rademacher") return rademacher();
    if (name == "uniform01") return uniform01();
    if (name == "gaussian01") return gaussian01();
    throw_bad_argument("unknown distribution: " + name);
}

double Distribution::sample(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) const {
    switch (family_) {
        case DistFamily::rademacher:
            return rng::rademacher(seed, stream, index);
        case DistFamily::uniform01:
            return rng::uniform01(seed, stream, index);
        case DistFamily::gaussian01:
            return rng::gaussian(seed, stream, index);
        case DistFamily::discrete: {
            double u = rng::uniform01(seed, stream, index);
            auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
            if (k >= values_.size()) k = values_.size() - 1;
            return values_[k];
        }
    }
    throw_numeric("distribution: unreachable family");
}

std::vector<double> Distribution::sample_stream(std::uint64_t seed, std::uint64_t stream,
                                                std::size_t n) const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sample(seed, stream, i);
    return out;
}

double Distribution::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw_bad_argument("quantile: p must be in (0,1)");
    switch (family_) {
        case DistFamily::rademacher:
            return p < 0.5 ? -1.0 : 1.0;
        case DistFamily::uniform01:
            return p;
        case DistFamily::gaussian01:
            return inverse_normal_cdf(p);
        case DistFamily::discrete: {
            auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), p);
            std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
            if (k >= values_.size()) k = values_.size() - 1;
            return values_[k];
        }
    }
    throw_numeric("distribution: unreachable family");
}

double Distribution::mean() const {
    switch (family_) {
        case DistFamily::rademacher: return 0.0;
        case DistFamily::uniform01: return 0.5;
        case DistFamily::gaussian01: return 0.0;
        case DistFamily::discrete: {
            double m = 0.0;
            for (std::size_t i = 0; i < values_.size(); ++i) m += values_[i] * weights_[i];
            return m;
        }
    }
    throw_numeric("distribution: unreachable family");
}

double Distribution::variance() const {
    switch (family_) {
        case DistFamily::rademacher: return 1.0;
        case DistFamily::uniform01: return 1.0 / 12.0;
        case DistFamily::gaussian01: return 1.0;
        case DistFamily::discrete: {
            double m = mean();
            double v = 0.0;
            for (std::size_t i = 0; i < values_.size(); ++i) {
                double d = values_[i] - m;
                v += d * d * weights_[i];
            }
            return v;
        }
    }
    throw_numeric("distribution: unreachable family");
}

bool Distribution::centered(double tol) const { return std::abs(mean()) <= tol; }

}  // namespace ulil
