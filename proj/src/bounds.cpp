#include "ulil/bounds.hpp"

#include <cmath>

#include "ulil/errors.hpp"
#include "ulil/rng.hpp"

namespace ulil {

namespace {

void require_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw_bad_argument(std::string("tail bound: ") + name + " must be positive and finite");
}

}  // namespace

double talagrand_bound(double t, double u, double v, double k) {
    require_positive(t, "t");
    require_positive(u, "U");
    require_positive(v, "V");
    require_positive(k, "K");
    return k * std::exp(-(t / (k * u)) * std::log1p(t * u / v));
}

double talagrand_bound_weak_variance(double t, double u, double sigma2, double ez_abs,
                                     double k) {
    require_positive(t, "t");
    require_positive(u, "U");
    require_positive(k, "K");
    if (!(sigma2 >= 0.0) || !(ez_abs >= 0.0))
        throw_bad_argument("tail bound: sigma2 and E|Z| must be nonnegative");
    double v = sigma2 + 8.0 * u * ez_abs;
    require_positive(v, "sigma^2 + 8 U E|Z|");
    return talagrand_bound(t, u, v, k);
}

double prohorov_bound(double t, double u, double sigma2) {
    require_positive(t, "t");
    require_positive(u, "U");
    require_positive(sigma2, "sigma2");
    return 2.0 * std::exp(-(t / (2.0 * u)) * std::asinh(t * u / (2.0 * sigma2)));
}

double bernstein_bound(double t, double u, double sigma2) {
    require_positive(t, "t");
    require_positive(u, "U");
    require_positive(sigma2, "sigma2");
    return 2.0 * std::exp(-t * t / (2.0 * sigma2 + 2.0 * u * t / 3.0));
}

std::vector<double> chaos_sign_values(const ChaosMatrix& a) {
    const std::size_t k = a.rows, l = a.cols;
    if (k + l > 24) throw_bad_argument("chaos_sign_values: instance too large for enumeration");
    std::vector<double> out;
    out.reserve(std::size_t{1} << (k + l));
    std::vector<double> colsum(l);
    for (std::uint64_t be = 0; be < (std::uint64_t{1} << k); ++be) {
        // column sums under the epsilon signs for this mask
        for (std::size_t j = 0; j < l; ++j) colsum[j] = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double e = (be >> i) & 1 ? 1.0 : -1.0;
            for (std::size_t j = 0; j < l; ++j) colsum[j] += e * a.at(i, j);
        }
        for (std::uint64_t ce = 0; ce < (std::uint64_t{1} << l); ++ce) {
            double s = 0.0;
            for (std::size_t j = 0; j < l; ++j) s += ((ce >> j) & 1 ? 1.0 : -1.0) * colsum[j];
            out.push_back(s);
        }
    }
    return out;
}

LatalaCheck latala_lower_check(const ChaosMatrix& a, double t, double c, LatalaMode mode,
                               std::size_t samples, std::uint64_t seed) {
    require_positive(t, "t");
    require_positive(c, "c");
    LatalaCheck out;
    out.threshold = c * chaos_norm(a, t).value;
    double target = std::min(c, std::exp(-t));

    if (mode == LatalaMode::exhaustive) {
        if (a.rows + a.cols > 24)
            throw_bad_argument("latala_lower_check: instance too large for exhaustive mode");
        std::vector<double> values = chaos_sign_values(a);
        std::size_t hits = 0;
        for (double v : values)
            if (std::abs(v) >= out.threshold) ++hits;
        out.probability = static_cast<double>(hits) / static_cast<double>(values.size());
        out.se = 0.0;
    } else {
        if (samples == 0) throw_bad_argument("latala_lower_check: samples must be positive");
        const std::size_t k = a.rows, l = a.cols;
        std::vector<double> eps(k), eps2(l), colsum(l);
        std::size_t hits = 0;
        for (std::size_t s = 0; s < samples; ++s) {
            for (std::size_t i = 0; i < k; ++i) eps[i] = rng::rademacher(seed, 10, s * k + i);
            for (std::size_t j = 0; j < l; ++j) eps2[j] = rng::rademacher(seed, 11, s * l + j);
            double sum = 0.0;
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < l; ++j) sum += eps[i] * eps2[j] * a.at(i, j);
            if (std::abs(sum) >= out.threshold) ++hits;
        }
        out.probability = static_cast<double>(hits) / static_cast<double>(samples);
        out.se = std::sqrt(std::max(out.probability * (1.0 - out.probability), 0.0) /
                           static_cast<double>(samples));
    }
    out.holds = out.probability >= target;
    return out;
}

}  // namespace ulil
