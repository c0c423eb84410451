#pragma once

#include <cstdint>
#include <vector>

#include "ulil/chaos.hpp"

namespace ulil {

// Uniform Prohorov tail bound K exp(-(t/KU) log(1 + tU/V)).
// All arguments strictly positive; K defaults to 1 (the constant is
// universal but not pinned numerically, so it stays configurable).
double talagrand_bound(double t, double u, double v, double k = 1.0);

// Same bound with V replaced by sigma^2 + 8 U E|Z|.
double talagrand_bound_weak_variance(double t, double u, double sigma2, double ez_abs,
                                     double k = 1.0);

// Classical one-function forms: 2 exp(-(t/2U) asinh(tU / 2 sigma^2))
// and 2 exp(-t^2 / (2 sigma^2 + 2Ut/3)).
double prohorov_bound(double t, double u, double sigma2);
double bernstein_bound(double t, double u, double sigma2);

enum class LatalaMode { exhaustive, monte_carlo };

struct LatalaCheck {
    double probability = 0.0;  // Pr{ |sum a_ij e_i e~_j| >= threshold }
    double threshold = 0.0;    // c * |||A|||_t
    double se = 0.0;           // Monte Carlo standard error (0 in exhaustive mode)
    bool holds = false;        // probability >= min(c, exp(-t))
};

// Checks the chaos small-deviation lower bound for one matrix.
// Exhaustive mode enumerates all 2^(k+l) sign pairs (requires
// k + l <= 24); Monte Carlo mode samples sign pairs.
LatalaCheck latala_lower_check(const ChaosMatrix& a, double t, double c, LatalaMode mode,
                               std::size_t samples = 100000, std::uint64_t seed = 1);

// All 2^(k+l) values of sum a_ij e_i e~_j in enumeration order;
// the exhaustive distribution behind latala_lower_check.
std::vector<double> chaos_sign_values(const ChaosMatrix& a);

}  // namespace ulil
