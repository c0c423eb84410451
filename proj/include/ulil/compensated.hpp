#pragma once

#include <cmath>

namespace ulil {

// Neumaier-compensated accumulator. Long Monte Carlo sums and the
// incremental U-statistic engines route through this so that the
// 1e-10 cross-engine agreement checks are about algorithms, not
// accumulation order.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }

    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }

    double value() const { return sum + carry; }

    void reset() { sum = carry = 0.0; }
};

}  // namespace ulil
