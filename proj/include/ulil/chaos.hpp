#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ulil {

// Dense real matrix (row-major).
struct ChaosMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> entries;

    ChaosMatrix() = default;
    ChaosMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

    static ChaosMatrix identity(std::size_t k);
    static ChaosMatrix ones(std::size_t r, std::size_t c);
};

struct BoxBallResult {
    std::vector<double> b;
    double value = 0.0;
};

// argmax of <v, b> over { sum b_i^2 <= t, |b_i| <= 1 }: water-filling
// clip b_i = sign(v_i) min(1, |v_i|/lambda), with lambda found by
// bisection (tolerance 1e-12). Ties v_i = 0 resolve to b_i = 0.
BoxBallResult box_ball_linear_max(std::span<const double> v, double t);

struct ChaosNormResult {
    double value = 0.0;
    std::vector<double> b, c;
    int restarts_used = 0;
    bool converged = false;
};

// The t-constrained bilinear norm sup{ b^T A c } over the box-and-ball
// feasible set, by alternating exact linear maximizations from several
// starts (leading singular pair, dominant row/column sign patterns,
// seeded random directions). The result is a certified lower bound on
// the supremum; the returned (b, c) are feasible and reproduce value.
ChaosNormResult chaos_norm(const ChaosMatrix& a, double t, int restarts = 16);

// Brute-force validator: exhaustive scan of a b-grid (step <= 0.1,
// projected onto the ball) with the c-side solved exactly per grid
// point, then two local grid-refinement passes. Only for k*l <= 16.
double chaos_norm_oracle(const ChaosMatrix& a, double t, double grid_step);

// Largest singular value of a dense matrix by power iteration on A^T A.
// rel_tol applies to successive sigma estimates; throws after max_iter.
double power_iteration_sigma_max(const ChaosMatrix& a, double rel_tol = 1e-10,
                                 int max_iter = 10000, std::uint64_t seed = 12345);

}  // namespace ulil
