#pragma once

#include <cstdint>

namespace ulil {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, index). There is no generator state, so replicas
// running on different workers (or re-runs with a different worker
// count) see exactly the same values, and disjoint stream ids give
// statistically independent sequences.
namespace rng {

// 64-bit avalanche mix of the (seed, stream, index) triple.
std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Uniform on [0, 1) with 53 significant bits.
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Uniform on (0, 1), endpoints excluded; safe input for inverse CDFs.
double uniform01_open(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Fair sign in {-1.0, +1.0}.
double rademacher(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Standard normal via inverse CDF of the uniform draw.
double gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace rng

// Inverse of the standard normal CDF (Wichura's PPND16, ~1e-15 accurate
// for p in (0,1)).
double inverse_normal_cdf(double p);

}  // namespace ulil
