#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ulil {

enum class DistFamily { rademacher, uniform01, gaussian01, discrete };

// A samplable real-valued law with counter-based stream semantics:
// sample(seed, stream, index) is a pure function, so identical triples
// give identical values regardless of call order or thread count.
class Distribution {
public:
    static Distribution rademacher();
    static Distribution uniform01();
    static Distribution gaussian01();
    // Finite support; weights must be nonnegative and sum to 1 within 1e-12.
    static Distribution discrete(std::vector<double> values, std::vector<double> weights);

    // Parses "rademacher", "uniform01", "gaussian01". Discrete laws carry
    // parameters and go through discrete().
    static Distribution from_name(const std::string& name);

    DistFamily family() const { return family_; }
    const std::string& name() const { return name_; }

    double sample(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) const;
    std::vector<double> sample_stream(std::uint64_t seed, std::uint64_t stream,
                                      std::size_t n) const;

    // Inverse CDF at p in (0,1); used for probe grids.
    double quantile(double p) const;

    double mean() const;
    double variance() const;
    bool centered(double tol = 1e-12) const;

    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    Distribution(DistFamily f, std::string name) : family_(f), name_(std::move(name)) {}

    DistFamily family_;
    std::string name_;
    std::vector<double> values_;   // discrete only
    std::vector<double> weights_;  // discrete only
    std::vector<double> cumulative_;
};

}  // namespace ulil
