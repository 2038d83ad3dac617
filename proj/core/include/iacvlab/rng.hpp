#pragma once

#include <cstdint>

namespace iacvlab {

/// Counter-based generator: every variate is a pure function of
/// (seed, stream, counter), so draws can be fanned out across workers in
/// any order and still reproduce bit-identically. Streams conventionally
/// identify an exposure or a Monte Carlo draw, counters the variate index
/// within the stream.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const;

    /// Uniform on the open interval (0, 1).
    double uniform(std::uint64_t stream, std::uint64_t counter) const;

    /// Standard normal via the inverse CDF (one variate per counter).
    double normal(std::uint64_t stream, std::uint64_t counter) const;

private:
    std::uint64_t seed_;
};

/// Standard normal CDF.
double norm_cdf(double x);

/// Inverse standard normal CDF, accurate to full double precision
/// (Wichura's PPND16 rational approximations). Throws std::domain_error
/// outside (0, 1).
double norm_icdf(double p);

} // namespace iacvlab
