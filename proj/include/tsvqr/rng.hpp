#pragma once

#include <cstdint>

namespace tsvqr {

/// Inverse of the standard normal CDF (quantile function), accurate to
/// full double precision over (0, 1). Implements Wichura's PPND16
/// rational approximations (algorithm AS 241).
/// Throws std::invalid_argument for p outside the open interval (0, 1).
double inverse_normal_cdf(double p);

/// Minimal portable pseudo-random generator built on the splitmix64
/// mixing function. Every draw is a pure function of the 64-bit state,
/// with no platform- or library-dependent code paths, so seeded streams
/// reproduce bit-identically across compilers and operating systems.
///
/// Distinct purposes (train noise vs. test abscissae, say) use distinct
/// derived streams so that changing how much one purpose consumes never
/// shifts another purpose's draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Child generator for stream `stream` of the given seed. Derivation
    /// is itself a splitmix64 step, so (seed, stream) pairs map to
    /// well-separated states.
    static Rng derive(std::uint64_t seed, std::uint64_t stream);

    /// Next raw 64-bit word.
    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1): takes the top 53 bits and
    /// centers them on the lattice, so 0 and 1 are never returned and
    /// inverse-CDF transforms stay finite.
    double uniform01();

    /// Uniform on (lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal via inverse-CDF transform of uniform01().
    double normal();

    /// Normal with the given mean and standard deviation (sigma >= 0).
    double normal(double mean, double sigma);

    /// Chi-squared with k degrees of freedom, as the sum of k squared
    /// standard normals (k >= 1).
    double chi_squared(int k);

    /// Laplace (double exponential) with location 0 and scale 1, via
    /// inverse CDF.
    double laplace();

    /// Uniform integer in [0, n) for n >= 1 (used for shuffles).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t state_;
};

}  // namespace tsvqr
