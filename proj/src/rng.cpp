#include "tsvqr/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace tsvqr {

namespace {

// Wichura's PPND16 rational approximations for the normal quantile.
// Relative error is below 1e-15 over the full open unit interval, which
// is what makes the seeded generators reproducible to the last bit.
constexpr double kCentralNum[8] = {
    3.3871328727963666080e0,  1.3314166789178437745e2,
    1.9715909503065514427e3,  1.3731693765509461125e4,
    4.5921953931549871457e4,  6.7265770927008700853e4,
    3.3430575583588128105e4,  2.5090809287301226727e3};
constexpr double kCentralDen[8] = {
    1.0,                      4.2313330701600911252e1,
    6.8718700749205790830e2,  5.3941960214247511077e3,
    2.1213794301586595867e4,  3.9307895800092710610e4,
    2.8729085735721942674e4,  5.2264952788528545610e3};
constexpr double kTailNum[8] = {
    1.42343711074968357734e0,  4.63033784615654529590e0,
    5.76949722146069140550e0,  3.64784832476320460504e0,
    1.27045825245236838258e0,  2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kTailDen[8] = {
    1.0,                       2.05319162663775882187e0,
    1.67638483018380384940e0,  6.89767334985100004550e-1,
    1.48103976427480074590e-1, 1.51986665636164571966e-2,
    5.47593808499534494600e-4, 1.05075007164441684324e-9};
constexpr double kFarNum[8] = {
    6.65790464350110377720e0,  5.46378491116411436990e0,
    1.78482653991729133580e0,  2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kFarDen[8] = {
    1.0,                       5.99832206555887937690e-1,
    1.36929880922735805310e-1, 1.48753612908506148525e-2,
    7.86869131145613259100e-4, 1.84631831751005468180e-5,
    1.42151175831644588870e-7, 2.04426310338993978564e-15};

double horner8(const double (&c)[8], double x) {
    double r = c[7];
    for (int i = 6; i >= 0; --i) r = r * x + c[i];
    return r;
}

}  // namespace

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument(
            "inverse_normal_cdf: probability must lie strictly inside (0, 1)");
    }
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner8(kCentralNum, r) / horner8(kCentralDen, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = horner8(kTailNum, r) / horner8(kTailDen, r);
    } else {
        r -= 5.0;
        value = horner8(kFarNum, r) / horner8(kFarDen, r);
    }
    return q < 0.0 ? -value : value;
}

std::uint64_t Rng::next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream) {
    // Mix seed and stream through two independent passes so that
    // (seed, stream) pairs land in unrelated state regions; a plain
    // xor/add of raw values would make nearby pairs collide.
    Rng a(seed);
    Rng b(stream ^ 0x6A09E667F3BCC909ull);
    return Rng(a.next_u64() ^ b.next_u64());
}

double Rng::uniform01() {
    // 53-bit mantissa draw centered in its bucket: never exactly 0 or 1.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double Rng::normal() { return inverse_normal_cdf(uniform01()); }

double Rng::normal(double mean, double sigma) {
    return mean + sigma * normal();
}

double Rng::chi_squared(int k) {
    if (k < 1) {
        throw std::invalid_argument(
            "chi_squared: degrees of freedom must be positive");
    }
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        const double z = normal();
        sum += z * z;
    }
    return sum;
}

double Rng::laplace() {
    const double u = uniform01();
    return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("below: n must be positive");
    // Rejection sampling over the largest multiple of n to stay unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw;
    do {
        draw = next_u64();
    } while (draw >= limit);
    return draw % n;
}

}  // namespace tsvqr
