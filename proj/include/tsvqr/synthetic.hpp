#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "tsvqr/dataset.hpp"

namespace tsvqr {

/// The six benchmark families plus the heteroscedastic sinc example.
///   A1/A2/A3:  y = (1 - x + 2x^2) exp(-x^2/2) + (1/5)(1 + 0.2x) xi,
///              x in [-4, 4]; xi ~ chi2(3) / chi2(5) / Laplace(0,1).
///   B1/B2/B3:  y = 6 sin(pi/2 - x) + 3 sin(pi/2 - x) xi, x in [-4, 4];
///              xi ~ N(0.3, 0.6^2) / N(0.5, 0.8^2) / Laplace(0,1).
///   Sinc:      y = sin(2 pi x)/(2 pi x) + xi, x in [-1, 1],
///              xi ~ N(0, sigma(x)^2), sigma(x) = 0.1 e^{1+x}.
enum class Family { A1, A2, A3, B1, B2, B3, Sinc };

Family family_from_string(const std::string& name);  // throws on unknown
std::string to_string(Family family);

/// Conventional train/test counts per family (A1/A2: 401/400, A3:
/// 405/400, B1/B2: 801/161, B3: 805/400, Sinc: 500/500).
Eigen::Index default_train_count(Family family);
Eigen::Index default_test_count(Family family);

struct GeneratorSpec {
    Family family = Family::A1;
    Eigen::Index n_train = 0;  // 0 => family default
    Eigen::Index n_test = 0;   // 0 => family default
    std::uint64_t seed = 0;

    void validate() const;  // resolved counts >= 1
};

/// The noiseless regression curve of a family at abscissa x (the y each
/// generator would emit with its noise forced to zero). Exposed for
/// debugging and generator tests; e.g. every family-A curve passes
/// through (0, 1) and every family-B curve through (0, 6).
double family_trend(Family family, double x);

/// Deterministically generates a (train, test) pair. Training abscissae
/// are an even grid over the family domain (the Sinc family draws them
/// uniformly instead); test abscissae are uniform random. Noise and
/// abscissa draws use separate derived streams of the seed, so identical
/// specs yield byte-identical datasets on every platform, and changing
/// one count never shifts the other split's draws.
std::pair<Dataset, Dataset> generate(const GeneratorSpec& spec);

/// n draws of the sinc example (uniform-random x, heteroscedastic
/// Gaussian noise) under stream discipline consistent with generate().
Dataset generate_sinc(Eigen::Index n, std::uint64_t seed);

/// Analytic conditional tau-quantile of the sinc example:
///   y_tau(x) = sin(2 pi x)/(2 pi x) + 0.1 e^{1+x} PhiInv(tau),
/// with the sinc factor taking its limit value 1 at x = 0.
/// Throws std::invalid_argument for tau outside (0,1).
double sinc_quantile_oracle(double x, double tau);

}  // namespace tsvqr
