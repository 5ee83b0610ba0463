#include "tsvqr/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "tsvqr/rng.hpp"

namespace tsvqr {

namespace {

// Distinct derived streams per purpose. Abscissae and noise never share
// a stream, and the two splits never share one either, so resizing one
// split cannot shift any other draw sequence.
constexpr std::uint64_t kStreamTrainX = 1;
constexpr std::uint64_t kStreamTrainNoise = 2;
constexpr std::uint64_t kStreamTestX = 3;
constexpr std::uint64_t kStreamTestNoise = 4;

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Domain {
    double lo, hi;
};

Domain domain_of(Family family) {
    return family == Family::Sinc ? Domain{-1.0, 1.0} : Domain{-4.0, 4.0};
}

/// One noisy target at abscissa x, consuming exactly one noise variate.
double draw_target(Family family, double x, Rng& noise) {
    const double trend = family_trend(family, x);
    switch (family) {
        case Family::A1:
            return trend + 0.2 * (1.0 + 0.2 * x) * noise.chi_squared(3);
        case Family::A2:
            return trend + 0.2 * (1.0 + 0.2 * x) * noise.chi_squared(5);
        case Family::A3:
            return trend + 0.2 * (1.0 + 0.2 * x) * noise.laplace();
        case Family::B1:
            return trend +
                   3.0 * std::sin(0.5 * M_PI - x) * noise.normal(0.3, 0.6);
        case Family::B2:
            return trend +
                   3.0 * std::sin(0.5 * M_PI - x) * noise.normal(0.5, 0.8);
        case Family::B3:
            return trend + 3.0 * std::sin(0.5 * M_PI - x) * noise.laplace();
        case Family::Sinc:
            return trend + noise.normal(0.0, 0.1 * std::exp(1.0 + x));
    }
    throw std::invalid_argument("synthetic: unknown family");
}

/// Uniform-random abscissae with family noise; both splits' random
/// parts and the whole Sinc family are drawn this way.
Dataset random_draws(Family family, Eigen::Index n, Rng x_rng, Rng noise_rng) {
    const Domain dom = domain_of(family);
    Dataset d;
    d.inputs.resize(n, 1);
    d.targets.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = x_rng.uniform(dom.lo, dom.hi);
        d.inputs(i, 0) = x;
        d.targets[i] = draw_target(family, x, noise_rng);
    }
    return d;
}

Eigen::Index resolve(Eigen::Index requested, Eigen::Index fallback) {
    return requested == 0 ? fallback : requested;
}

}  // namespace

Family family_from_string(const std::string& name) {
    if (name == "A1") return Family::A1;
    if (name == "A2") return Family::A2;
    if (name == "A3") return Family::A3;
    if (name == "B1") return Family::B1;
    if (name == "B2") return Family::B2;
    if (name == "B3") return Family::B3;
    if (name == "Sinc") return Family::Sinc;
    throw std::invalid_argument("synthetic: unknown family name '" + name +
                                "'");
}

std::string to_string(Family family) {
    switch (family) {
        case Family::A1: return "A1";
        case Family::A2: return "A2";
        case Family::A3: return "A3";
        case Family::B1: return "B1";
        case Family::B2: return "B2";
        case Family::B3: return "B3";
        case Family::Sinc: return "Sinc";
    }
    throw std::invalid_argument("synthetic: unknown family");
}

Eigen::Index default_train_count(Family family) {
    switch (family) {
        case Family::A1:
        case Family::A2: return 401;
        case Family::A3: return 405;
        case Family::B1:
        case Family::B2: return 801;
        case Family::B3: return 805;
        case Family::Sinc: return 500;
    }
    throw std::invalid_argument("synthetic: unknown family");
}

Eigen::Index default_test_count(Family family) {
    switch (family) {
        case Family::A1:
        case Family::A2:
        case Family::A3: return 400;
        case Family::B1:
        case Family::B2: return 161;
        case Family::B3: return 400;
        case Family::Sinc: return 500;
    }
    throw std::invalid_argument("synthetic: unknown family");
}

void GeneratorSpec::validate() const {
    if (resolve(n_train, default_train_count(family)) < 1)
        throw std::invalid_argument(
            "synthetic: training count must be positive");
    if (resolve(n_test, default_test_count(family)) < 1)
        throw std::invalid_argument("synthetic: test count must be positive");
}

double family_trend(Family family, double x) {
    switch (family) {
        case Family::A1:
        case Family::A2:
        case Family::A3:
            return (1.0 - x + 2.0 * x * x) * std::exp(-0.5 * x * x);
        case Family::B1:
        case Family::B2:
        case Family::B3:
            return 6.0 * std::sin(0.5 * M_PI - x);
        case Family::Sinc: {
            if (x == 0.0) return 1.0;
            const double t = kTwoPi * x;
            return std::sin(t) / t;
        }
    }
    throw std::invalid_argument("synthetic: unknown family");
}

std::pair<Dataset, Dataset> generate(const GeneratorSpec& spec) {
    spec.validate();
    const Eigen::Index n_train =
        resolve(spec.n_train, default_train_count(spec.family));
    const Eigen::Index n_test =
        resolve(spec.n_test, default_test_count(spec.family));

    Dataset train;
    if (spec.family == Family::Sinc) {
        train = generate_sinc(n_train, spec.seed);
    } else {
        // The even grid includes both endpoints exactly: the fraction
        // i/(n-1) hits 0 and 1 without rounding residue, unlike
        // accumulating a step.
        const Domain dom = domain_of(spec.family);
        Rng noise = Rng::derive(spec.seed, kStreamTrainNoise);
        train.inputs.resize(n_train, 1);
        train.targets.resize(n_train);
        for (Eigen::Index i = 0; i < n_train; ++i) {
            const double frac =
                n_train == 1 ? 0.0
                             : static_cast<double>(i) /
                                   static_cast<double>(n_train - 1);
            const double x = dom.lo + (dom.hi - dom.lo) * frac;
            train.inputs(i, 0) = x;
            train.targets[i] = draw_target(spec.family, x, noise);
        }
    }

    Dataset test = random_draws(spec.family, n_test,
                                Rng::derive(spec.seed, kStreamTestX),
                                Rng::derive(spec.seed, kStreamTestNoise));
    return {std::move(train), std::move(test)};
}

Dataset generate_sinc(Eigen::Index n, std::uint64_t seed) {
    if (n < 1)
        throw std::invalid_argument("synthetic: sample count must be positive");
    return random_draws(Family::Sinc, n, Rng::derive(seed, kStreamTrainX),
                        Rng::derive(seed, kStreamTrainNoise));
}

double sinc_quantile_oracle(double x, double tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument(
            "synthetic: tau must lie strictly between 0 and 1");
    return family_trend(Family::Sinc, x) +
           0.1 * std::exp(1.0 + x) * inverse_normal_cdf(tau);
}

}  // namespace tsvqr
