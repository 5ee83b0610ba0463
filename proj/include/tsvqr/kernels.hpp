#pragma once

#include <Eigen/Core>
#include <memory>

#include "tsvqr/dataset.hpp"

namespace tsvqr {

/// Kernel family plus its single shape parameter.
///   Linear      k(x,z) = x'z                      (param unused)
///   Gaussian(p) k(x,z) = exp(-|x-z|^2 / (2 p^2))
///   Wavelet(a)  k(x,z) = prod_d cos(1.75 (x_d - z_d)/a)
///                               * exp(-(x_d - z_d)^2 / (2 a^2))
struct KernelSpec {
    enum class Family { Linear, Gaussian, Wavelet };

    Family family = Family::Gaussian;
    double param = 1.0;

    static KernelSpec linear() { return {Family::Linear, 0.0}; }
    static KernelSpec gaussian(double p) { return {Family::Gaussian, p}; }
    static KernelSpec wavelet(double a) { return {Family::Wavelet, a}; }

    /// Same family, different shape parameter (grid-search helper).
    KernelSpec with_param(double p) const { return {family, p}; }

    /// Gaussian/Wavelet require param > 0. Throws std::invalid_argument.
    void validate() const;
};

/// Evaluates the kernel on a pair of equal-dimension vectors.
/// Symmetric in (x, z); throws std::invalid_argument on dimension
/// mismatch or invalid spec.
double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& z);

/// The l x l augmented Gram matrix with entries k(x_i, x_j) + 1 — the
/// Gram of the design [A e] that folds the intercept into the weights.
/// The matrix is shared (read-only) by both dual problems of a fit, so
/// it is held behind a shared_ptr rather than copied.
struct AugmentedGram {
    std::shared_ptr<const Eigen::MatrixXd> matrix;
    Eigen::VectorXd diag;  // cached diagonal of *matrix

    Eigen::Index size() const { return matrix ? matrix->rows() : 0; }
};

/// Rows above this count would materialize a Gram matrix too large to be
/// useful on desk hardware; build_augmented_gram refuses them loudly
/// instead of thrashing. Override per call for bigger machines.
inline constexpr Eigen::Index kDefaultGramDimCap = 20000;

/// Builds the augmented Gram matrix. Entries are computed independently
/// (entry (i,j) reads only rows i and j), so the parallel build is
/// bitwise identical to the serial one for every thread count.
/// `threads` <= 0 means use all available.
AugmentedGram build_augmented_gram(const Dataset& data, const KernelSpec& spec,
                                   int threads = 0,
                                   Eigen::Index dim_cap = kDefaultGramDimCap);

/// Single-threaded reference implementation; kept for the equivalence
/// tests and the benchmark. Must agree bitwise with the parallel build.
AugmentedGram build_augmented_gram_serial(
    const Dataset& data, const KernelSpec& spec,
    Eigen::Index dim_cap = kDefaultGramDimCap);

/// m x l matrix of augmented kernel values k(query_i, train_j) + 1 used
/// by batch prediction. Parallelizes over queries; each row is computed
/// independently, so the result is thread-count invariant.
Eigen::MatrixXd augmented_cross_gram(const KernelSpec& spec,
                                     const Eigen::MatrixXd& train_inputs,
                                     const Eigen::MatrixXd& queries,
                                     int threads = 0);

/// Serial reference for augmented_cross_gram (bitwise identical).
Eigen::MatrixXd augmented_cross_gram_serial(const KernelSpec& spec,
                                            const Eigen::MatrixXd& train_inputs,
                                            const Eigen::MatrixXd& queries);

}  // namespace tsvqr
