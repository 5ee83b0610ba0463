#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "tsvqr/dataset.hpp"
#include "tsvqr/kernels.hpp"
#include "tsvqr/solver.hpp"

namespace tsvqr {

/// Everything a twin quantile fit is parameterized by. The two bound
/// regressors get independent trade-off weights (c1, c2) and tube
/// half-widths (eps1, eps2); tau is the quantile level both target.
struct Hyperparams {
    double c1 = 1.0;
    double c2 = 1.0;
    double eps1 = 0.01;
    double eps2 = 0.01;
    double tau = 0.5;
    KernelSpec kernel;
    SolverConfig solver;

    /// c1, c2, eps1, eps2 > 0 and 0 < tau < 1; kernel valid.
    /// Throws std::invalid_argument.
    void validate() const;
};

/// A trained twin quantile regressor: the multipliers of both duals plus
/// whatever is needed to evaluate the bound functions later. Immutable
/// after fit and safe to share across threads.
struct TrainedModel {
    Hyperparams hyper;
    Eigen::VectorXd alpha_lower;  // multipliers of the lower-bound dual
    Eigen::VectorXd alpha_upper;  // multipliers of the upper-bound dual
    Eigen::MatrixXd train_inputs;  // rows in the (possibly standardized) fit space
    std::optional<Standardizer> standardizer;  // applied to queries when present

    // Linear kernel only: cached explicit coefficients u = [w; b] with
    //   u_lower = G'(c1 tau e - alpha_lower),
    //   u_upper = G'(alpha_upper - c2 (1-tau) e),   G = [A e].
    // Empty for kernelized fits.
    Eigen::VectorXd u_lower;
    Eigen::VectorXd u_upper;

    SolveResult diag_lower;
    SolveResult diag_upper;
    double fit_seconds = 0.0;

    Eigen::Index train_size() const { return train_inputs.rows(); }
    Eigen::Index feature_dim() const { return train_inputs.cols(); }
};

/// Options of fit() that are not statistical hyperparameters.
struct FitOptions {
    bool standardize = false;  // learn and store a feature Standardizer
    int threads = 0;           // Gram-build parallelism; <= 0 = all
    Eigen::Index gram_dim_cap = kDefaultGramDimCap;
};

/// Lower-bound dual:  q = gram,  d = c1 tau (q 1) - y + eps1 1,  cap = c1.
/// Throws std::invalid_argument on dimension mismatch.
BoxQP assemble_lower_dual(const AugmentedGram& gram, const Eigen::VectorXd& y,
                          const Hyperparams& h);

/// Upper-bound dual:  q = gram,  d = c2 (1-tau) (q 1) + y + eps2 1,  cap = c2.
BoxQP assemble_upper_dual(const AugmentedGram& gram, const Eigen::VectorXd& y,
                          const Hyperparams& h);

/// Trains both bound regressors on the data: builds the augmented Gram
/// once, assembles the two duals over it, and solves each by coordinate
/// descent from zero. Solver non-convergence is reported through the
/// diagnostics (converged flags), not as an error, so searches can rank
/// partial solutions. Validation failures throw std::invalid_argument.
TrainedModel fit(const Dataset& data, const Hyperparams& h,
                 const FitOptions& opts = {});

/// Lower bound function  f1(x) = sum_j (c1 tau - alpha_j) (k(x_j, x) + 1).
/// For Linear-kernel models the cached u_lower gives the same value as
/// u_lower' [x; 1]; fit guarantees the two paths agree.
double predict_lower(const TrainedModel& m, const Eigen::VectorXd& x);

/// Upper bound function  f2(x) = sum_j (alpha*_j - c2 (1-tau)) (k(x_j, x) + 1).
double predict_upper(const TrainedModel& m, const Eigen::VectorXd& x);

/// Final regressor  f(x) = (f1(x) + f2(x)) / 2, exactly the mean of
/// predict_lower and predict_upper.
double predict(const TrainedModel& m, const Eigen::VectorXd& x);

/// f(x) through its algebraically equivalent two-term form
///   1/2 (alpha* - alpha)' kbar(x) + 1/2 (c1 tau - c2 (1-tau)) e' kbar(x)
/// where kbar_j(x) = k(x_j, x) + 1. Used to cross-check predict().
double predict_decomposed(const TrainedModel& m, const Eigen::VectorXd& x);

/// Batch predictions over the rows of a query matrix.
struct BoundsPrediction {
    Eigen::VectorXd lower, upper, mean;  // mean = (lower + upper) / 2 rowwise
};

/// Batch version of the three predictors. Parallelizes over query rows;
/// each row is computed independently, so the output is bitwise
/// invariant to the thread count.
BoundsPrediction predict_batch(const TrainedModel& m,
                               const Eigen::MatrixXd& queries,
                               int threads = 0);

/// Serial reference for predict_batch (bitwise identical; kept for the
/// equivalence tests and the benchmark).
BoundsPrediction predict_batch_serial(const TrainedModel& m,
                                      const Eigen::MatrixXd& queries);

/// Index sets classifying every training point by where its multipliers
/// sit in their boxes (within tol_sv = 1e-6 * cap):
///   lower dual:  alpha = 0 -> above_lower, alpha = c1 -> below_lower,
///                interior -> on_lower (the point lies on the lower
///                bound regressor's tube edge);
///   upper dual:  alpha* = 0 -> inside, alpha* = c2 -> above_upper,
///                interior -> on_upper.
/// i_sv collects indices with a positive multiplier in either dual.
struct SupportVectorCensus {
    std::vector<Eigen::Index> on_lower, below_lower, above_lower;
    std::vector<Eigen::Index> on_upper, above_upper, inside;
    std::vector<Eigen::Index> i_sv;
};

SupportVectorCensus classify_support_vectors(const TrainedModel& m);

/// Residual sign counts of y - f(x) over a dataset; |residual| <= 1e-8
/// counts as zero. p + n_count + z always equals the number of rows.
struct CoverageStats {
    Eigen::Index p = 0;        // strictly positive residuals (y above f)
    Eigen::Index n_count = 0;  // strictly negative residuals (y below f)
    Eigen::Index z = 0;        // residuals within 1e-8 of zero
};

CoverageStats coverage_stats(const TrainedModel& m, const Dataset& data);

}  // namespace tsvqr
