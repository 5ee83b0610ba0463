#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace tsvqr {

/// A regression sample: l input rows of n features plus l targets.
struct Dataset {
    Eigen::MatrixXd inputs;                  // l x n
    Eigen::VectorXd targets;                 // l
    std::vector<std::string> feature_names;  // optional; empty => x1..xn

    Eigen::Index rows() const { return inputs.rows(); }
    Eigen::Index cols() const { return inputs.cols(); }

    /// Enforces the type's invariants: at least one row, matching target
    /// length, all entries finite. Throws std::invalid_argument.
    void validate() const;
};

/// Per-feature affine map to zero mean and unit variance, learned from a
/// training matrix and replayed on queries. Population variance is used;
/// constant features keep scale 1 so the transform stays invertible.
struct Standardizer {
    Eigen::VectorXd mean;   // n
    Eigen::VectorXd scale;  // n, strictly positive

    static Standardizer fit(const Eigen::MatrixXd& inputs);

    Eigen::MatrixXd apply(const Eigen::MatrixXd& inputs) const;
    Eigen::VectorXd apply_row(const Eigen::VectorXd& row) const;
};

}  // namespace tsvqr
