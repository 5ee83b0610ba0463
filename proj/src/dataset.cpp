#include "tsvqr/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace tsvqr {

void Dataset::validate() const {
    if (inputs.rows() == 0 || inputs.cols() == 0) {
        throw std::invalid_argument("dataset: inputs must be non-empty");
    }
    if (targets.size() != inputs.rows()) {
        throw std::invalid_argument(
            "dataset: target length must equal the number of input rows");
    }
    if (!inputs.allFinite() || !targets.allFinite()) {
        throw std::invalid_argument("dataset: entries must be finite");
    }
    if (!feature_names.empty() &&
        static_cast<Eigen::Index>(feature_names.size()) != inputs.cols()) {
        throw std::invalid_argument(
            "dataset: feature_names length must equal the number of columns");
    }
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& inputs) {
    if (inputs.rows() == 0) {
        throw std::invalid_argument("standardizer: empty input matrix");
    }
    Standardizer s;
    s.mean = inputs.colwise().mean().transpose();
    const Eigen::MatrixXd centered = inputs.rowwise() - s.mean.transpose();
    s.scale =
        (centered.array().square().colwise().mean()).sqrt().transpose();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
        if (s.scale[j] <= 0.0) s.scale[j] = 1.0;
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& inputs) const {
    if (inputs.cols() != mean.size()) {
        throw std::invalid_argument(
            "standardizer: input width does not match the learned transform");
    }
    return (inputs.rowwise() - mean.transpose()).array().rowwise() /
           scale.transpose().array();
}

Eigen::VectorXd Standardizer::apply_row(const Eigen::VectorXd& row) const {
    if (row.size() != mean.size()) {
        throw std::invalid_argument(
            "standardizer: query width does not match the learned transform");
    }
    return (row - mean).cwiseQuotient(scale);
}

}  // namespace tsvqr
