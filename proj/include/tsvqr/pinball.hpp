#pragma once

#include <Eigen/Core>

namespace tsvqr {

/// Pinball (check) loss of a residual r at quantile level tau in (0,1):
///   rho_tau(r) = tau * r        if r > 0
///              = -(1 - tau) * r otherwise.
/// Its minimizer over a sample is the empirical tau-quantile. Throws
/// std::invalid_argument when tau is outside (0, 1).
double pinball_loss(double r, double tau);

/// Mean pinball loss over a residual vector (the empirical quantile
/// risk). Summation is in index order so that identities such as
/// "risk at tau = 0.5 equals MAE/2" hold exactly, not just to rounding.
double mean_pinball(const Eigen::VectorXd& residuals, double tau);

}  // namespace tsvqr
