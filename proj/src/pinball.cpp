#include "tsvqr/pinball.hpp"

#include <stdexcept>

namespace tsvqr {

double pinball_loss(double r, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw std::invalid_argument(
            "pinball: quantile level must lie strictly inside (0, 1)");
    }
    return r > 0.0 ? tau * r : -(1.0 - tau) * r;
}

double mean_pinball(const Eigen::VectorXd& residuals, double tau) {
    if (residuals.size() == 0) {
        throw std::invalid_argument("pinball: empty residual vector");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < residuals.size(); ++i) {
        sum += pinball_loss(residuals[i], tau);
    }
    return sum / static_cast<double>(residuals.size());
}

}  // namespace tsvqr
