#include "tsvqr/metrics.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "tsvqr/pinball.hpp"

namespace tsvqr {

bool gacv(const TrainedModel& m, const Dataset& train, double tau,
          double* out) {
    train.validate();
    if (out == nullptr) {
        throw std::invalid_argument("gacv: output pointer must not be null");
    }
    const Eigen::Index l = train.rows();
    const SupportVectorCensus census = classify_support_vectors(m);
    const auto sv = static_cast<Eigen::Index>(census.i_sv.size());
    if (sv >= l) return false;

    const BoundsPrediction pred = predict_batch_serial(m, train.inputs);
    double loss_sum = 0.0;
    for (Eigen::Index i = 0; i < l; ++i) {
        loss_sum += pinball_loss(train.targets[i] - pred.mean[i], tau);
    }
    *out = loss_sum / static_cast<double>(l - sv);
    return true;
}

EvalReport evaluate(const TrainedModel& m, const Dataset& test, double tau,
                    const Dataset* train) {
    test.validate();
    if (!(tau > 0.0 && tau < 1.0)) {
        throw std::invalid_argument(
            "evaluate: quantile level must lie strictly inside (0, 1)");
    }

    EvalReport r;
    const auto t0 = std::chrono::steady_clock::now();
    const BoundsPrediction pred = predict_batch_serial(m, test.inputs);
    r.predict_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    // All four sums run in index order. Keeping the accumulation order
    // identical across metrics is what makes the algebraic identity
    // risk(0.5) == mae/2 hold bit for bit, not just approximately.
    const Eigen::Index n = test.rows();
    double pinball_sum = 0.0;
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    double pct_sum = 0.0;
    bool any_zero_target = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double res = test.targets[i] - pred.mean[i];
        pinball_sum += pinball_loss(res, tau);
        abs_sum += std::abs(res);
        sq_sum += res * res;
        if (test.targets[i] == 0.0) {
            any_zero_target = true;
        } else {
            pct_sum += std::abs(res) / std::abs(test.targets[i]);
        }
    }
    const auto dn = static_cast<double>(n);
    r.risk = pinball_sum / dn;
    r.mae = abs_sum / dn;
    r.rmse = std::sqrt(sq_sum / dn);
    r.mape_defined = !any_zero_target;
    r.mape = any_zero_target ? 0.0 : pct_sum / dn;

    r.sv_count =
        static_cast<Eigen::Index>(classify_support_vectors(m).i_sv.size());
    r.fit_seconds = m.fit_seconds;

    if (train != nullptr) {
        double score = 0.0;
        r.gacv_defined = gacv(m, *train, tau, &score);
        r.gacv = r.gacv_defined ? score : 0.0;
    }
    return r;
}

}  // namespace tsvqr
