#pragma once

#include "tsvqr/dataset.hpp"
#include "tsvqr/model.hpp"

namespace tsvqr {

/// Error metrics of a model on a dataset, the column set of the usual
/// comparison tables. `mape` divides by |y_i| and is undefined-flagged
/// when any target is exactly zero (points are never silently skipped).
/// `gacv` is only meaningful against the training set; evaluate() fills
/// it when a training set is supplied.
struct EvalReport {
    double risk = 0.0;  // mean pinball loss at tau
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;
    bool mape_defined = true;
    double gacv = 0.0;
    bool gacv_defined = false;
    Eigen::Index sv_count = 0;  // |i_sv| of the model
    double fit_seconds = 0.0;      // copied from the model
    double predict_seconds = 0.0;  // batch prediction time in evaluate()
};

/// Generalized approximate cross validation score on the training set:
///   GACV_tau = sum_i rho_tau(y_i - f(x_i)) / (l - |i_sv|).
/// Returns false (undefined) when |i_sv| >= l, which a thin twin tube
/// frequently produces; callers rank undefined scores last rather than
/// propagating infinities. `train` must be the set the model was fit on.
bool gacv(const TrainedModel& m, const Dataset& train, double tau,
          double* out);

/// Computes the report over `test` residuals. `train`, when given, is
/// used for the GACV field (it is a training-set score by construction).
/// Throws std::invalid_argument for an empty or mismatched test set.
EvalReport evaluate(const TrainedModel& m, const Dataset& test, double tau,
                    const Dataset* train = nullptr);

}  // namespace tsvqr
