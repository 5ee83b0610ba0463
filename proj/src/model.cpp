#include "tsvqr/model.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tsvqr {

namespace {

/// Multiplier position within [0, cap], with the same tolerance the
/// census documents: proportional to the box size.
enum class BoxPos { kZero, kInterior, kCap };

BoxPos box_position(double value, double cap) {
    const double tol = 1e-6 * cap;
    if (value <= tol) return BoxPos::kZero;
    if (value >= cap - tol) return BoxPos::kCap;
    return BoxPos::kInterior;
}

/// Augmented kernel row k(x_j, x) + 1 against every training input.
Eigen::VectorXd augmented_kernel_column(const TrainedModel& m,
                                        const Eigen::VectorXd& x) {
    const Eigen::Index l = m.train_size();
    if (x.size() != m.feature_dim()) {
        throw std::invalid_argument("predict: feature dimension mismatch");
    }
    Eigen::VectorXd kbar(l);
    for (Eigen::Index j = 0; j < l; ++j) {
        kbar[j] =
            kernel_eval(m.hyper.kernel, m.train_inputs.row(j).transpose(), x) +
            1.0;
    }
    return kbar;
}

Eigen::VectorXd to_fit_space(const TrainedModel& m, const Eigen::VectorXd& x) {
    if (x.size() != m.feature_dim()) {
        throw std::invalid_argument("predict: feature dimension mismatch");
    }
    return m.standardizer ? m.standardizer->apply_row(x) : x;
}

double lower_value(const TrainedModel& m, const Eigen::VectorXd& z) {
    const Hyperparams& h = m.hyper;
    if (m.u_lower.size() != 0) {
        return m.u_lower.head(m.feature_dim()).dot(z) +
               m.u_lower[m.feature_dim()];
    }
    const Eigen::VectorXd kbar = augmented_kernel_column(m, z);
    double value = 0.0;
    for (Eigen::Index j = 0; j < kbar.size(); ++j) {
        value += (h.c1 * h.tau - m.alpha_lower[j]) * kbar[j];
    }
    return value;
}

double upper_value(const TrainedModel& m, const Eigen::VectorXd& z) {
    const Hyperparams& h = m.hyper;
    if (m.u_upper.size() != 0) {
        return m.u_upper.head(m.feature_dim()).dot(z) +
               m.u_upper[m.feature_dim()];
    }
    const Eigen::VectorXd kbar = augmented_kernel_column(m, z);
    double value = 0.0;
    for (Eigen::Index j = 0; j < kbar.size(); ++j) {
        value += (m.alpha_upper[j] - h.c2 * (1.0 - h.tau)) * kbar[j];
    }
    return value;
}

}  // namespace

void Hyperparams::validate() const {
    if (!(c1 > 0.0) || !(c2 > 0.0)) {
        throw std::invalid_argument(
            "hyperparams: trade-off weights must be positive");
    }
    if (!(eps1 >= 0.0) || !(eps2 >= 0.0)) {
        throw std::invalid_argument(
            "hyperparams: tube widths must be nonnegative");
    }
    if (!(tau > 0.0 && tau < 1.0)) {
        throw std::invalid_argument(
            "hyperparams: quantile level must lie strictly inside (0, 1)");
    }
    kernel.validate();
}

BoxQP assemble_lower_dual(const AugmentedGram& gram, const Eigen::VectorXd& y,
                          const Hyperparams& h) {
    if (gram.size() != y.size()) {
        throw std::invalid_argument("assemble: gram/target size mismatch");
    }
    BoxQP qp;
    qp.q = gram.matrix;
    qp.d = h.c1 * h.tau * (*gram.matrix * Eigen::VectorXd::Ones(y.size())) - y +
           Eigen::VectorXd::Constant(y.size(), h.eps1);
    qp.cap = h.c1;
    return qp;
}

BoxQP assemble_upper_dual(const AugmentedGram& gram, const Eigen::VectorXd& y,
                          const Hyperparams& h) {
    if (gram.size() != y.size()) {
        throw std::invalid_argument("assemble: gram/target size mismatch");
    }
    BoxQP qp;
    qp.q = gram.matrix;
    qp.d = h.c2 * (1.0 - h.tau) *
               (*gram.matrix * Eigen::VectorXd::Ones(y.size())) +
           y + Eigen::VectorXd::Constant(y.size(), h.eps2);
    qp.cap = h.c2;
    return qp;
}

TrainedModel fit(const Dataset& data, const Hyperparams& h,
                 const FitOptions& opts) {
    data.validate();
    h.validate();
    const auto t0 = std::chrono::steady_clock::now();

    TrainedModel m;
    m.hyper = h;
    if (opts.standardize) {
        m.standardizer = Standardizer::fit(data.inputs);
        m.train_inputs = m.standardizer->apply(data.inputs);
    } else {
        m.train_inputs = data.inputs;
    }

    Dataset fit_space;
    fit_space.inputs = m.train_inputs;
    fit_space.targets = data.targets;
    const AugmentedGram gram = build_augmented_gram(
        fit_space, h.kernel, opts.threads, opts.gram_dim_cap);

    const BoxQP lower = assemble_lower_dual(gram, data.targets, h);
    const BoxQP upper = assemble_upper_dual(gram, data.targets, h);
    m.diag_lower = solve(lower, h.solver);
    m.diag_upper = solve(upper, h.solver);
    m.alpha_lower = m.diag_lower.alpha;
    m.alpha_upper = m.diag_upper.alpha;

    if (h.kernel.family == KernelSpec::Family::Linear) {
        // Explicit coefficients u = [w; b] over the augmented design
        // G = [A e], read off the stationarity conditions.
        const Eigen::Index l = m.train_size();
        const Eigen::Index n = m.feature_dim();
        Eigen::MatrixXd g(l, n + 1);
        g.leftCols(n) = m.train_inputs;
        g.col(n).setOnes();
        m.u_lower = g.transpose() *
                    (Eigen::VectorXd::Constant(l, h.c1 * h.tau) - m.alpha_lower);
        m.u_upper = g.transpose() * (m.alpha_upper -
                                     Eigen::VectorXd::Constant(
                                         l, h.c2 * (1.0 - h.tau)));
    }

    m.fit_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return m;
}

double predict_lower(const TrainedModel& m, const Eigen::VectorXd& x) {
    return lower_value(m, to_fit_space(m, x));
}

double predict_upper(const TrainedModel& m, const Eigen::VectorXd& x) {
    return upper_value(m, to_fit_space(m, x));
}

double predict(const TrainedModel& m, const Eigen::VectorXd& x) {
    const Eigen::VectorXd z = to_fit_space(m, x);
    return 0.5 * (lower_value(m, z) + upper_value(m, z));
}

double predict_decomposed(const TrainedModel& m, const Eigen::VectorXd& x) {
    const Eigen::VectorXd z = to_fit_space(m, x);
    const Eigen::VectorXd kbar = augmented_kernel_column(m, z);
    const Hyperparams& h = m.hyper;
    double spread_term = 0.0;
    double level_sum = 0.0;
    for (Eigen::Index j = 0; j < kbar.size(); ++j) {
        spread_term += (m.alpha_upper[j] - m.alpha_lower[j]) * kbar[j];
        level_sum += kbar[j];
    }
    return 0.5 * spread_term +
           0.5 * (h.c1 * h.tau - h.c2 * (1.0 - h.tau)) * level_sum;
}

BoundsPrediction predict_batch(const TrainedModel& m,
                               const Eigen::MatrixXd& queries, int threads) {
    // Width mismatches must surface before the parallel region: a throw
    // from inside it would terminate instead of propagating.
    if (queries.cols() != m.feature_dim()) {
        throw std::invalid_argument("predict: feature dimension mismatch");
    }
    const Eigen::Index n = queries.rows();
    BoundsPrediction out;
    out.lower.resize(n);
    out.upper.resize(n);
    out.mean.resize(n);
#ifdef _OPENMP
    const int n_threads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(n_threads)
#endif
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd z = to_fit_space(m, queries.row(i).transpose());
        out.lower[i] = lower_value(m, z);
        out.upper[i] = upper_value(m, z);
        out.mean[i] = 0.5 * (out.lower[i] + out.upper[i]);
    }
    (void)threads;
    return out;
}

BoundsPrediction predict_batch_serial(const TrainedModel& m,
                                      const Eigen::MatrixXd& queries) {
    if (queries.cols() != m.feature_dim()) {
        throw std::invalid_argument("predict: feature dimension mismatch");
    }
    const Eigen::Index n = queries.rows();
    BoundsPrediction out;
    out.lower.resize(n);
    out.upper.resize(n);
    out.mean.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd z = to_fit_space(m, queries.row(i).transpose());
        out.lower[i] = lower_value(m, z);
        out.upper[i] = upper_value(m, z);
        out.mean[i] = 0.5 * (out.lower[i] + out.upper[i]);
    }
    return out;
}

SupportVectorCensus classify_support_vectors(const TrainedModel& m) {
    SupportVectorCensus c;
    const Eigen::Index l = m.train_size();
    for (Eigen::Index i = 0; i < l; ++i) {
        const BoxPos lower = box_position(m.alpha_lower[i], m.hyper.c1);
        const BoxPos upper = box_position(m.alpha_upper[i], m.hyper.c2);
        switch (lower) {
            case BoxPos::kZero: c.above_lower.push_back(i); break;
            case BoxPos::kInterior: c.on_lower.push_back(i); break;
            case BoxPos::kCap: c.below_lower.push_back(i); break;
        }
        switch (upper) {
            case BoxPos::kZero: c.inside.push_back(i); break;
            case BoxPos::kInterior: c.on_upper.push_back(i); break;
            case BoxPos::kCap: c.above_upper.push_back(i); break;
        }
        if (lower != BoxPos::kZero || upper != BoxPos::kZero) {
            c.i_sv.push_back(i);
        }
    }
    return c;
}

CoverageStats coverage_stats(const TrainedModel& m, const Dataset& data) {
    data.validate();
    const BoundsPrediction pred = predict_batch_serial(m, data.inputs);
    CoverageStats s;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const double r = data.targets[i] - pred.mean[i];
        if (std::abs(r) <= 1e-8) {
            ++s.z;
        } else if (r > 0.0) {
            ++s.p;
        } else {
            ++s.n_count;
        }
    }
    return s;
}

}  // namespace tsvqr
