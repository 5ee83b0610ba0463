#include "tsvqr/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tsvqr {

namespace {

/// Kernel value on two rows of a matrix. Row expressions avoid the
/// temporary a VectorXd round-trip would cost in the O(l^2) build loop.
template <typename RowA, typename RowB>
double kernel_rows(const KernelSpec& spec, const RowA& x, const RowB& z) {
    switch (spec.family) {
        case KernelSpec::Family::Linear:
            return x.dot(z);
        case KernelSpec::Family::Gaussian: {
            const double sq = (x - z).squaredNorm();
            return std::exp(-sq / (2.0 * spec.param * spec.param));
        }
        case KernelSpec::Family::Wavelet: {
            double value = 1.0;
            for (Eigen::Index d = 0; d < x.size(); ++d) {
                const double diff = x[d] - z[d];
                value *= std::cos(1.75 * diff / spec.param) *
                         std::exp(-diff * diff / (2.0 * spec.param * spec.param));
            }
            return value;
        }
    }
    throw std::invalid_argument("kernel: unknown family");
}

void check_dim_cap(Eigen::Index rows, Eigen::Index dim_cap) {
    if (rows > dim_cap) {
        throw std::invalid_argument(
            "gram: " + std::to_string(rows) + " rows exceed the matrix cap of " +
            std::to_string(dim_cap) +
            " (raise dim_cap explicitly to build anyway)");
    }
}

int resolve_threads(int threads) {
#ifdef _OPENMP
    return threads > 0 ? threads : omp_get_max_threads();
#else
    (void)threads;
    return 1;
#endif
}

AugmentedGram finish_gram(std::shared_ptr<Eigen::MatrixXd> m) {
    AugmentedGram g;
    g.diag = m->diagonal();
    g.matrix = std::move(m);
    return g;
}

}  // namespace

void KernelSpec::validate() const {
    switch (family) {
        case Family::Linear:
            return;
        case Family::Gaussian:
        case Family::Wavelet:
            if (!(param > 0.0)) {
                throw std::invalid_argument(
                    "kernel: shape parameter must be positive");
            }
            return;
    }
    throw std::invalid_argument("kernel: unknown family");
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& z) {
    spec.validate();
    if (x.size() != z.size()) {
        throw std::invalid_argument("kernel: dimension mismatch");
    }
    return kernel_rows(spec, x, z);
}

AugmentedGram build_augmented_gram(const Dataset& data, const KernelSpec& spec,
                                   int threads, Eigen::Index dim_cap) {
    data.validate();
    spec.validate();
    check_dim_cap(data.rows(), dim_cap);

    const Eigen::Index l = data.rows();
    auto m = std::make_shared<Eigen::MatrixXd>(l, l);
    const Eigen::MatrixXd& a = data.inputs;
    const int n_threads = resolve_threads(threads);

    // Upper triangle only; entry (i,j) depends on rows i,j alone, so the
    // schedule cannot change any value, only who computes it.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) num_threads(n_threads)
#endif
    for (Eigen::Index i = 0; i < l; ++i) {
        for (Eigen::Index j = i; j < l; ++j) {
            const double v = kernel_rows(spec, a.row(i), a.row(j)) + 1.0;
            (*m)(i, j) = v;
            (*m)(j, i) = v;
        }
    }
    (void)n_threads;
    return finish_gram(std::move(m));
}

AugmentedGram build_augmented_gram_serial(const Dataset& data,
                                          const KernelSpec& spec,
                                          Eigen::Index dim_cap) {
    data.validate();
    spec.validate();
    check_dim_cap(data.rows(), dim_cap);

    const Eigen::Index l = data.rows();
    auto m = std::make_shared<Eigen::MatrixXd>(l, l);
    const Eigen::MatrixXd& a = data.inputs;
    for (Eigen::Index i = 0; i < l; ++i) {
        for (Eigen::Index j = i; j < l; ++j) {
            const double v = kernel_rows(spec, a.row(i), a.row(j)) + 1.0;
            (*m)(i, j) = v;
            (*m)(j, i) = v;
        }
    }
    return finish_gram(std::move(m));
}

Eigen::MatrixXd augmented_cross_gram(const KernelSpec& spec,
                                     const Eigen::MatrixXd& train_inputs,
                                     const Eigen::MatrixXd& queries,
                                     int threads) {
    spec.validate();
    if (train_inputs.cols() != queries.cols()) {
        throw std::invalid_argument("cross gram: feature dimension mismatch");
    }
    const Eigen::Index m_rows = queries.rows();
    const Eigen::Index l = train_inputs.rows();
    Eigen::MatrixXd k(m_rows, l);
    const int n_threads = resolve_threads(threads);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(n_threads)
#endif
    for (Eigen::Index i = 0; i < m_rows; ++i) {
        for (Eigen::Index j = 0; j < l; ++j) {
            k(i, j) = kernel_rows(spec, queries.row(i), train_inputs.row(j)) + 1.0;
        }
    }
    (void)n_threads;
    return k;
}

Eigen::MatrixXd augmented_cross_gram_serial(const KernelSpec& spec,
                                            const Eigen::MatrixXd& train_inputs,
                                            const Eigen::MatrixXd& queries) {
    spec.validate();
    if (train_inputs.cols() != queries.cols()) {
        throw std::invalid_argument("cross gram: feature dimension mismatch");
    }
    const Eigen::Index m_rows = queries.rows();
    const Eigen::Index l = train_inputs.rows();
    Eigen::MatrixXd k(m_rows, l);
    for (Eigen::Index i = 0; i < m_rows; ++i) {
        for (Eigen::Index j = 0; j < l; ++j) {
            k(i, j) = kernel_rows(spec, queries.row(i), train_inputs.row(j)) + 1.0;
        }
    }
    return k;
}

}  // namespace tsvqr
