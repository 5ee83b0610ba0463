#include "tsvqr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tsvqr/errors.hpp"
#include "tsvqr/rng.hpp"

namespace tsvqr {

namespace {

constexpr double kZeroDiag = 1e-12;

double projected_gradient_norm(const Eigen::VectorXd& alpha,
                               const Eigen::VectorXd& g, double cap) {
    double norm = 0.0;
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        double pg = g[i];
        if (alpha[i] <= 0.0) {
            pg = std::min(pg, 0.0);
        } else if (alpha[i] >= cap) {
            pg = std::max(pg, 0.0);
        }
        norm = std::max(norm, std::abs(pg));
    }
    return norm;
}

}  // namespace

void BoxQP::validate() const {
    if (!q) throw std::invalid_argument("box qp: missing matrix");
    if (q->rows() != q->cols()) {
        throw std::invalid_argument("box qp: matrix must be square");
    }
    if (q->rows() != d.size()) {
        throw std::invalid_argument(
            "box qp: linear term length must match the matrix dimension");
    }
    if (!(cap > 0.0)) throw std::invalid_argument("box qp: cap must be positive");
    if (!q->isApprox(q->transpose(), 1e-10)) {
        throw std::invalid_argument("box qp: matrix must be symmetric");
    }
}

double objective(const BoxQP& qp, const Eigen::VectorXd& alpha) {
    if (!qp.q || alpha.size() != qp.d.size() || alpha.size() != qp.q->rows()) {
        throw std::invalid_argument("objective: length mismatch");
    }
    return 0.5 * alpha.dot(*qp.q * alpha) - qp.d.dot(alpha);
}

SolveResult solve(const BoxQP& qp, const SolverConfig& cfg,
                  const Eigen::VectorXd* warm_start) {
    qp.validate();
    if (cfg.tol <= 0.0) {
        throw std::invalid_argument("solver: tolerance must be positive");
    }
    if (cfg.max_epochs < 1) {
        throw std::invalid_argument("solver: max_epochs must be at least 1");
    }

    const Eigen::Index l = qp.size();
    const Eigen::MatrixXd& q = *qp.q;
    const double cap = qp.cap;

    SolveResult res;
    if (warm_start != nullptr) {
        if (warm_start->size() != l) {
            throw std::invalid_argument("solver: warm start length mismatch");
        }
        if ((warm_start->array() < 0.0).any() ||
            (warm_start->array() > cap).any()) {
            throw std::invalid_argument("solver: warm start outside the box");
        }
        res.alpha = *warm_start;
    } else {
        res.alpha = Eigen::VectorXd::Zero(l);
    }

    // Running gradient g = q alpha - d, updated in O(l) per coordinate
    // move. From the all-zero start this is just -d.
    Eigen::VectorXd g = warm_start != nullptr ? (q * res.alpha - qp.d).eval()
                                              : (-qp.d).eval();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(l));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng shuffle_rng = Rng::derive(cfg.seed, 0x5eed);

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        if (cfg.shuffle) {
            // Fisher-Yates with the portable generator: deterministic for
            // a given seed on every platform.
            for (Eigen::Index i = l - 1; i > 0; --i) {
                const auto j = static_cast<Eigen::Index>(
                    shuffle_rng.below(static_cast<std::uint64_t>(i) + 1));
                std::swap(order[static_cast<std::size_t>(i)],
                          order[static_cast<std::size_t>(j)]);
            }
        }

        // Track the worst pre-update projected gradient seen this sweep;
        // it bounds how far the sweep started from stationarity.
        double sweep_pg = 0.0;
        for (const Eigen::Index i : order) {
            const double gi = g[i];
            const double ai = res.alpha[i];

            double pg = gi;
            if (ai <= 0.0) {
                pg = std::min(pg, 0.0);
            } else if (ai >= cap) {
                pg = std::max(pg, 0.0);
            }
            sweep_pg = std::max(sweep_pg, std::abs(pg));
            if (pg == 0.0) continue;

            double target;
            const double qii = q(i, i);
            if (qii < kZeroDiag) {
                // Degenerate one-dimensional restriction: linear in
                // alpha_i, so the minimum sits at a box end.
                ++res.zero_diag_hits;
                target = gi > 0.0 ? 0.0 : cap;
            } else {
                target = std::clamp(ai - gi / qii, 0.0, cap);
            }
            const double delta = target - ai;
            if (delta == 0.0) continue;
            res.alpha[i] = target;
            g.noalias() += delta * q.col(i);
        }
        res.epochs_run = epoch;

        if (cfg.debug_checks) {
            const Eigen::VectorXd fresh = q * res.alpha - qp.d;
            const double drift = (g - fresh).cwiseAbs().maxCoeff();
            if (drift > 1e-8) {
                throw SolverError(
                    "solver: incremental gradient drifted " +
                    std::to_string(drift) + " from the exact one");
            }
            res.epoch_objectives.push_back(objective(qp, res.alpha));
        }

        if (sweep_pg <= cfg.tol) {
            // Candidate stop. The running gradient has accumulated l
            // epochs of rounding; only a from-scratch evaluation may
            // certify convergence.
            g.noalias() = q * res.alpha - qp.d;
            const double fresh_pg = projected_gradient_norm(res.alpha, g, cap);
            if (fresh_pg <= cfg.tol) {
                res.converged = true;
                res.final_pg_norm = fresh_pg;
                res.objective = objective(qp, res.alpha);
                return res;
            }
            // Spurious: keep iterating with the refreshed gradient.
        }
    }

    const Eigen::VectorXd fresh = q * res.alpha - qp.d;
    res.final_pg_norm = projected_gradient_norm(res.alpha, fresh, cap);
    res.converged = res.final_pg_norm <= cfg.tol;
    res.objective = objective(qp, res.alpha);
    return res;
}

}  // namespace tsvqr
