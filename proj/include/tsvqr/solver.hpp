#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

namespace tsvqr {

/// Box-constrained quadratic program
///     min_alpha  1/2 alpha' q alpha - d' alpha
///     s.t.       0 <= alpha <= cap   (elementwise)
/// with q symmetric positive semidefinite. The matrix is shared with its
/// producer (typically an AugmentedGram) rather than copied: the two
/// duals of one fit differ only in d and cap.
struct BoxQP {
    std::shared_ptr<const Eigen::MatrixXd> q;
    Eigen::VectorXd d;
    double cap = 1.0;

    Eigen::Index size() const { return d.size(); }

    /// Checks shape agreement, cap > 0 and symmetry of q.
    /// Throws std::invalid_argument.
    void validate() const;
};

/// Knobs of the coordinate-descent solve.
struct SolverConfig {
    double tol = 1e-6;      // projected-gradient max-norm target
    int max_epochs = 1000;  // full sweeps before giving up
    bool shuffle = false;   // re-order coordinates each epoch (seeded)
    std::uint64_t seed = 0;

    /// Debug-only: recompute the gradient from scratch each epoch and
    /// throw SolverError if the incrementally maintained one has drifted
    /// more than 1e-8 away, and record the objective value after every
    /// epoch in SolveResult::epoch_objectives. Meant for tests; it turns
    /// each epoch from O(l^2) into O(l^2) with a much larger constant.
    bool debug_checks = false;
};

/// Outcome of a solve. `converged` reflects a from-scratch gradient
/// evaluation at the final iterate, not the incremental running copy, so
/// a true value certifies the KKT conditions at tol.
struct SolveResult {
    Eigen::VectorXd alpha;
    int epochs_run = 0;
    double final_pg_norm = 0.0;  // projected-gradient max-norm at exit
    double objective = 0.0;      // 1/2 a'qa - d'a at exit
    bool converged = false;
    int zero_diag_hits = 0;      // coordinates handled by the linear branch
    std::vector<double> epoch_objectives;  // filled only under debug_checks
};

/// Exact quadratic objective 1/2 alpha' q alpha - d' alpha.
/// Throws std::invalid_argument on length mismatch.
double objective(const BoxQP& qp, const Eigen::VectorXd& alpha);

/// Minimizes the box QP by cyclic single-coordinate descent with
/// closed-form clipped updates:
///     alpha_i <- clip(alpha_i - g_i / q_ii, 0, cap),  g = q alpha - d.
/// The gradient is maintained incrementally (g += delta * q.col(i), one
/// O(l) sweep per update). Iteration starts from zero unless a warm
/// start inside the box is supplied. Stops when the projected gradient
///     pg_i = g_i            if 0 < alpha_i < cap
///          = min(g_i, 0)    if alpha_i = 0
///          = max(g_i, 0)    if alpha_i = cap
/// has max-norm <= cfg.tol — verified against a freshly computed
/// gradient before declaring success — or after cfg.max_epochs sweeps,
/// whichever comes first. A solve is strictly sequential; distinct
/// solves may run concurrently and may share one q.
///
/// Near-zero diagonal entries (q_ii < 1e-12) make the one-dimensional
/// restriction linear; the coordinate is then pushed to whichever box
/// end the gradient sign favors and zero_diag_hits is bumped. Augmented
/// Gram matrices have diagonal >= 1, so for them this branch is dead.
///
/// Throws std::invalid_argument for invalid inputs or a warm start
/// outside the box.
SolveResult solve(const BoxQP& qp, const SolverConfig& cfg,
                  const Eigen::VectorXd* warm_start = nullptr);

}  // namespace tsvqr
