#pragma once

#include <vector>

#include "tsvqr/metrics.hpp"
#include "tsvqr/model.hpp"

namespace tsvqr {

/// Exhaustive hyperparameter grid. Defaults follow the conventional
/// powers-of-two sweep for C and the kernel parameter and a 0.01..0.10
/// sweep for the tube widths. With tie_c (default) the two trade-off
/// weights move together, matching how selections are usually reported;
/// untied search squares that dimension. Same for tie_eps.
struct GridSpec {
    std::vector<double> c_values;    // defaults() fills 2^-8 .. 2^8
    std::vector<double> p_values;    // defaults() fills 2^-8 .. 2^8
    std::vector<double> eps_values;  // defaults() fills 0.01 .. 0.10 step 0.01
    std::vector<double> tau_values = {0.10, 0.25, 0.50, 0.75, 0.90};
    bool tie_c = true;
    bool tie_eps = true;

    static GridSpec defaults();

    /// Non-empty positive lists; tau values in (0,1).
    /// Throws std::invalid_argument.
    void validate() const;
};

/// One evaluated grid cell: the hyperparameters, the selection score and
/// the training-set report. Failures of an individual cell are recorded
/// (error string) instead of aborting the sweep.
struct GridCell {
    Hyperparams hyper;
    double gacv = 0.0;
    bool gacv_defined = false;
    EvalReport train_report;
    bool converged_lower = false;
    bool converged_upper = false;
    std::string error;  // empty on success

    bool failed() const { return !error.empty(); }
};

/// Fits every cell of the grid at quantile level tau and returns the
/// cells ranked best-first: ascending GACV with undefined scores last,
/// ties broken by training risk, then by smaller c1 + c2, then by grid
/// order. `family` fixes the kernel family; its parameter is swept over
/// p_values (ignored for Linear, which collapses that dimension to a
/// single cell per (c, eps) combination). Cells are fit in parallel
/// over a worker pool; the result order is deterministic regardless of
/// scheduling. The Gram matrix is built once per kernel parameter and
/// shared by all cells that use it.
std::vector<GridCell> grid_search(const Dataset& train, const GridSpec& grid,
                                  double tau, KernelSpec::Family family,
                                  const SolverConfig& solver = {},
                                  int threads = 0);

}  // namespace tsvqr
