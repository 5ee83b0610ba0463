#include "tsvqr/grid_search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tsvqr {

GridSpec GridSpec::defaults() {
    GridSpec g;
    g.c_values.reserve(17);
    g.p_values.reserve(17);
    for (int e = -8; e <= 8; ++e) {
        g.c_values.push_back(std::pow(2.0, e));
        g.p_values.push_back(std::pow(2.0, e));
    }
    g.eps_values.reserve(10);
    for (int i = 1; i <= 10; ++i) g.eps_values.push_back(i / 100.0);
    return g;  // tau_values and the tie flags keep their member defaults
}

void GridSpec::validate() const {
    const auto positive = [](const std::vector<double>& v, const char* name) {
        if (v.empty())
            throw std::invalid_argument(std::string("grid: ") + name +
                                        " is empty");
        for (double x : v)
            if (!std::isfinite(x) || !(x > 0.0))
                throw std::invalid_argument(std::string("grid: ") + name +
                                            " entries must be positive");
    };
    positive(c_values, "c_values");
    positive(p_values, "p_values");
    positive(eps_values, "eps_values");
    if (tau_values.empty())
        throw std::invalid_argument("grid: tau_values is empty");
    for (double t : tau_values)
        if (!(t > 0.0 && t < 1.0))
            throw std::invalid_argument(
                "grid: tau values must lie strictly between 0 and 1");
}

namespace {

int resolve_threads(int threads) {
    if (threads > 0) return threads;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Fits one cell against a Gram matrix that is shared across all the
/// cells of its kernel parameter. Mirrors fit() after the Gram build;
/// any exception is folded into the cell's error string so one bad cell
/// cannot abort the sweep (and cannot escape the worker pool).
GridCell run_cell(const Dataset& train, const AugmentedGram& gram,
                  const Hyperparams& h, double tau) {
    GridCell cell;
    cell.hyper = h;
    try {
        const auto t0 = std::chrono::steady_clock::now();
        TrainedModel m;
        m.hyper = h;
        m.train_inputs = train.inputs;

        const BoxQP lower = assemble_lower_dual(gram, train.targets, h);
        const BoxQP upper = assemble_upper_dual(gram, train.targets, h);
        m.diag_lower = solve(lower, h.solver);
        m.diag_upper = solve(upper, h.solver);
        m.alpha_lower = m.diag_lower.alpha;
        m.alpha_upper = m.diag_upper.alpha;

        if (h.kernel.family == KernelSpec::Family::Linear) {
            const Eigen::Index l = m.train_size();
            const Eigen::Index n = m.feature_dim();
            Eigen::MatrixXd g(l, n + 1);
            g.leftCols(n) = m.train_inputs;
            g.col(n).setOnes();
            m.u_lower =
                g.transpose() *
                (Eigen::VectorXd::Constant(l, h.c1 * h.tau) - m.alpha_lower);
            m.u_upper = g.transpose() *
                        (m.alpha_upper - Eigen::VectorXd::Constant(
                                             l, h.c2 * (1.0 - h.tau)));
        }
        m.fit_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();

        cell.converged_lower = m.diag_lower.converged;
        cell.converged_upper = m.diag_upper.converged;
        cell.train_report = evaluate(m, train, tau, &train);
        cell.gacv = cell.train_report.gacv;
        cell.gacv_defined = cell.train_report.gacv_defined;
    } catch (const std::exception& ex) {
        cell.error = ex.what();
    } catch (...) {
        cell.error = "unknown failure";
    }
    return cell;
}

}  // namespace

std::vector<GridCell> grid_search(const Dataset& train, const GridSpec& grid,
                                  double tau, KernelSpec::Family family,
                                  const SolverConfig& solver, int threads) {
    train.validate();
    grid.validate();
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument(
            "grid: tau must lie strictly between 0 and 1");

    // Linear kernels take no shape parameter, so that axis degenerates to
    // a single cell per (c, eps) combination (param 0 matches
    // KernelSpec::linear()).
    const std::vector<double> p_axis =
        family == KernelSpec::Family::Linear ? std::vector<double>{0.0}
                                             : grid.p_values;

    std::vector<std::pair<double, double>> c_combos;
    if (grid.tie_c) {
        for (double c : grid.c_values) c_combos.emplace_back(c, c);
    } else {
        for (double a : grid.c_values)
            for (double b : grid.c_values) c_combos.emplace_back(a, b);
    }
    std::vector<std::pair<double, double>> eps_combos;
    if (grid.tie_eps) {
        for (double e : grid.eps_values) eps_combos.emplace_back(e, e);
    } else {
        for (double a : grid.eps_values)
            for (double b : grid.eps_values) eps_combos.emplace_back(a, b);
    }

    // Enumerate the whole grid up front so every cell has a fixed index;
    // the workers write results by index and the final tie-break can
    // refer to the original grid order no matter how cells were
    // scheduled.
    std::vector<Hyperparams> jobs;
    jobs.reserve(p_axis.size() * c_combos.size() * eps_combos.size());
    for (double p : p_axis) {
        for (const auto& [c1, c2] : c_combos) {
            for (const auto& [e1, e2] : eps_combos) {
                Hyperparams h;
                h.c1 = c1;
                h.c2 = c2;
                h.eps1 = e1;
                h.eps2 = e2;
                h.tau = tau;
                h.kernel.family = family;
                h.kernel.param = p;
                h.solver = solver;
                jobs.push_back(h);
            }
        }
    }

    std::vector<GridCell> cells(jobs.size());
    const std::size_t per_param = c_combos.size() * eps_combos.size();
    const int n_threads = resolve_threads(threads);

    for (std::size_t pi = 0; pi < p_axis.size(); ++pi) {
        // One Gram build serves every cell of this kernel parameter; the
        // duals only share it read-only.
        const AugmentedGram gram =
            build_augmented_gram(train, jobs[pi * per_param].kernel, threads);
        const std::ptrdiff_t begin =
            static_cast<std::ptrdiff_t>(pi * per_param);
        const std::ptrdiff_t end = begin + static_cast<std::ptrdiff_t>(per_param);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
#endif
        for (std::ptrdiff_t i = begin; i < end; ++i)
            cells[static_cast<std::size_t>(i)] =
                run_cell(train, gram, jobs[static_cast<std::size_t>(i)], tau);
    }

    // Rank best-first. Undefined selection scores sink below defined
    // ones, failed cells below everything; the remaining ties prefer
    // lower training risk, then lighter regularization, then the
    // original grid order, which makes the ranking total and repeatable.
    std::vector<std::size_t> order(cells.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&cells](std::size_t a, std::size_t b) {
                  const GridCell& x = cells[a];
                  const GridCell& y = cells[b];
                  if (x.failed() != y.failed()) return !x.failed();
                  if (!x.failed()) {
                      if (x.gacv_defined != y.gacv_defined)
                          return x.gacv_defined;
                      if (x.gacv_defined && x.gacv != y.gacv)
                          return x.gacv < y.gacv;
                      if (x.train_report.risk != y.train_report.risk)
                          return x.train_report.risk < y.train_report.risk;
                      const double cx = x.hyper.c1 + x.hyper.c2;
                      const double cy = y.hyper.c1 + y.hyper.c2;
                      if (cx != cy) return cx < cy;
                  }
                  return a < b;
              });

    std::vector<GridCell> ranked;
    ranked.reserve(cells.size());
    for (std::size_t i : order) ranked.push_back(std::move(cells[i]));
    return ranked;
}

}  // namespace tsvqr
