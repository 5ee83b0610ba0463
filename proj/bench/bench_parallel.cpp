// Benchmarks the parallel kernels against their serial references and
// verifies bitwise agreement while at it. The library's contract is that
// thread count never changes a single output bit, so the agreement
// column doubles as a smoke test: the binary exits nonzero on any
// mismatch. On a single-core host the timing columns are expected to be
// close; the speedup column only becomes meaningful with real cores.

#include <chrono>
#include <cstdio>
#include <functional>

#include "tsvqr/grid_search.hpp"
#include "tsvqr/kernels.hpp"
#include "tsvqr/model.hpp"
#include "tsvqr/synthetic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace tsvqr;

/// Best-of-three wall time of a callable, in seconds.
double time_best(const std::function<void()>& fn) {
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const double s = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        if (s < best) best = s;
    }
    return best;
}

bool report(const char* label, double serial_s, double parallel_s,
            bool identical) {
    std::printf("%-22s %10.4f ms %10.4f ms   x%.2f   %s\n", label,
                serial_s * 1e3, parallel_s * 1e3,
                parallel_s > 0 ? serial_s / parallel_s : 0.0,
                identical ? "bitwise equal" : "MISMATCH");
    return identical;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; both columns run the same code\n\n");
#endif
    std::printf("%-22s %13s %13s %6s   %s\n", "kernel", "serial", "parallel",
                "spd", "agreement");

    GeneratorSpec spec;
    spec.family = Family::B1;
    spec.n_train = 600;
    spec.n_test = 400;
    spec.seed = 42;
    const auto [train, test] = generate(spec);

    bool all_equal = true;

    // Gram build -------------------------------------------------------
    const KernelSpec kernel = KernelSpec::gaussian(2.0);
    AugmentedGram serial_gram, parallel_gram;
    const double gram_serial =
        time_best([&] { serial_gram = build_augmented_gram_serial(train, kernel); });
    const double gram_parallel =
        time_best([&] { parallel_gram = build_augmented_gram(train, kernel); });
    all_equal &= report(
        "augmented gram", gram_serial, gram_parallel,
        (serial_gram.matrix->array() == parallel_gram.matrix->array()).all());

    // Batch prediction --------------------------------------------------
    Hyperparams h;
    h.c1 = h.c2 = 2.0;
    h.eps1 = h.eps2 = 0.05;
    h.tau = 0.5;
    h.kernel = kernel;
    h.solver.max_epochs = 200;
    const TrainedModel model = fit(train, h);

    BoundsPrediction serial_pred, parallel_pred;
    const double pred_serial =
        time_best([&] { serial_pred = predict_batch_serial(model, test.inputs); });
    const double pred_parallel =
        time_best([&] { parallel_pred = predict_batch(model, test.inputs); });
    all_equal &= report(
        "batch predict", pred_serial, pred_parallel,
        (serial_pred.lower.array() == parallel_pred.lower.array()).all() &&
            (serial_pred.upper.array() == parallel_pred.upper.array()).all() &&
            (serial_pred.mean.array() == parallel_pred.mean.array()).all());

    // Grid search -------------------------------------------------------
    GridSpec grid;
    grid.c_values = {1.0, 2.0, 8.0};
    grid.p_values = {1.0, 2.0};
    grid.eps_values = {0.05};
    SolverConfig solver;
    solver.max_epochs = 200;

    std::vector<GridCell> one_thread, all_threads;
    const double grid_serial = time_best([&] {
        one_thread = grid_search(train, grid, 0.5, KernelSpec::Family::Gaussian,
                                 solver, 1);
    });
    const double grid_parallel = time_best([&] {
        all_threads = grid_search(train, grid, 0.5,
                                  KernelSpec::Family::Gaussian, solver, 0);
    });
    bool grids_equal = one_thread.size() == all_threads.size();
    for (std::size_t i = 0; grids_equal && i < one_thread.size(); ++i) {
        grids_equal = one_thread[i].hyper.c1 == all_threads[i].hyper.c1 &&
                      one_thread[i].hyper.kernel.param ==
                          all_threads[i].hyper.kernel.param &&
                      one_thread[i].gacv == all_threads[i].gacv &&
                      one_thread[i].train_report.risk ==
                          all_threads[i].train_report.risk;
    }
    all_equal &= report("grid search", grid_serial, grid_parallel, grids_equal);

    if (!all_equal) {
        std::printf("\nFAILURE: a parallel kernel diverged from its serial "
                    "reference\n");
        return 1;
    }
    std::printf("\nall parallel kernels agree with their serial references\n");
    return 0;
}
