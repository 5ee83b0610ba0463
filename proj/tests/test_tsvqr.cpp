#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "test_util.hpp"
#include "tsvqr/model.hpp"
#include "tsvqr/synthetic.hpp"

using namespace tsvqr;
using tsvqr_test::random_dataset;
using tsvqr_test::random_hyperparams;

namespace {

Hyperparams basic_hyper(double c1, double c2, double tau, KernelSpec k,
                        double eps = 0.01) {
    Hyperparams h;
    h.c1 = c1;
    h.c2 = c2;
    h.eps1 = eps;
    h.eps2 = eps;
    h.tau = tau;
    h.kernel = k;
    return h;
}

AugmentedGram gram_of(std::initializer_list<std::initializer_list<double>> q) {
    const auto l = static_cast<Eigen::Index>(q.size());
    auto m = std::make_shared<Eigen::MatrixXd>(l, l);
    Eigen::Index i = 0;
    for (const auto& row : q) {
        Eigen::Index j = 0;
        for (double v : row) (*m)(i, j++) = v;
        ++i;
    }
    AugmentedGram g;
    g.diag = m->diagonal();
    g.matrix = std::move(m);
    return g;
}

}  // namespace

TEST_CASE("hyperparameter validation") {
    Hyperparams h = basic_hyper(1, 1, 0.5, KernelSpec::gaussian(1.0));
    CHECK_NOTHROW(h.validate());
    h.tau = 0.0;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
    h.tau = 1.0;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
    h.tau = 0.5;
    h.c1 = 0.0;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
    h.c1 = 1.0;
    h.eps2 = -1.0;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
}

TEST_CASE("lower dual assembly matches hand values") {
    Eigen::VectorXd y1(1);

    SUBCASE("single point") {
        const AugmentedGram g = gram_of({{2.0}});
        y1 << 0.0;
        const BoxQP qp =
            assemble_lower_dual(g, y1, basic_hyper(1, 1, 0.5, KernelSpec::linear()));
        CHECK(qp.d[0] == doctest::Approx(1.01).epsilon(1e-14));
        CHECK(qp.cap == 1.0);
        CHECK(qp.q.get() == g.matrix.get());  // shared, not copied
    }
    SUBCASE("large positive target drives the multiplier to zero") {
        const AugmentedGram g = gram_of({{2.0}});
        y1 << 100.0;
        const BoxQP qp =
            assemble_lower_dual(g, y1, basic_hyper(1, 1, 0.5, KernelSpec::linear()));
        CHECK(qp.d[0] == doctest::Approx(-98.99).epsilon(1e-14));
        const SolveResult r = solve(qp, {});
        CHECK(r.alpha[0] == 0.0);
    }
    SUBCASE("two points, linear kernel") {
        // Gram of A = [[1],[2]] is [[2,3],[3,5]]; row sums (5, 8).
        const AugmentedGram g = gram_of({{2.0, 3.0}, {3.0, 5.0}});
        Eigen::VectorXd y(2);
        y << 1.0, 1.0;
        const BoxQP qp = assemble_lower_dual(
            g, y, basic_hyper(2, 2, 0.25, KernelSpec::linear(), 0.1));
        CHECK(qp.d[0] == doctest::Approx(1.6).epsilon(1e-14));
        CHECK(qp.d[1] == doctest::Approx(3.1).epsilon(1e-14));
        CHECK(qp.cap == 2.0);
    }
    SUBCASE("dimension mismatch") {
        const AugmentedGram g = gram_of({{2.0}});
        Eigen::VectorXd y(2);
        y << 1, 2;
        CHECK_THROWS_AS((void)assemble_lower_dual(
                            g, y, basic_hyper(1, 1, 0.5, KernelSpec::linear())),
                        std::invalid_argument);
    }
}

TEST_CASE("upper dual assembly matches hand values") {
    const AugmentedGram g = gram_of({{2.0}});
    Eigen::VectorXd y(1);

    SUBCASE("symmetric to the lower case at tau one half") {
        y << 0.0;
        const BoxQP qp =
            assemble_upper_dual(g, y, basic_hyper(1, 1, 0.5, KernelSpec::linear()));
        CHECK(qp.d[0] == doctest::Approx(1.01).epsilon(1e-14));
        CHECK(qp.cap == 1.0);
    }
    SUBCASE("large negative target zeroes the multiplier") {
        y << -100.0;
        const BoxQP qp =
            assemble_upper_dual(g, y, basic_hyper(1, 1, 0.5, KernelSpec::linear()));
        CHECK(qp.d[0] == doctest::Approx(-98.99).epsilon(1e-14));
        CHECK(solve(qp, {}).alpha[0] == 0.0);
    }
    SUBCASE("tau 0.9") {
        y << 1.0;
        Hyperparams h = basic_hyper(1, 1, 0.9, KernelSpec::linear());
        h.eps2 = 0.05;
        const BoxQP qp = assemble_upper_dual(g, y, h);
        CHECK(qp.d[0] == doctest::Approx(1.25).epsilon(1e-14));
    }
}

TEST_CASE("flat data is fit with permutation-symmetric multipliers") {
    Dataset d;
    d.inputs = Eigen::MatrixXd::Zero(3, 1);
    d.targets = Eigen::VectorXd::Constant(3, 5.0);
    const TrainedModel m =
        fit(d, basic_hyper(1, 1, 0.5, KernelSpec::gaussian(1.0)));
    for (int i = 1; i < 3; ++i) {
        CHECK(m.alpha_lower[i] == doctest::Approx(m.alpha_lower[0]).epsilon(1e-9));
        CHECK(m.alpha_upper[i] == doctest::Approx(m.alpha_upper[0]).epsilon(1e-9));
    }
}

TEST_CASE("dual feasibility holds after every fit") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        const Dataset d = random_dataset(seed, 25, 2);
        const Hyperparams h = random_hyperparams(seed);
        const TrainedModel m = fit(d, h);
        CHECK((m.alpha_lower.array() >= 0.0).all());
        CHECK((m.alpha_lower.array() <= h.c1).all());
        CHECK((m.alpha_upper.array() >= 0.0).all());
        CHECK((m.alpha_upper.array() <= h.c2).all());
    }
}

TEST_CASE("refitting identical inputs reproduces identical multipliers") {
    const Dataset d = random_dataset(6, 30, 1);
    const Hyperparams h = random_hyperparams(6);
    const TrainedModel a = fit(d, h);
    const TrainedModel b = fit(d, h);
    CHECK((a.alpha_lower.array() == b.alpha_lower.array()).all());
    CHECK((a.alpha_upper.array() == b.alpha_upper.array()).all());
}

TEST_CASE("bound predictors match hand values") {
    SUBCASE("coefficients vanish when alpha sits at c1 tau") {
        // alpha = c1 tau e makes every f1 coefficient zero.
        TrainedModel m;
        m.hyper = basic_hyper(2, 2, 0.25, KernelSpec::gaussian(1.0));
        m.train_inputs = Eigen::MatrixXd::Random(4, 1);
        m.alpha_lower = Eigen::VectorXd::Constant(4, 2 * 0.25);
        m.alpha_upper = Eigen::VectorXd::Zero(4);
        Eigen::VectorXd x(1);
        x << 0.3;
        CHECK(predict_lower(m, x) == 0.0);
    }
    SUBCASE("single linear training point, lower") {
        TrainedModel m;
        m.hyper = basic_hyper(1, 1, 0.5, KernelSpec::linear());
        m.train_inputs = Eigen::MatrixXd::Constant(1, 1, 1.0);
        m.alpha_lower = Eigen::VectorXd::Zero(1);
        m.alpha_upper = Eigen::VectorXd::Zero(1);
        Eigen::VectorXd x(1);
        x << 3.0;
        // f1(3) = (c1 tau - 0) * (1*3 + 1) = 0.5 * 4 = 2.
        CHECK(predict_lower(m, x) == doctest::Approx(2.0).epsilon(1e-14));
    }
    SUBCASE("single linear training point, upper") {
        TrainedModel m;
        m.hyper = basic_hyper(1, 1, 0.5, KernelSpec::linear());
        m.train_inputs = Eigen::MatrixXd::Constant(1, 1, 1.0);
        m.alpha_lower = Eigen::VectorXd::Zero(1);
        m.alpha_upper = Eigen::VectorXd::Ones(1);
        Eigen::VectorXd x(1);
        x << 3.0;
        // f2(3) = (1 - c2 (1-tau)) * 4 = 0.5 * 4 = 2.
        CHECK(predict_upper(m, x) == doctest::Approx(2.0).epsilon(1e-14));
        // alpha* at c2 (1-tau) zeroes f2 instead.
        m.alpha_upper[0] = 0.5;
        CHECK(predict_upper(m, x) == 0.0);
    }
}

TEST_CASE("linear cache agrees with the kernel path everywhere") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const Dataset d = random_dataset(seed, 20, 3);
        Hyperparams h = random_hyperparams(seed);
        h.kernel = KernelSpec::linear();
        const TrainedModel m = fit(d, h);
        REQUIRE(m.u_lower.size() == 4);  // [w; b]
        REQUIRE(m.u_upper.size() == 4);

        // KKT link: u1 = G'(c1 tau e - alpha), u2 = G'(alpha* - c2(1-tau) e).
        Eigen::MatrixXd g(20, 4);
        g.leftCols(3) = m.train_inputs;
        g.col(3).setOnes();
        const Eigen::VectorXd u1 =
            g.transpose() *
            (Eigen::VectorXd::Constant(20, h.c1 * h.tau) - m.alpha_lower);
        const Eigen::VectorXd u2 =
            g.transpose() *
            (m.alpha_upper - Eigen::VectorXd::Constant(20, h.c2 * (1 - h.tau)));
        CHECK((m.u_lower - u1).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((m.u_upper - u2).cwiseAbs().maxCoeff() <= 1e-8);

        // Cached-coefficient prediction equals the kernel expansion.
        Rng rng = Rng::derive(seed, 77);
        for (int rep = 0; rep < 20; ++rep) {
            Eigen::VectorXd x(3);
            for (int j = 0; j < 3; ++j) x[j] = rng.uniform(-3, 3);
            double kernel_lower = 0.0, kernel_upper = 0.0;
            for (Eigen::Index i = 0; i < 20; ++i) {
                const double kbar =
                    m.train_inputs.row(i).dot(x.transpose()) + 1.0;
                kernel_lower += (h.c1 * h.tau - m.alpha_lower[i]) * kbar;
                kernel_upper +=
                    (m.alpha_upper[i] - h.c2 * (1 - h.tau)) * kbar;
            }
            CHECK(predict_lower(m, x) ==
                  doctest::Approx(kernel_lower).epsilon(1e-10));
            CHECK(predict_upper(m, x) ==
                  doctest::Approx(kernel_upper).epsilon(1e-10));
        }
    }
}

TEST_CASE("predict is exactly the mean of the bound functions") {
    const Dataset d = random_dataset(21, 18, 2);
    const TrainedModel m = fit(d, random_hyperparams(21));
    Rng rng = Rng::derive(21, 5);
    for (int rep = 0; rep < 100; ++rep) {
        Eigen::VectorXd x(2);
        x << rng.uniform(-3, 3), rng.uniform(-3, 3);
        CHECK(predict(m, x) == 0.5 * (predict_lower(m, x) + predict_upper(m, x)));
    }
}

TEST_CASE("two-term decomposition agrees with the averaged form") {
    for (std::uint64_t seed : {31u, 32u, 33u, 34u}) {
        const Dataset d = random_dataset(seed, 15, 2);
        const TrainedModel m = fit(d, random_hyperparams(seed));
        Rng rng = Rng::derive(seed, 6);
        for (int rep = 0; rep < 50; ++rep) {
            Eigen::VectorXd x(2);
            x << rng.uniform(-3, 3), rng.uniform(-3, 3);
            CHECK(std::abs(predict(m, x) - predict_decomposed(m, x)) <= 1e-10);
        }
    }
}

TEST_CASE("the tau-plumbing term of the decomposition is monotone in tau") {
    // With multipliers held fixed, the second term is
    // (c1 tau - c2 (1-tau))/2 * sum_j kbar_j(x), nondecreasing in tau
    // whenever the kernel-sum factor is nonnegative.
    const double c = 2.0;
    Eigen::VectorXd ksum(1);
    for (double ks : {0.0, 0.7, 3.0}) {
        double prev = -1e300;
        for (double tau : {0.1, 0.25, 0.5, 0.75, 0.9}) {
            const double term = 0.5 * (c * tau - c * (1 - tau)) * ks;
            CHECK(term >= prev - 1e-15);
            prev = term;
        }
    }
}

TEST_CASE("mirror symmetry: negated targets with swapped roles negate predictions") {
    for (std::uint64_t seed : {41u, 42u, 43u, 44u, 45u}) {
        const Dataset d = random_dataset(seed, 16, 2);
        Hyperparams h = random_hyperparams(seed);

        Dataset neg = d;
        neg.targets = -neg.targets;
        Hyperparams hm = h;
        hm.tau = 1.0 - h.tau;
        std::swap(hm.c1, hm.c2);
        std::swap(hm.eps1, hm.eps2);

        const TrainedModel m = fit(d, h);
        const TrainedModel mm = fit(neg, hm);
        Rng rng = Rng::derive(seed, 7);
        for (int rep = 0; rep < 25; ++rep) {
            Eigen::VectorXd x(2);
            x << rng.uniform(-3, 3), rng.uniform(-3, 3);
            CHECK(predict(mm, x) == doctest::Approx(-predict(m, x)).epsilon(1e-8));
            CHECK(predict_upper(mm, x) ==
                  doctest::Approx(-predict_lower(m, x)).epsilon(1e-8));
            CHECK(predict_lower(mm, x) ==
                  doctest::Approx(-predict_upper(m, x)).epsilon(1e-8));
        }
    }
}

TEST_CASE("batch prediction matches pointwise prediction, serial and parallel") {
    const Dataset d = random_dataset(51, 22, 2);
    const TrainedModel m = fit(d, random_hyperparams(51));
    const Dataset q = random_dataset(52, 40, 2);
    const BoundsPrediction par = predict_batch(m, q.inputs, 4);
    const BoundsPrediction ser = predict_batch_serial(m, q.inputs);
    CHECK((par.lower.array() == ser.lower.array()).all());
    CHECK((par.upper.array() == ser.upper.array()).all());
    CHECK((par.mean.array() == ser.mean.array()).all());
    for (Eigen::Index i = 0; i < 40; ++i) {
        const Eigen::VectorXd x = q.inputs.row(i).transpose();
        CHECK(par.lower[i] == predict_lower(m, x));
        CHECK(par.upper[i] == predict_upper(m, x));
        CHECK(par.mean[i] == predict(m, x));
    }
}

TEST_CASE("support vector census partitions the index set") {
    TrainedModel m;
    m.hyper = basic_hyper(2, 3, 0.4, KernelSpec::gaussian(1.0));
    m.train_inputs = Eigen::MatrixXd::Random(5, 1);

    SUBCASE("all multipliers zero") {
        m.alpha_lower = Eigen::VectorXd::Zero(5);
        m.alpha_upper = Eigen::VectorXd::Zero(5);
        const SupportVectorCensus c = classify_support_vectors(m);
        CHECK(c.above_lower.size() == 5);
        CHECK(c.on_lower.empty());
        CHECK(c.below_lower.empty());
        CHECK(c.inside.size() == 5);
        CHECK(c.i_sv.empty());
    }
    SUBCASE("all multipliers at their caps") {
        m.alpha_lower = Eigen::VectorXd::Constant(5, 2.0);
        m.alpha_upper = Eigen::VectorXd::Constant(5, 3.0);
        const SupportVectorCensus c = classify_support_vectors(m);
        CHECK(c.below_lower.size() == 5);
        CHECK(c.above_upper.size() == 5);
        CHECK(c.i_sv.size() == 5);
    }
    SUBCASE("mixed positions") {
        m.alpha_lower.resize(5);
        m.alpha_lower << 0.0, 1.0, 2.0, 0.0, 1e-9;   // zero, interior, cap, zero, ~zero
        m.alpha_upper.resize(5);
        m.alpha_upper << 0.0, 0.0, 0.0, 1.5, 3.0;    // zero, zero, zero, interior, cap
        const SupportVectorCensus c = classify_support_vectors(m);
        CHECK(c.above_lower == std::vector<Eigen::Index>{0, 3, 4});
        CHECK(c.on_lower == std::vector<Eigen::Index>{1});
        CHECK(c.below_lower == std::vector<Eigen::Index>{2});
        CHECK(c.inside == std::vector<Eigen::Index>{0, 1, 2});
        CHECK(c.on_upper == std::vector<Eigen::Index>{3});
        CHECK(c.above_upper == std::vector<Eigen::Index>{4});
        CHECK(c.i_sv == std::vector<Eigen::Index>{1, 2, 3, 4});
        CHECK(c.on_lower.size() + c.below_lower.size() + c.above_lower.size() ==
              5);
        CHECK(c.on_upper.size() + c.above_upper.size() + c.inside.size() == 5);
    }
}

TEST_CASE("interior lower multipliers sit on the shifted tube edge") {
    // On a converged fit, stationarity makes interior-alpha points
    // satisfy y - f1(x) = eps1 to solver tolerance.
    GeneratorSpec spec;
    spec.family = Family::B1;
    spec.n_train = 60;
    spec.n_test = 10;
    spec.seed = 3;
    const auto [train, test] = generate(spec);
    Hyperparams h = basic_hyper(2, 2, 0.5, KernelSpec::gaussian(2.0), 0.05);
    h.solver.tol = 1e-8;
    h.solver.max_epochs = 200000;
    const TrainedModel m = fit(train, h);
    REQUIRE(m.diag_lower.converged);
    const SupportVectorCensus c = classify_support_vectors(m);
    bool any = false;
    for (const Eigen::Index i : c.on_lower) {
        any = true;
        const double f1 = predict_lower(m, train.inputs.row(i).transpose());
        CHECK(std::abs(train.targets[i] - f1 - h.eps1) <= 1e-4);
    }
    CHECK(any);  // a healthy fit has interior points
}

TEST_CASE("coverage stats count residual signs") {
    SUBCASE("perfect interpolation counts all zeros") {
        // A model that predicts exactly zero everywhere, on zero targets.
        TrainedModel m;
        m.hyper = basic_hyper(2, 2, 0.25, KernelSpec::gaussian(1.0));
        m.train_inputs = Eigen::MatrixXd::Random(6, 1);
        m.alpha_lower = Eigen::VectorXd::Constant(6, 2 * 0.25);        // f1 = 0
        m.alpha_upper = Eigen::VectorXd::Constant(6, 2 * (1 - 0.25));  // f2 = 0
        Dataset d;
        d.inputs = m.train_inputs;
        d.targets = Eigen::VectorXd::Zero(6);
        const CoverageStats s = coverage_stats(m, d);
        CHECK(s.p == 0);
        CHECK(s.n_count == 0);
        CHECK(s.z == 6);
    }
    SUBCASE("predictor below every target counts all positives") {
        TrainedModel m;
        m.hyper = basic_hyper(2, 2, 0.25, KernelSpec::gaussian(1.0));
        m.train_inputs = Eigen::MatrixXd::Random(6, 1);
        m.alpha_lower = Eigen::VectorXd::Constant(6, 2 * 0.25);
        m.alpha_upper = Eigen::VectorXd::Constant(6, 2 * (1 - 0.25));
        Dataset d;
        d.inputs = m.train_inputs;
        d.targets = Eigen::VectorXd::Constant(6, 3.0);  // f = 0 < 3 = min(y)
        const CoverageStats s = coverage_stats(m, d);
        CHECK(s.p == 6);
        CHECK(s.p + s.n_count + s.z == 6);
    }
}

TEST_CASE("fit diagnostics carry dual objectives and convergence flags") {
    const Dataset d = random_dataset(61, 20, 1);
    Hyperparams h = random_hyperparams(61);
    const TrainedModel m = fit(d, h);
    const AugmentedGram g = build_augmented_gram(d, h.kernel);
    CHECK(m.diag_lower.objective ==
          doctest::Approx(objective(assemble_lower_dual(g, d.targets, h),
                                    m.alpha_lower))
              .epsilon(1e-10));
    CHECK(m.diag_upper.objective ==
          doctest::Approx(objective(assemble_upper_dual(g, d.targets, h),
                                    m.alpha_upper))
              .epsilon(1e-10));

    Hyperparams tight = h;
    tight.solver.max_epochs = 1;
    tight.solver.tol = 1e-14;
    const TrainedModel m1 = fit(d, tight);
    CHECK(m1.diag_lower.epochs_run == 1);
    // Non-convergence is a flag, not an error; predictions still work.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d.cols());
    CHECK(std::isfinite(predict(m1, x)));
}

TEST_CASE("standardized fits replay the transform at prediction time") {
    const Dataset d = random_dataset(71, 30, 2);
    Hyperparams h = random_hyperparams(71);
    FitOptions opts;
    opts.standardize = true;
    const TrainedModel ms = fit(d, h, opts);
    REQUIRE(ms.standardizer.has_value());

    // Fitting on pre-standardized inputs without the option must give
    // the same predictions on corresponding queries.
    Dataset dz = d;
    const Standardizer z = Standardizer::fit(d.inputs);
    dz.inputs = z.apply(d.inputs);
    const TrainedModel mz = fit(dz, h);
    Rng rng = Rng::derive(71, 9);
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::VectorXd x(2);
        x << rng.uniform(-2, 2), rng.uniform(-2, 2);
        CHECK(predict(ms, x) ==
              doctest::Approx(predict(mz, z.apply_row(x))).epsilon(1e-12));
    }
}

TEST_CASE("fit validates inputs fast") {
    Dataset d;
    d.inputs.resize(2, 1);
    d.inputs << 1, 2;
    d.targets.resize(1);
    d.targets << 1;
    CHECK_THROWS_AS((void)fit(d, basic_hyper(1, 1, 0.5, KernelSpec::linear())),
                    std::invalid_argument);
    d.targets.resize(2);
    d.targets << 1, 2;
    Hyperparams bad = basic_hyper(1, 1, 1.5, KernelSpec::linear());
    CHECK_THROWS_AS((void)fit(d, bad), std::invalid_argument);
}
