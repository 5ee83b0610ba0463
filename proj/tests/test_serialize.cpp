#include <doctest.h>

#include <Eigen/Dense>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "test_util.hpp"
#include "tsvqr/csv.hpp"
#include "tsvqr/errors.hpp"
#include "tsvqr/serialize.hpp"
#include "tsvqr/synthetic.hpp"

using namespace tsvqr;
using tsvqr_test::random_dataset;
using tsvqr_test::random_hyperparams;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "tsvqr_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("format_double emits shortest round-trip decimals") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5) == "-2.5");
    // A value with no short decimal form survives a parse round trip.
    const double v = 0.1 + 0.2;
    CHECK(std::stod(format_double(v)) == v);
    CHECK(std::stod(format_double(1e300)) == 1e300);
    // Denormals trip std::stod's ERANGE check even though they are
    // representable; parse with from_chars, the same parser the CSV
    // reader uses.
    const std::string tiny_text = format_double(5e-324);
    double tiny = 0.0;
    std::from_chars(tiny_text.data(), tiny_text.data() + tiny_text.size(),
                    tiny);
    CHECK(tiny == 5e-324);
}

TEST_CASE("dataset CSV writing and reading is a bitwise round trip") {
    const Dataset d = random_dataset(17, 25, 3);
    const auto path = temp_file("roundtrip.csv");
    write_dataset_csv(path.string(), d);
    const Dataset r = read_dataset_csv(path.string());
    REQUIRE(r.rows() == d.rows());
    REQUIRE(r.cols() == d.cols());
    CHECK((r.inputs.array() == d.inputs.array()).all());
    CHECK((r.targets.array() == d.targets.array()).all());

    // Repeated writes are byte-identical.
    const auto path2 = temp_file("roundtrip2.csv");
    write_dataset_csv(path2.string(), d);
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("CSV reading honors a named target column") {
    const auto path = temp_file("named.csv");
    {
        std::ofstream out(path);
        out << "a,target,b\n1,10,2\n3,20,4\n";
    }
    const Dataset d = read_dataset_csv(path.string(), "target");
    REQUIRE(d.rows() == 2);
    REQUIRE(d.cols() == 2);
    CHECK(d.targets[0] == 10.0);
    CHECK(d.targets[1] == 20.0);
    CHECK(d.inputs(1, 0) == 3.0);
    CHECK(d.inputs(1, 1) == 4.0);
    CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
    CHECK_THROWS_AS((void)read_dataset_csv(path.string(), "missing"),
                    std::invalid_argument);
}

TEST_CASE("CSV reading reports malformed content with line numbers") {
    const auto bad_cell = temp_file("bad_cell.csv");
    {
        std::ofstream out(bad_cell);
        out << "x,target\n1,2\nfoo,3\n";
    }
    CHECK_THROWS_WITH_AS((void)read_dataset_csv(bad_cell.string()),
                         doctest::Contains("line 3"), IoError);

    const auto ragged = temp_file("ragged.csv");
    {
        std::ofstream out(ragged);
        out << "x,y,target\n1,2,3\n4,5\n";
    }
    CHECK_THROWS_WITH_AS((void)read_dataset_csv(ragged.string()),
                         doctest::Contains("line 3"), IoError);

    CHECK_THROWS_AS((void)read_dataset_csv("/nonexistent/nope.csv"), IoError);

    const auto empty = temp_file("empty.csv");
    { std::ofstream out(empty); }
    CHECK_THROWS_AS((void)read_dataset_csv(empty.string()), IoError);
}

TEST_CASE("model save and load reproduce predictions bit for bit") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Dataset d = random_dataset(seed, 20, 2);
        Hyperparams h = random_hyperparams(seed);
        FitOptions opts;
        opts.standardize = (seed % 2 == 0);
        const TrainedModel m = fit(d, h, opts);

        const auto path = temp_file("model_" + std::to_string(seed) + ".json");
        save_model_json(m, path.string());
        const TrainedModel r = load_model_json(path.string());

        CHECK(r.hyper.c1 == m.hyper.c1);
        CHECK(r.hyper.tau == m.hyper.tau);
        CHECK(r.hyper.kernel.family == m.hyper.kernel.family);
        CHECK(r.hyper.kernel.param == m.hyper.kernel.param);
        CHECK((r.alpha_lower.array() == m.alpha_lower.array()).all());
        CHECK((r.alpha_upper.array() == m.alpha_upper.array()).all());
        CHECK((r.train_inputs.array() == m.train_inputs.array()).all());
        CHECK(r.standardizer.has_value() == m.standardizer.has_value());

        Rng rng = Rng::derive(seed, 55);
        for (int rep = 0; rep < 25; ++rep) {
            Eigen::VectorXd x(2);
            x << rng.uniform(-3, 3), rng.uniform(-3, 3);
            CHECK(predict(r, x) == predict(m, x));
            CHECK(predict_lower(r, x) == predict_lower(m, x));
            CHECK(predict_upper(r, x) == predict_upper(m, x));
        }
    }
}

TEST_CASE("linear models persist their explicit coefficients") {
    const Dataset d = random_dataset(4, 15, 2);
    Hyperparams h = random_hyperparams(4);
    h.kernel = KernelSpec::linear();
    const TrainedModel m = fit(d, h);
    const nlohmann::json j = model_to_json(m);
    REQUIRE(j.contains("linear_cache"));
    CHECK_FALSE(j["linear_cache"].is_null());
    CHECK(j["linear_cache"]["u_lower"].size() == 3);

    const TrainedModel r = model_from_json(j);
    CHECK((r.u_lower.array() == m.u_lower.array()).all());
    CHECK((r.u_upper.array() == m.u_upper.array()).all());

    Hyperparams hg = h;
    hg.kernel = KernelSpec::gaussian(1.0);
    const nlohmann::json jg = model_to_json(fit(d, hg));
    CHECK(jg["linear_cache"].is_null());
}

TEST_CASE("schema violations are rejected with clear errors") {
    const Dataset d = random_dataset(5, 10, 1);
    const TrainedModel m = fit(d, random_hyperparams(5));
    nlohmann::json j = model_to_json(m);

    SUBCASE("wrong schema version") {
        j["schema_version"] = 999;
        CHECK_THROWS_AS((void)model_from_json(j), IoError);
    }
    SUBCASE("missing required field") {
        j.erase("alpha_lower");
        CHECK_THROWS_AS((void)model_from_json(j), IoError);
    }
    SUBCASE("inconsistent multiplier lengths") {
        j["alpha_upper"].push_back(0.0);
        CHECK_THROWS_AS((void)model_from_json(j), IoError);
    }
    SUBCASE("unknown kernel name") {
        j["kernel"]["family"] = "quartic";
        CHECK_THROWS_AS((void)model_from_json(j), IoError);
    }
    SUBCASE("malformed file") {
        const auto path = temp_file("garbage.json");
        {
            std::ofstream out(path);
            out << "this is not json";
        }
        CHECK_THROWS_AS((void)load_model_json(path.string()), IoError);
        CHECK_THROWS_AS((void)load_model_json("/nonexistent/model.json"),
                        IoError);
    }
}

TEST_CASE("generated datasets export byte-identically across runs") {
    GeneratorSpec spec;
    spec.family = Family::B1;
    spec.n_train = 40;
    spec.n_test = 20;
    spec.seed = 77;
    const auto [tr1, te1] = generate(spec);
    const auto [tr2, te2] = generate(spec);
    const auto p1 = temp_file("gen1.csv");
    const auto p2 = temp_file("gen2.csv");
    write_dataset_csv(p1.string(), tr1);
    write_dataset_csv(p2.string(), tr2);
    CHECK(slurp(p1) == slurp(p2));
}
