// Command-line front end: dataset generation, training, prediction,
// hyperparameter search, evaluation and plot-table export. Every file
// the tool writes is deterministic for a fixed command line, and every
// write is recorded in a sidecar manifest with content digests so runs
// can be compared byte for byte.
//
// Exit codes: 0 success, 1 runtime failure (reported as one JSON line
// on stderr), 2 usage error.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "tsvqr/csv.hpp"
#include "tsvqr/errors.hpp"
#include "tsvqr/grid_search.hpp"
#include "tsvqr/metrics.hpp"
#include "tsvqr/model.hpp"
#include "tsvqr/serialize.hpp"
#include "tsvqr/synthetic.hpp"

namespace {

using namespace tsvqr;

// --------------------------------------------------------------------
// Manifests

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

nlohmann::json describe_output(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("manifest: cannot re-read output '" + path + "'");
    const std::string bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return {{"path", path}, {"bytes", bytes.size()}, {"fnv1a64", hex}};
}

/// Writes `<manifest_path>` describing one finished subcommand: the
/// exact command line, each output file with size and digest, and any
/// extra fields the subcommand wants on record (seed, counts, ...).
void write_manifest(const std::string& manifest_path,
                    const std::string& command,
                    const std::vector<std::string>& outputs,
                    const nlohmann::json& extra = nlohmann::json::object()) {
    nlohmann::json m;
    m["command"] = command;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& path : outputs) outs.push_back(describe_output(path));
    m["outputs"] = std::move(outs);
    for (const auto& [key, value] : extra.items()) m[key] = value;
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out)
        throw IoError("manifest: cannot open '" + manifest_path +
                      "' for writing");
    out << m.dump(2) << '\n';
    if (!out.good())
        throw IoError("manifest: write to '" + manifest_path + "' failed");
}

std::string join_command(int argc, char** argv) {
    std::string cmd;
    for (int i = 0; i < argc; ++i) {
        if (i) cmd += ' ';
        cmd += argv[i];
    }
    return cmd;
}

// --------------------------------------------------------------------
// Shared option helpers

KernelSpec::Family family_from_cli(const std::string& name) {
    if (name == "linear") return KernelSpec::Family::Linear;
    if (name == "gaussian") return KernelSpec::Family::Gaussian;
    return KernelSpec::Family::Wavelet;  // guarded by IsMember
}

const auto kUnitIntervalCheck = [](const std::string& s) -> std::string {
    try {
        const double v = std::stod(s);
        if (v > 0.0 && v < 1.0) return {};
    } catch (const std::exception&) {
    }
    return "value must lie strictly between 0 and 1";
};

std::string converged_word(const SolveResult& r) {
    return r.converged ? "converged" : "hit the epoch budget";
}

// --------------------------------------------------------------------
// Subcommand bodies. Each returns the process exit code.

struct GenArgs {
    std::string family;
    Eigen::Index n_train = 0;
    Eigen::Index n_test = 0;
    std::uint64_t seed = 0;
    std::string out_prefix;
};

int run_gen(const GenArgs& a, const std::string& command) {
    GeneratorSpec spec;
    spec.family = family_from_string(a.family);
    spec.n_train = a.n_train;
    spec.n_test = a.n_test;
    spec.seed = a.seed;
    const auto [train, test] = generate(spec);

    const std::string train_path = a.out_prefix + "_train.csv";
    const std::string test_path = a.out_prefix + "_test.csv";
    write_dataset_csv(train_path, train);
    write_dataset_csv(test_path, test);
    write_manifest(a.out_prefix + ".manifest.json", command,
                   {train_path, test_path},
                   {{"seed", spec.seed},
                    {"family", to_string(spec.family)},
                    {"n_train", train.rows()},
                    {"n_test", test.rows()}});

    std::cout << "wrote " << train.rows() << " training rows to " << train_path
              << '\n'
              << "wrote " << test.rows() << " test rows to " << test_path
              << '\n';
    return 0;
}

struct TrainArgs {
    std::string data_path;
    std::string model_path;
    Hyperparams hyper;
    std::string kernel_name = "gaussian";
    double p = 1.0;
    bool no_standardize = false;
    int threads = 0;
};

int run_train(const TrainArgs& a, const std::string& command) {
    Dataset data = read_dataset_csv(a.data_path);

    Hyperparams h = a.hyper;
    h.kernel.family = family_from_cli(a.kernel_name);
    h.kernel.param = h.kernel.family == KernelSpec::Family::Linear ? 0.0 : a.p;

    FitOptions opts;
    opts.standardize = !a.no_standardize;
    opts.threads = a.threads;
    const TrainedModel m = fit(data, h, opts);
    save_model_json(m, a.model_path);
    write_manifest(a.model_path + ".manifest.json", command, {a.model_path});

    std::printf("fit: %lld rows, %lld feature(s), kernel %s\n",
                static_cast<long long>(m.train_size()),
                static_cast<long long>(m.feature_dim()),
                a.kernel_name.c_str());
    std::printf("lower bound: %s after %d epochs (pg %.3g)\n",
                converged_word(m.diag_lower).c_str(), m.diag_lower.epochs_run,
                m.diag_lower.final_pg_norm);
    std::printf("upper bound: %s after %d epochs (pg %.3g)\n",
                converged_word(m.diag_upper).c_str(), m.diag_upper.epochs_run,
                m.diag_upper.final_pg_norm);
    std::printf("wrote %s\n", a.model_path.c_str());
    return 0;
}

struct PredictArgs {
    std::string model_path;
    std::string data_path;
    std::string out_path;
    int threads = 0;
};

int run_predict(const PredictArgs& a, const std::string& command) {
    const TrainedModel m = load_model_json(a.model_path);
    const Dataset data = read_dataset_csv(a.data_path);
    const BoundsPrediction b = predict_batch(m, data.inputs, a.threads);

    std::ofstream out(a.out_path, std::ios::binary);
    if (!out)
        throw IoError("predict: cannot open '" + a.out_path + "' for writing");
    out << "f_lower,f_upper,f\n";
    for (Eigen::Index i = 0; i < b.mean.size(); ++i) {
        out << format_double(b.lower[i]) << ',' << format_double(b.upper[i])
            << ',' << format_double(b.mean[i]) << '\n';
    }
    if (!out.good())
        throw IoError("predict: write to '" + a.out_path + "' failed");
    out.close();
    write_manifest(a.out_path + ".manifest.json", command, {a.out_path});

    std::cout << "wrote " << b.mean.size() << " predictions to " << a.out_path
              << '\n';
    return 0;
}

struct EvalArgs {
    std::string model_path;
    std::string data_path;
    std::string train_path;
    bool json = false;
};

int run_eval(const EvalArgs& a) {
    const TrainedModel m = load_model_json(a.model_path);
    const Dataset data = read_dataset_csv(a.data_path);
    Dataset train;
    const bool have_train = !a.train_path.empty();
    if (have_train) train = read_dataset_csv(a.train_path);
    const EvalReport r =
        evaluate(m, data, m.hyper.tau, have_train ? &train : nullptr);

    if (a.json) {
        const nlohmann::json rep{{"tau", m.hyper.tau},
                                 {"risk", r.risk},
                                 {"rmse", r.rmse},
                                 {"mae", r.mae},
                                 {"mape", r.mape},
                                 {"mape_defined", r.mape_defined},
                                 {"gacv", r.gacv},
                                 {"gacv_defined", r.gacv_defined},
                                 {"sv_count", r.sv_count},
                                 {"fit_seconds", r.fit_seconds},
                                 {"predict_seconds", r.predict_seconds}};
        std::cout << rep.dump(2) << '\n';
        return 0;
    }

    std::printf("tau       %s\n", format_double(m.hyper.tau).c_str());
    std::printf("risk      %s\n", format_double(r.risk).c_str());
    std::printf("rmse      %s\n", format_double(r.rmse).c_str());
    std::printf("mae       %s\n", format_double(r.mae).c_str());
    if (r.mape_defined)
        std::printf("mape      %s\n", format_double(r.mape).c_str());
    else
        std::printf("mape      undefined (zero target present)\n");
    if (r.gacv_defined)
        std::printf("gacv      %s\n", format_double(r.gacv).c_str());
    else if (have_train)
        std::printf("gacv      undefined (every point is a support vector)\n");
    std::printf("sv_count  %lld\n", static_cast<long long>(r.sv_count));
    return 0;
}

struct GridArgs {
    std::string data_path;
    double tau = 0.5;
    std::string kernel_name = "gaussian";
    std::vector<double> c_values;
    std::vector<double> p_values;
    std::vector<double> eps_values;
    bool no_tie_c = false;
    bool no_tie_eps = false;
    std::string results_path;
    std::string best_model_path;
    SolverConfig solver;
    int threads = 0;
};

std::string sanitize_cell(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

int run_gridsearch(const GridArgs& a, const std::string& command) {
    const Dataset data = read_dataset_csv(a.data_path);

    GridSpec grid = GridSpec::defaults();
    if (!a.c_values.empty()) grid.c_values = a.c_values;
    if (!a.p_values.empty()) grid.p_values = a.p_values;
    if (!a.eps_values.empty()) grid.eps_values = a.eps_values;
    grid.tie_c = !a.no_tie_c;
    grid.tie_eps = !a.no_tie_eps;

    const std::vector<GridCell> cells =
        grid_search(data, grid, a.tau, family_from_cli(a.kernel_name),
                    a.solver, a.threads);

    std::ofstream out(a.results_path, std::ios::binary);
    if (!out)
        throw IoError("gridsearch: cannot open '" + a.results_path +
                      "' for writing");
    out << "rank,c1,c2,eps1,eps2,p,gacv,gacv_defined,train_risk,train_rmse,"
           "train_mae,sv_count,converged,error\n";
    int rank = 1;
    for (const auto& cell : cells) {
        out << rank++ << ',' << format_double(cell.hyper.c1) << ','
            << format_double(cell.hyper.c2) << ','
            << format_double(cell.hyper.eps1) << ','
            << format_double(cell.hyper.eps2) << ','
            << format_double(cell.hyper.kernel.param) << ','
            << format_double(cell.gacv) << ',' << (cell.gacv_defined ? 1 : 0)
            << ',' << format_double(cell.train_report.risk) << ','
            << format_double(cell.train_report.rmse) << ','
            << format_double(cell.train_report.mae) << ','
            << cell.train_report.sv_count << ','
            << ((cell.converged_lower && cell.converged_upper) ? 1 : 0) << ','
            << sanitize_cell(cell.error) << '\n';
    }
    if (!out.good())
        throw IoError("gridsearch: write to '" + a.results_path + "' failed");
    out.close();

    const GridCell* best = nullptr;
    for (const auto& cell : cells) {
        if (!cell.failed()) {
            best = &cell;
            break;
        }
    }
    if (best == nullptr)
        throw SolverError("gridsearch: every grid cell failed");

    const TrainedModel refit = fit(data, best->hyper);
    save_model_json(refit, a.best_model_path);
    write_manifest(a.results_path + ".manifest.json", command,
                   {a.results_path, a.best_model_path});

    std::cout << "searched " << cells.size() << " cells; best c1="
              << format_double(best->hyper.c1)
              << " c2=" << format_double(best->hyper.c2)
              << " eps1=" << format_double(best->hyper.eps1)
              << " p=" << format_double(best->hyper.kernel.param) << " (";
    if (best->gacv_defined)
        std::cout << "gacv " << format_double(best->gacv);
    else
        std::cout << "gacv undefined, train risk "
                  << format_double(best->train_report.risk);
    std::cout << ")\n"
              << "wrote " << a.results_path << " and " << a.best_model_path
              << '\n';
    return 0;
}

struct PlotArgs {
    std::vector<std::string> model_paths;
    double x_min = 0.0;
    double x_max = 0.0;
    int grid_n = 101;
    bool sinc_oracle = false;
    std::string out_path;
};

int run_plotdata(const PlotArgs& a, const std::string& command) {
    std::vector<TrainedModel> models;
    models.reserve(a.model_paths.size());
    for (const auto& path : a.model_paths) {
        models.push_back(load_model_json(path));
        if (models.back().feature_dim() != 1)
            throw std::invalid_argument(
                "plotdata: only one-dimensional models can be plotted ('" +
                path + "' has " + std::to_string(models.back().feature_dim()) +
                " features)");
    }

    std::ofstream out(a.out_path, std::ios::binary);
    if (!out)
        throw IoError("plotdata: cannot open '" + a.out_path +
                      "' for writing");
    out << "x,tau,f_lower,f_upper,f";
    if (a.sinc_oracle) out << ",oracle";
    out << '\n';

    Eigen::VectorXd query(1);
    for (const TrainedModel& m : models) {
        for (int i = 0; i < a.grid_n; ++i) {
            const double frac =
                a.grid_n == 1 ? 0.0
                              : static_cast<double>(i) /
                                    static_cast<double>(a.grid_n - 1);
            const double x = a.x_min + (a.x_max - a.x_min) * frac;
            query[0] = x;
            const double lo = predict_lower(m, query);
            const double hi = predict_upper(m, query);
            out << format_double(x) << ',' << format_double(m.hyper.tau)
                << ',' << format_double(lo) << ',' << format_double(hi) << ','
                << format_double(0.5 * (lo + hi));
            if (a.sinc_oracle)
                out << ',' << format_double(sinc_quantile_oracle(x, m.hyper.tau));
            out << '\n';
        }
    }
    if (!out.good())
        throw IoError("plotdata: write to '" + a.out_path + "' failed");
    out.close();
    write_manifest(a.out_path + ".manifest.json", command, {a.out_path});

    std::cout << "wrote " << models.size() * a.grid_n << " rows to "
              << a.out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Twin support vector quantile regression toolkit"};
    app.require_subcommand(1);
    const std::string command = join_command(argc, argv);

    // ---- gen ----
    GenArgs gen;
    CLI::App* gen_cmd =
        app.add_subcommand("gen", "Generate a synthetic train/test pair");
    gen_cmd->add_option("--family", gen.family, "Benchmark family")
        ->required()
        ->check(CLI::IsMember({"A1", "A2", "A3", "B1", "B2", "B3", "Sinc"}));
    gen_cmd->add_option("--n-train", gen.n_train,
                        "Training rows (0 = family default)")
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--n-test", gen.n_test,
                        "Test rows (0 = family default)")
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--seed", gen.seed, "Generator seed");
    gen_cmd->add_option("--out", gen.out_prefix,
                        "Output prefix (<prefix>_train.csv, <prefix>_test.csv)")
        ->required();

    // ---- train ----
    TrainArgs train;
    CLI::App* train_cmd =
        app.add_subcommand("train", "Fit a model on a CSV dataset");
    train_cmd->add_option("--data", train.data_path, "Training CSV")
        ->required();
    train_cmd->add_option("--model", train.model_path, "Model JSON to write")
        ->required();
    train_cmd->add_option("--c1", train.hyper.c1, "Lower-bound trade-off");
    train_cmd->add_option("--c2", train.hyper.c2, "Upper-bound trade-off");
    train_cmd->add_option("--eps1", train.hyper.eps1, "Lower tube half-width");
    train_cmd->add_option("--eps2", train.hyper.eps2, "Upper tube half-width");
    train_cmd->add_option("--tau", train.hyper.tau, "Quantile level in (0,1)")
        ->check(kUnitIntervalCheck);
    train_cmd->add_option("--kernel", train.kernel_name, "Kernel family")
        ->check(CLI::IsMember({"linear", "gaussian", "wavelet"}));
    train_cmd->add_option("--p", train.p, "Kernel shape parameter");
    train_cmd->add_option("--tol", train.hyper.solver.tol,
                          "Solver projected-gradient tolerance");
    train_cmd->add_option("--max-epochs", train.hyper.solver.max_epochs,
                          "Solver epoch budget");
    train_cmd->add_flag("--no-standardize", train.no_standardize,
                        "Fit on raw features (standardization is on by default)");
    train_cmd->add_option("--threads", train.threads,
                          "Gram-build threads (0 = all)");

    // ---- predict ----
    PredictArgs predict_args;
    CLI::App* predict_cmd = app.add_subcommand(
        "predict", "Write bound and mean predictions for a query CSV");
    predict_cmd->add_option("--model", predict_args.model_path, "Model JSON")
        ->required();
    predict_cmd->add_option("--data", predict_args.data_path, "Query CSV")
        ->required();
    predict_cmd->add_option("--out", predict_args.out_path, "Prediction CSV")
        ->required();
    predict_cmd->add_option("--threads", predict_args.threads,
                            "Prediction threads (0 = all)");

    // ---- eval ----
    EvalArgs eval_args;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "Score a model on a labeled CSV");
    eval_cmd->add_option("--model", eval_args.model_path, "Model JSON")
        ->required();
    eval_cmd->add_option("--data", eval_args.data_path, "Evaluation CSV")
        ->required();
    eval_cmd->add_option("--train", eval_args.train_path,
                         "Training CSV (enables the GACV field)");
    eval_cmd->add_flag("--json", eval_args.json, "Emit the report as JSON");

    // ---- gridsearch ----
    GridArgs grid_args;
    CLI::App* grid_cmd = app.add_subcommand(
        "gridsearch", "Rank a hyperparameter grid by GACV on a training CSV");
    grid_cmd->add_option("--data", grid_args.data_path, "Training CSV")
        ->required();
    grid_cmd->add_option("--tau", grid_args.tau, "Quantile level in (0,1)")
        ->check(kUnitIntervalCheck);
    grid_cmd->add_option("--kernel", grid_args.kernel_name, "Kernel family")
        ->check(CLI::IsMember({"linear", "gaussian", "wavelet"}));
    grid_cmd->add_option("--c", grid_args.c_values,
                         "Trade-off values (comma separated)")
        ->delimiter(',');
    grid_cmd->add_option("--p", grid_args.p_values,
                         "Kernel parameter values (comma separated)")
        ->delimiter(',');
    grid_cmd->add_option("--eps", grid_args.eps_values,
                         "Tube width values (comma separated)")
        ->delimiter(',');
    grid_cmd->add_flag("--no-tie-c", grid_args.no_tie_c,
                       "Search c1 and c2 independently");
    grid_cmd->add_flag("--no-tie-eps", grid_args.no_tie_eps,
                       "Search eps1 and eps2 independently");
    grid_cmd->add_option("--results", grid_args.results_path,
                         "Ranked cell CSV to write")
        ->required();
    grid_cmd->add_option("--best-model", grid_args.best_model_path,
                         "Refit best cell and save it here")
        ->required();
    grid_cmd->add_option("--tol", grid_args.solver.tol,
                         "Solver projected-gradient tolerance");
    grid_cmd->add_option("--max-epochs", grid_args.solver.max_epochs,
                         "Solver epoch budget per cell");
    grid_cmd->add_option("--threads", grid_args.threads,
                         "Worker threads (0 = all)");

    // ---- plotdata ----
    PlotArgs plot;
    CLI::App* plot_cmd = app.add_subcommand(
        "plotdata", "Tabulate fitted quantile curves over an x grid");
    plot_cmd->add_option("--models", plot.model_paths,
                         "Model JSON paths (comma separated)")
        ->required()
        ->delimiter(',');
    plot_cmd->add_option("--x-min", plot.x_min, "Grid start")->required();
    plot_cmd->add_option("--x-max", plot.x_max, "Grid end")->required();
    plot_cmd->add_option("--grid-n", plot.grid_n, "Grid points")
        ->check(CLI::PositiveNumber);
    plot_cmd->add_flag("--sinc-oracle", plot.sinc_oracle,
                       "Append the analytic sinc quantile column");
    plot_cmd->add_option("--out", plot.out_path, "Plot CSV to write")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (gen_cmd->parsed()) return run_gen(gen, command);
        if (train_cmd->parsed()) return run_train(train, command);
        if (predict_cmd->parsed()) return run_predict(predict_args, command);
        if (eval_cmd->parsed()) return run_eval(eval_args);
        if (grid_cmd->parsed()) return run_gridsearch(grid_args, command);
        if (plot_cmd->parsed()) return run_plotdata(plot, command);
        std::cerr << "usage error: no subcommand given\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << '\n';
        return 1;
    }
}
