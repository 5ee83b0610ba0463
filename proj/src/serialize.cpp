#include "tsvqr/serialize.hpp"

#include <fstream>
#include <string>

#include "tsvqr/errors.hpp"

namespace tsvqr {

namespace {

constexpr int kSchemaVersion = 1;

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& a, const char* name) {
    if (!a.is_array())
        throw IoError(std::string("model json: '") + name +
                      "' must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    Eigen::Index i = 0;
    for (const auto& x : a) {
        if (!x.is_number())
            throw IoError(std::string("model json: '") + name +
                          "' holds a non-numeric entry");
        v[i++] = x.get<double>();
    }
    return v;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        rows.push_back(vector_to_json(m.row(i).transpose()));
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& a, const char* name) {
    if (!a.is_array() || a.empty())
        throw IoError(std::string("model json: '") + name +
                      "' must be a non-empty array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(a.size());
    Eigen::Index cols = -1;
    Eigen::MatrixXd m;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Eigen::VectorXd row = vector_from_json(a[static_cast<std::size_t>(i)], name);
        if (i == 0) {
            cols = row.size();
            m.resize(rows, cols);
        } else if (row.size() != cols) {
            throw IoError(std::string("model json: '") + name +
                          "' rows disagree in length");
        }
        m.row(i) = row.transpose();
    }
    return m;
}

std::string family_name(KernelSpec::Family family) {
    switch (family) {
        case KernelSpec::Family::Linear: return "linear";
        case KernelSpec::Family::Gaussian: return "gaussian";
        case KernelSpec::Family::Wavelet: return "wavelet";
    }
    throw IoError("model json: unknown kernel family");
}

KernelSpec::Family family_from_name(const std::string& name) {
    if (name == "linear") return KernelSpec::Family::Linear;
    if (name == "gaussian") return KernelSpec::Family::Gaussian;
    if (name == "wavelet") return KernelSpec::Family::Wavelet;
    throw IoError("model json: unknown kernel family '" + name + "'");
}

nlohmann::json solve_diag_to_json(const SolveResult& r) {
    return {{"epochs_run", r.epochs_run},
            {"final_pg_norm", r.final_pg_norm},
            {"objective", r.objective},
            {"converged", r.converged},
            {"zero_diag_hits", r.zero_diag_hits}};
}

SolveResult solve_diag_from_json(const nlohmann::json& j) {
    SolveResult r;
    r.epochs_run = j.at("epochs_run").get<int>();
    r.final_pg_norm = j.at("final_pg_norm").get<double>();
    r.objective = j.at("objective").get<double>();
    r.converged = j.at("converged").get<bool>();
    r.zero_diag_hits = j.at("zero_diag_hits").get<int>();
    return r;
}

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end())
        throw IoError(std::string("model json: missing field '") + key + "'");
    return *it;
}

}  // namespace

nlohmann::json model_to_json(const TrainedModel& m) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kernel"] = {{"family", family_name(m.hyper.kernel.family)},
                   {"param", m.hyper.kernel.param}};
    j["hyperparams"] = {{"c1", m.hyper.c1},
                        {"c2", m.hyper.c2},
                        {"eps1", m.hyper.eps1},
                        {"eps2", m.hyper.eps2},
                        {"tau", m.hyper.tau}};
    if (m.standardizer) {
        j["standardization"] = {{"mean", vector_to_json(m.standardizer->mean)},
                                {"scale", vector_to_json(m.standardizer->scale)}};
    } else {
        j["standardization"] = nullptr;
    }
    j["alpha_lower"] = vector_to_json(m.alpha_lower);
    j["alpha_upper"] = vector_to_json(m.alpha_upper);
    j["train_inputs"] = matrix_to_json(m.train_inputs);
    if (m.u_lower.size() != 0) {
        j["linear_cache"] = {{"u_lower", vector_to_json(m.u_lower)},
                             {"u_upper", vector_to_json(m.u_upper)}};
    } else {
        j["linear_cache"] = nullptr;
    }
    j["diagnostics"] = {{"lower", solve_diag_to_json(m.diag_lower)},
                        {"upper", solve_diag_to_json(m.diag_upper)},
                        {"fit_seconds", m.fit_seconds}};
    return j;
}

TrainedModel model_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw IoError("model json: not a JSON object");
        const int version = require(j, "schema_version").get<int>();
        if (version != kSchemaVersion)
            throw IoError("model json: unsupported schema version " +
                          std::to_string(version));

        TrainedModel m;
        const nlohmann::json& kernel = require(j, "kernel");
        m.hyper.kernel.family =
            family_from_name(require(kernel, "family").get<std::string>());
        m.hyper.kernel.param = require(kernel, "param").get<double>();

        const nlohmann::json& hp = require(j, "hyperparams");
        m.hyper.c1 = require(hp, "c1").get<double>();
        m.hyper.c2 = require(hp, "c2").get<double>();
        m.hyper.eps1 = require(hp, "eps1").get<double>();
        m.hyper.eps2 = require(hp, "eps2").get<double>();
        m.hyper.tau = require(hp, "tau").get<double>();

        m.alpha_lower = vector_from_json(require(j, "alpha_lower"), "alpha_lower");
        m.alpha_upper = vector_from_json(require(j, "alpha_upper"), "alpha_upper");
        m.train_inputs = matrix_from_json(require(j, "train_inputs"), "train_inputs");

        const Eigen::Index l = m.train_inputs.rows();
        const Eigen::Index n = m.train_inputs.cols();
        if (m.alpha_lower.size() != l || m.alpha_upper.size() != l)
            throw IoError(
                "model json: multiplier lengths disagree with train_inputs");

        const nlohmann::json& std_block = require(j, "standardization");
        if (!std_block.is_null()) {
            Standardizer s;
            s.mean = vector_from_json(require(std_block, "mean"), "mean");
            s.scale = vector_from_json(require(std_block, "scale"), "scale");
            if (s.mean.size() != n || s.scale.size() != n)
                throw IoError(
                    "model json: standardization lengths disagree with "
                    "train_inputs");
            m.standardizer = std::move(s);
        }

        const nlohmann::json& cache = require(j, "linear_cache");
        if (!cache.is_null()) {
            m.u_lower = vector_from_json(require(cache, "u_lower"), "u_lower");
            m.u_upper = vector_from_json(require(cache, "u_upper"), "u_upper");
            if (m.u_lower.size() != n + 1 || m.u_upper.size() != n + 1)
                throw IoError(
                    "model json: linear cache lengths disagree with "
                    "train_inputs");
        }

        const nlohmann::json& diag = require(j, "diagnostics");
        m.diag_lower = solve_diag_from_json(require(diag, "lower"));
        m.diag_upper = solve_diag_from_json(require(diag, "upper"));
        m.fit_seconds = require(diag, "fit_seconds").get<double>();
        m.diag_lower.alpha = m.alpha_lower;
        m.diag_upper.alpha = m.alpha_upper;

        m.hyper.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("model json: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("model json: ") + e.what());
    }
}

void save_model_json(const TrainedModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("model json: cannot open '" + path + "' for writing");
    out << model_to_json(m).dump(2) << '\n';
    if (!out.good())
        throw IoError("model json: write to '" + path + "' failed");
}

TrainedModel load_model_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("model json: cannot open '" + path + "' for reading");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("model json: cannot parse '" + path + "': " + e.what());
    }
    return model_from_json(j);
}

}  // namespace tsvqr
