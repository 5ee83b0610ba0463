#pragma once

#include <json.hpp>
#include <string>

#include "tsvqr/model.hpp"

namespace tsvqr {

/// Model (de)serialization through a versioned JSON schema:
///   { schema_version, kernel, hyperparams, standardization,
///     alpha_lower, alpha_upper, train_inputs, linear_cache,
///     diagnostics }
/// Every number is written in shortest round-trip decimal form, so a
/// save/load cycle reproduces the model's predictions bit-identically.

nlohmann::json model_to_json(const TrainedModel& m);

/// Throws IoError on schema violations (missing fields, wrong version,
/// inconsistent lengths).
TrainedModel model_from_json(const nlohmann::json& j);

void save_model_json(const TrainedModel& m, const std::string& path);
TrainedModel load_model_json(const std::string& path);

}  // namespace tsvqr
