#pragma once

#include <string>

#include "tsvqr/dataset.hpp"

namespace tsvqr {

/// Reads a dataset from a headered CSV file: all columns numeric, the
/// target taken from `target_col` when non-empty, otherwise from the
/// last column. Malformed content is reported with 1-based file line
/// numbers. Throws IoError (file problems, bad cells, ragged rows) or
/// std::invalid_argument (missing target column).
Dataset read_dataset_csv(const std::string& path,
                         const std::string& target_col = "");

/// Writes a dataset as CSV: feature columns then `target`, header row
/// included. Numbers are emitted in shortest round-trip form, so a
/// write/read cycle reproduces every value bit-identically and repeated
/// writes are byte-identical. Throws IoError on filesystem failure.
void write_dataset_csv(const std::string& path, const Dataset& data);

/// Shortest round-trip decimal form of a double (the CSV/JSON number
/// format used throughout).
std::string format_double(double v);

}  // namespace tsvqr
