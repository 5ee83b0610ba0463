#include "tsvqr/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "tsvqr/errors.hpp"

namespace tsvqr {

namespace {

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string::size_type start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

/// getline keeps a trailing carriage return when the file has CRLF
/// endings; strip it so such files parse like LF ones.
void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_cell(const std::string& cell, const std::string& path,
                  std::size_t line_no) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "csv: bad numeric cell '" << cell << "' at line " << line_no
            << " of '" << path << "'";
        throw IoError(msg.str());
    }
    return value;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{})
        throw IoError("csv: cannot format numeric value");
    return std::string(buf, ptr);
}

Dataset read_dataset_csv(const std::string& path,
                         const std::string& target_col) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("csv: cannot open '" + path + "' for reading");

    std::string line;
    if (!std::getline(in, line))
        throw IoError("csv: '" + path + "' is empty");
    chomp(line);
    const std::vector<std::string> header = split_cells(line);
    if (header.size() < 2)
        throw IoError("csv: '" + path +
                      "' needs at least one feature column and a target");

    std::size_t target_idx = header.size() - 1;
    if (!target_col.empty()) {
        bool found = false;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == target_col) {
                target_idx = i;
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument("csv: no column named '" + target_col +
                                        "' in '" + path + "'");
    }

    Dataset d;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != target_idx) d.feature_names.push_back(header[i]);

    const std::size_t width = header.size();
    std::vector<double> features;  // row-major
    std::vector<double> targets;
    std::size_t line_no = 1;  // the header
    while (std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_cells(line);
        if (cells.size() != width) {
            std::ostringstream msg;
            msg << "csv: expected " << width << " cells but found "
                << cells.size() << " at line " << line_no << " of '" << path
                << "'";
            throw IoError(msg.str());
        }
        for (std::size_t i = 0; i < width; ++i) {
            const double v = parse_cell(cells[i], path, line_no);
            if (i == target_idx)
                targets.push_back(v);
            else
                features.push_back(v);
        }
    }
    if (targets.empty())
        throw IoError("csv: '" + path + "' has no data rows");

    const Eigen::Index rows = static_cast<Eigen::Index>(targets.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(width - 1);
    d.inputs = Eigen::Map<
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>>(features.data(), rows, cols);
    d.targets = Eigen::Map<const Eigen::VectorXd>(targets.data(), rows);
    d.validate();
    return d;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
    data.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("csv: cannot open '" + path + "' for writing");

    const Eigen::Index cols = data.cols();
    const bool named =
        data.feature_names.size() == static_cast<std::size_t>(cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        if (named)
            out << data.feature_names[static_cast<std::size_t>(j)];
        else
            out << 'x' << (j + 1);
        out << ',';
    }
    out << "target\n";

    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < cols; ++j)
            out << format_double(data.inputs(i, j)) << ',';
        out << format_double(data.targets[i]) << '\n';
    }
    if (!out.good())
        throw IoError("csv: write to '" + path + "' failed");
}

}  // namespace tsvqr
