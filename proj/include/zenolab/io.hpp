#pragma once

// Serialization helpers: locale-independent CSV emission with 17 significant
// digits, atomic file writes, and complex-matrix JSON.

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zenolab/qstate.hpp"

namespace zenolab {

using json = nlohmann::json;

/// Shortest round-trip-safe rendering is not used on purpose: every value is
/// printed with exactly 17 significant digits so baselines compare byte-wise.
std::string format_double(double value);

// Accumulates a CSV document in memory. Lines end with '\n'.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(const std::vector<double>& values);
    /// Mixed numeric and text cells; text is written verbatim.
    void add_row(const std::vector<std::string>& cells);

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::vector<std::string>>& cells() const { return rows_; }
    std::string str() const;
    /// Rows as an array of objects keyed by the header.
    json to_json() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// {"rows": r, "cols": c, "data": [[[re, im], ...], ...]}
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

/// [[re, im], ...]
json state_to_json(const StateVector& v);
StateVector state_from_json(const json& j);

}  // namespace zenolab
