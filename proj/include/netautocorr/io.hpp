#pragma once

#include "netautocorr/inference.hpp"
#include "netautocorr/weights.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace netautocorr {

using Edge = std::pair<std::size_t, std::size_t>;

/// One edge per line: two 0-based ids separated by whitespace and/or a comma.
/// Blank lines and lines whose first non-blank character is '#' are skipped.
/// Parse failures throw IoError naming the line.
std::vector<Edge> parse_edge_list(std::istream& in, const std::string& origin = "<stream>");
std::vector<Edge> read_edge_list(const std::filesystem::path& path);

/// Writes the upper triangle (i < j) of the nonzero pattern of w, sorted by
/// (i, j), with a '#' header line.
void write_edge_list(std::ostream& out, const WeightMatrix& w);

/// Comma separated table with a header row and an `id` column of 0-based node
/// ids. Rows are indexed by id; every id in [0, rows) must occur exactly once.
class AttributeTable {
public:
    static AttributeTable parse(std::istream& in, const std::string& origin = "<stream>");
    static AttributeTable read(const std::filesystem::path& path);

    std::size_t rows() const { return rows_; }
    const std::vector<std::string>& columns() const { return header_; }
    bool has_column(const std::string& name) const;
    /// Raw cells of a column in id order.
    std::vector<std::string> column(const std::string& name) const;
    /// Column parsed as finite doubles; InvalidInput on any other cell.
    std::vector<double> numeric(const std::string& name) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> cells_; // by id, then column
    std::size_t rows_ = 0;
};

/// Coordinates from a CSV with header `id,x,y[,...]`; every column other
/// than `id` is a coordinate axis.
CoordinateSet read_coordinates(const std::filesystem::path& path);
CoordinateSet parse_coordinates(std::istream& in, const std::string& origin = "<stream>");
void write_coordinates(std::ostream& out, const CoordinateSet& coords);

/// Writes `id,<name>` rows for ids 0..n-1. Doubles use 17 significant digits.
void write_attribute(std::ostream& out, const std::string& name, const std::vector<double>& values);
void write_attribute(std::ostream& out, const std::string& name, const std::vector<std::size_t>& values);

/// Category codes for string labels. Labels that all parse as integers are
/// ordered numerically, otherwise lexicographically.
struct LabelCoding {
    std::vector<std::size_t> codes;
    std::vector<std::string> names;
};
LabelCoding encode_labels(const std::vector<std::string>& labels);

/// True when every cell is an integer literal.
bool looks_integer(const std::vector<std::string>& cells);

nlohmann::json to_json(const WeightSummary& s);
nlohmann::json to_json(const NormalityDiagnostics& d);
nlohmann::json to_json(const TestResult& r);

} // namespace netautocorr
