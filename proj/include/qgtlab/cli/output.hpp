#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qgtlab::cli {

/// Ordered key/value pairs describing basis order, signs and orientation.
using ConventionBlock = std::vector<std::pair<std::string, std::string>>;

ConventionBlock conventions();
nlohmann::json conventions_json();

/// One CSV cell: empty (missing value), number, integer or text.
using Cell = std::variant<std::monostate, double, long long, std::string>;

/// RFC-4180 style table: comma separated, fields quoted when they contain a
/// comma, quote or line break, '.' decimal, LF line endings. The convention
/// block precedes the header as '#'-prefixed lines. Non-finite numbers are
/// written as empty cells.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(std::vector<Cell> row);
    std::size_t rows() const { return rows_.size(); }
    std::string render() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

/// Shortest round-trip decimal representation.
std::string format_number(double v);
std::string csv_escape(const std::string& field);

/// Sorted keys, two-space indent, trailing newline.
std::string render_json(const nlohmann::json& j);

/// Writes `content` to dir / name, creating dir if needed. Throws
/// ConfigInvalid when the directory or file cannot be written.
void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content);

}  // namespace qgtlab::cli
