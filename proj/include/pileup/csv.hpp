#pragma once

// Minimal RFC-4180 writer/reader. Numbers use the shortest representation
// that round-trips (std::to_chars), '.' as decimal separator, LF endings.
// Lines starting with '#' before the header are carried as comments.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace pileup::csv {

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> comments;  ///< without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

std::string format_number(double v);
std::string to_string(const Table& table);

/// Throws std::runtime_error if the path cannot be written. Rows must have header.size() cells.
void write_csv(const Table& table, const std::string& path);

/// Parses text produced by to_string; every cell comes back as a string
/// (or monostate when empty).
Table parse(const std::string& text);

}  // namespace pileup::csv
