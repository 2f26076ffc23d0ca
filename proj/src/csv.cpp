#include "pileup/csv.hpp"

#include "pileup/errors.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace pileup::csv {

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string render(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(const std::string& v) const { return quote_if_needed(v); }
  };
  return std::visit(Visitor{}, cell);
}

void append_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
}

std::vector<std::string> split_record(const std::string& text, std::size_t& pos) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          field += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_string(const Table& table) {
  std::string out;
  for (const auto& c : table.comments) out += "# " + c + "\n";
  std::vector<std::string> fields;
  for (const auto& h : table.header) fields.push_back(quote_if_needed(h));
  append_line(out, fields);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw DomainError("CSV row width does not match the header");
    fields.clear();
    for (const auto& cell : row) fields.push_back(render(cell));
    append_line(out, fields);
  }
  return out;
}

void write_csv(const Table& table, const std::string& path) {
  const std::string text = to_string(table);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  file << text;
  if (!file.flush()) throw std::runtime_error("failed writing '" + path + "'");
}

Table parse(const std::string& text) {
  Table table;
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    const std::size_t end = text.find('\n', pos);
    std::string line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    table.comments.push_back(line.rfind("# ", 0) == 0 ? line.substr(2) : line.substr(1));
    pos = end == std::string::npos ? text.size() : end + 1;
  }
  if (pos >= text.size()) return table;
  table.header = split_record(text, pos);
  while (pos < text.size()) {
    std::vector<Cell> row;
    for (auto& f : split_record(text, pos)) {
      if (f.empty()) {
        row.emplace_back(std::monostate{});
      } else {
        row.emplace_back(std::move(f));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace pileup::csv
