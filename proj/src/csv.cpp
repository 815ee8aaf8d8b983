#include "csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

#include "ordcollab/error.hpp"

namespace ordcollab::csv {

namespace {

std::vector<std::string> split_line(std::string_view line, const std::string& where) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(ch);
    }
  }
  if (quoted) throw ParseError(where + ": unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace

Table Table::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse(in, path.string());
}

Table Table::parse(std::istream& in, const std::string& source) {
  Table table;
  table.source_ = source;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto where = source + " line " + std::to_string(lineno);
    auto fields = split_line(line, where);
    if (!have_header) {
      table.header_ = std::move(fields);
      for (std::size_t i = 0; i < table.header_.size(); ++i) table.index_[table.header_[i]] = i;
      have_header = true;
      continue;
    }
    if (fields.size() != table.header_.size())
      throw ParseError(where + ": expected " + std::to_string(table.header_.size()) +
                       " fields, found " + std::to_string(fields.size()));
    table.rows_.push_back(Row{lineno, std::move(fields)});
  }
  if (!have_header) throw ParseError(source + ": missing header row");
  return table;
}

std::size_t Table::column(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end())
    throw ParseError(source_ + ": missing column '" + std::string(name) + "'");
  return it->second;
}

bool Table::has_column(std::string_view name) const {
  return index_.count(std::string(name)) != 0;
}

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << quote(fields[i]);
  }
  out << '\n';
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

double parse_double(std::string_view text, const std::string& context) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw ParseError(context + ": invalid number '" + std::string(text) + "'");
  return value;
}

}  // namespace ordcollab::csv
