#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ordcollab::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the file
  std::vector<std::string> fields;
};

/// Comma separated table with a header row. Fields may be double-quoted;
/// embedded quotes are doubled. Blank lines are skipped.
class Table {
 public:
  static Table read(const std::filesystem::path& path);
  static Table parse(std::istream& in, const std::string& source);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::string& source() const { return source_; }

  /// Column index; throws ParseError naming `what` when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Row> rows_;
};

std::string quote(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest text that parses back to exactly `value`.
std::string format_double(double value);
double parse_double(std::string_view text, const std::string& context);

}  // namespace ordcollab::csv
