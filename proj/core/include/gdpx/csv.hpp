#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gdpx/errors.hpp"

namespace gdpx::csv {

/// One raw data row: verbatim fields plus the 1-based source line number.
struct Row {
  std::size_t line{0};
  std::vector<std::string> fields;
};

/// Reads an entire CSV stream. The header row must match `columns` exactly
/// (same names, same order); every data row must have the same arity.
/// No quoting or escaping: fields must not contain commas or newlines, which
/// keeps serialization byte-exact and reversible.
std::vector<Row> read_rows(std::istream& in, const std::vector<std::string>& columns);

/// Field accessor that carries line/column context into error messages.
class RowCursor {
 public:
  RowCursor(const Row& row, const std::vector<std::string>& columns);

  bool done() const { return index_ >= row_->fields.size(); }

  std::string_view raw();
  std::string next_string();                      // non-empty
  std::string next_code();                        // 3-4 uppercase letters
  std::int64_t next_int();                        // strict integer
  double next_double();                           // strict real
  bool next_bool();                               // "true" / "false"
  std::string next_optional();                    // may be empty

  /// Error factory bound to the field most recently consumed.
  MalformedRow error(const std::string& detail) const;

 private:
  const std::string& column_name() const;

  const Row* row_;
  const std::vector<std::string>* columns_;
  std::size_t index_{0};
};

/// Strict scalar parsers shared by the cursor and schedule/schema code.
std::int64_t parse_int(std::string_view text);
double parse_double(std::string_view text);
bool is_airport_code(std::string_view text);

/// Canonical number formatting: shortest form that round-trips.
std::string format_double(double v);

/// Joins fields with commas and terminates with '\n'. Rejects fields that
/// would break the no-quoting rule.
void append_row(std::string& out, const std::vector<std::string>& fields);

}  // namespace gdpx::csv
