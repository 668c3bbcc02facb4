#include "gdpx/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>

namespace gdpx::csv {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace

std::vector<Row> read_rows(std::istream& in, const std::vector<std::string>& columns) {
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      const std::string expected = join(columns);
      if (line != expected) {
        throw MalformedRow(line_no, "<header>",
                           "header mismatch: expected '" + expected + "', got '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;  // trailing blank line tolerated
    Row row{line_no, split_fields(line)};
    if (row.fields.size() != columns.size()) {
      throw MalformedRow(line_no, "<row>",
                         "expected " + std::to_string(columns.size()) + " fields, got " +
                             std::to_string(row.fields.size()));
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw MalformedRow(0, "<header>", "empty input, header row required");
  return rows;
}

RowCursor::RowCursor(const Row& row, const std::vector<std::string>& columns)
    : row_(&row), columns_(&columns) {}

const std::string& RowCursor::column_name() const {
  static const std::string kPastEnd = "<past-end>";
  const std::size_t i = index_ == 0 ? 0 : index_ - 1;
  return i < columns_->size() ? (*columns_)[i] : kPastEnd;
}

std::string_view RowCursor::raw() {
  if (index_ >= row_->fields.size()) {
    throw MalformedRow(row_->line, "<row>", "field index out of range");
  }
  return row_->fields[index_++];
}

MalformedRow RowCursor::error(const std::string& detail) const {
  return MalformedRow(row_->line, column_name(), detail);
}

std::string RowCursor::next_string() {
  const auto v = raw();
  if (v.empty()) throw error("must not be empty");
  return std::string(v);
}

std::string RowCursor::next_code() {
  const auto v = raw();
  if (!is_airport_code(v)) throw error("'" + std::string(v) + "' is not an airport code");
  return std::string(v);
}

std::int64_t RowCursor::next_int() {
  const auto v = raw();
  try {
    return parse_int(v);
  } catch (const std::exception& e) {
    throw error(e.what());
  }
}

double RowCursor::next_double() {
  const auto v = raw();
  try {
    return parse_double(v);
  } catch (const std::exception& e) {
    throw error(e.what());
  }
}

bool RowCursor::next_bool() {
  const auto v = raw();
  if (v == "true") return true;
  if (v == "false") return false;
  throw error("expected 'true' or 'false', got '" + std::string(v) + "'");
}

std::string RowCursor::next_optional() { return std::string(raw()); }

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("'" + std::string(text) + "' is not an integer");
  }
  return value;
}

double parse_double(std::string_view text) {
  double value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw std::invalid_argument("'" + std::string(text) + "' is not a finite number");
  }
  return value;
}

bool is_airport_code(std::string_view text) {
  if (text.size() < 3 || text.size() > 4) return false;
  for (char c : text) {
    if (c < 'A' || c > 'Z') return false;
  }
  return true;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void append_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& f = fields[i];
    if (f.find_first_of(",\n\r\"") != std::string::npos) {
      throw InvariantViolation(f, "CSV fields must not contain commas, quotes or newlines");
    }
    if (i) out += ',';
    out += f;
  }
  out += '\n';
}

}  // namespace gdpx::csv
