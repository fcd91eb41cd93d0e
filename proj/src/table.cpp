#include "observatory/table.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "observatory/error.hpp"

namespace observatory {

namespace {

bool is_ascii_space(char ch) {
  return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' ||
         ch == '\v';
}

bool is_digit(char ch) { return ch >= '0' && ch <= '9'; }

// One CSV record per entry. RFC 4180 quoting, `\n` or `\r\n` terminators.
// A final terminator does not open an empty record.
std::vector<Table::Row> split_csv(std::string_view text) {
  std::vector<Table::Row> records;
  Table::Row current;
  std::string cell;
  bool in_quotes = false;
  bool cell_was_quoted = false;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto end_record = [&] {
    current.push_back(std::move(cell));
    records.push_back(std::move(current));
    current.clear();
    cell.clear();
    cell_was_quoted = false;
  };

  while (i < n) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          cell.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      cell.push_back(ch);
      ++i;
      continue;
    }
    if (ch == '"' && cell.empty() && !cell_was_quoted) {
      in_quotes = true;
      cell_was_quoted = true;
      ++i;
      continue;
    }
    if (ch == ',') {
      current.push_back(std::move(cell));
      cell.clear();
      cell_was_quoted = false;
      ++i;
      continue;
    }
    if (ch == '\r' && i + 1 < n && text[i + 1] == '\n') {
      end_record();
      i += 2;
      continue;
    }
    if (ch == '\n') {
      end_record();
      ++i;
      continue;
    }
    cell.push_back(ch);
    ++i;
  }
  if (in_quotes) throw ParseError("csv: unterminated quoted cell");
  if (!cell.empty() || !current.empty() || cell_was_quoted) end_record();
  return records;
}

bool needs_quotes(const std::string& cell, bool only_cell) {
  if (cell.empty()) return only_cell;
  return cell.find_first_of(",\"\r\n") != std::string::npos;
}

void write_csv_record(std::ostringstream& out, const Table::Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out << ',';
    const std::string& cell = row[i];
    if (needs_quotes(cell, row.size() == 1)) {
      out << '"';
      for (char ch : cell) {
        if (ch == '"') out << '"';
        out << ch;
      }
      out << '"';
    } else {
      out << cell;
    }
  }
  out << '\n';
}

Table::Row json_string_array(const nlohmann::json& j, std::size_t line_no) {
  if (!j.is_array()) {
    throw ParseError("jsonl: line " + std::to_string(line_no) +
                     " is not an array of strings");
  }
  Table::Row row;
  row.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_string()) {
      throw ParseError("jsonl: line " + std::to_string(line_no) +
                       " contains a non-string cell");
    }
    row.push_back(v.get<std::string>());
  }
  return row;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

void check_rectangular(const std::vector<Table::Row>& records,
                       std::size_t ncols, std::size_t first_record_index) {
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].size() != ncols) {
      throw ParseError("ragged row at row " +
                       std::to_string(r + first_record_index) + ": expected " +
                       std::to_string(ncols) + " cells, found " +
                       std::to_string(records[r].size()));
    }
  }
}

}  // namespace

Table::Table(std::string id, std::optional<Row> headers, std::vector<Row> rows)
    : id_(std::move(id)), headers_(std::move(headers)), rows_(std::move(rows)) {
  if (id_.empty()) throw ValidationError("table id must be nonempty");
  if (headers_) {
    ncols_ = headers_->size();
  } else if (!rows_.empty()) {
    ncols_ = rows_.front().size();
  }
  if (ncols_ == 0) throw ValidationError("table '" + id_ + "' has no columns");
  check_rectangular(rows_, ncols_, headers_ ? 1 : 0);
  if (ncols_ * rows_.size() > kMaxTableCells) {
    throw ValidationError("table '" + id_ + "' exceeds " +
                          std::to_string(kMaxTableCells) + " cells");
  }
}

const std::string& Table::cell(std::size_t row, std::size_t col) const {
  if (row >= rows_.size() || col >= ncols_) {
    throw ValidationError("cell (" + std::to_string(row) + ", " +
                          std::to_string(col) + ") out of bounds for table '" +
                          id_ + "'");
  }
  return rows_[row][col];
}

std::optional<std::string_view> Table::header(std::size_t col) const {
  if (col >= ncols_) {
    throw ValidationError("column " + std::to_string(col) +
                          " out of bounds for table '" + id_ + "'");
  }
  if (!headers_) return std::nullopt;
  return std::string_view((*headers_)[col]);
}

Table Table::with_id(std::string id) const {
  Table copy = *this;
  if (id.empty()) throw ValidationError("table id must be nonempty");
  copy.id_ = std::move(id);
  return copy;
}

std::string_view trim_ascii(std::string_view s) {
  while (!s.empty() && is_ascii_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ascii_space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_numeric_cell(std::string_view cell) {
  std::string_view s = trim_ascii(cell);
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
  const std::size_t dot = s.find('.');
  std::string_view int_part = s.substr(0, dot);
  std::string_view frac_part =
      dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);

  if (!std::all_of(frac_part.begin(), frac_part.end(), is_digit)) return false;

  if (int_part.find(',') != std::string_view::npos) {
    // Thousands separators: 1-3 leading digits, then groups of exactly three.
    std::size_t first = int_part.find(',');
    if (first == 0 || first > 3) return false;
    if (!std::all_of(int_part.begin(), int_part.begin() + first, is_digit)) {
      return false;
    }
    std::size_t pos = first;
    while (pos < int_part.size()) {
      if (int_part[pos] != ',' || pos + 4 > int_part.size()) return false;
      for (std::size_t k = pos + 1; k < pos + 4; ++k) {
        if (!is_digit(int_part[k])) return false;
      }
      pos += 4;
    }
  } else if (!std::all_of(int_part.begin(), int_part.end(), is_digit)) {
    return false;
  }
  return !int_part.empty() || !frac_part.empty();
}

bool is_valid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong encodings, surrogates, out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += len;
  }
  return true;
}

Table parse_table(std::string_view bytes, TableFormat format, std::string id) {
  if (!is_valid_utf8(bytes)) throw ParseError("input is not valid UTF-8");
  if (bytes.empty()) throw ParseError("empty input");

  switch (format) {
    case TableFormat::kCsvWithHeader:
    case TableFormat::kCsvHeaderless: {
      std::vector<Table::Row> records = split_csv(bytes);
      if (records.empty()) throw ParseError("empty input");
      std::optional<Table::Row> headers;
      std::size_t first = 0;
      if (format == TableFormat::kCsvWithHeader) {
        headers = std::move(records.front());
        records.erase(records.begin());
        first = 1;
      }
      const std::size_t ncols = headers ? headers->size() : records[0].size();
      check_rectangular(records, ncols, first);
      return Table(std::move(id), std::move(headers), std::move(records));
    }
    case TableFormat::kJsonlRows: {
      std::vector<std::string_view> lines = split_lines(bytes);
      while (!lines.empty() && trim_ascii(lines.back()).empty()) {
        lines.pop_back();
      }
      if (lines.empty()) throw ParseError("empty input");
      std::optional<Table::Row> headers;
      std::vector<Table::Row> rows;
      for (std::size_t i = 0; i < lines.size(); ++i) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(lines[i]);
        } catch (const nlohmann::json::parse_error& e) {
          throw ParseError("jsonl: malformed line " + std::to_string(i + 1) +
                           ": " + e.what());
        }
        if (i == 0 && j.is_object()) {
          if (!j.contains("headers")) {
            throw ParseError("jsonl: header object lacks a \"headers\" key");
          }
          headers = json_string_array(j["headers"], i + 1);
          continue;
        }
        rows.push_back(json_string_array(j, i + 1));
      }
      if (!headers && rows.empty()) throw ParseError("empty input");
      const std::size_t ncols = headers ? headers->size() : rows[0].size();
      check_rectangular(rows, ncols, headers ? 1 : 0);
      return Table(std::move(id), std::move(headers), std::move(rows));
    }
  }
  throw ParseError("unknown table format");
}

std::string serialize_table(const Table& t, TableFormat format) {
  std::ostringstream out;
  switch (format) {
    case TableFormat::kCsvWithHeader:
      if (!t.headers()) {
        throw ValidationError("table '" + t.id() +
                              "' has no headers to write");
      }
      write_csv_record(out, *t.headers());
      [[fallthrough]];
    case TableFormat::kCsvHeaderless:
      for (const auto& row : t.rows()) write_csv_record(out, row);
      break;
    case TableFormat::kJsonlRows:
      if (t.headers()) {
        out << nlohmann::json{{"headers", *t.headers()}}.dump() << '\n';
      }
      for (const auto& row : t.rows()) {
        out << nlohmann::json(row).dump() << '\n';
      }
      break;
  }
  return out.str();
}

std::vector<std::string> column_values(const Table& t, std::size_t c) {
  if (c >= t.ncols()) {
    throw ValidationError("column " + std::to_string(c) +
                          " out of bounds for table '" + t.id() + "' with " +
                          std::to_string(t.ncols()) + " columns");
  }
  std::vector<std::string> out;
  out.reserve(t.nrows());
  for (const auto& row : t.rows()) out.push_back(row[c]);
  return out;
}

bool is_textual_column(const Table& t, std::size_t c) {
  std::size_t nonempty = 0;
  std::size_t non_numeric = 0;
  for (const auto& value : column_values(t, c)) {
    if (trim_ascii(value).empty()) continue;
    ++nonempty;
    if (!is_numeric_cell(value)) ++non_numeric;
  }
  return nonempty > 0 && 2 * non_numeric > nonempty;
}

std::optional<std::size_t> subject_column_proxy(const Table& t) {
  for (std::size_t c = 0; c < t.ncols(); ++c) {
    if (is_textual_column(t, c)) return c;
  }
  return std::nullopt;
}

Table project_columns(const Table& t, std::span<const std::size_t> cols,
                      std::string id) {
  for (std::size_t c : cols) {
    if (c >= t.ncols()) {
      throw ValidationError("column " + std::to_string(c) +
                            " out of bounds for table '" + t.id() + "'");
    }
  }
  std::optional<Table::Row> headers;
  if (t.headers()) {
    headers.emplace();
    for (std::size_t c : cols) headers->push_back((*t.headers())[c]);
  }
  std::vector<Table::Row> rows;
  rows.reserve(t.nrows());
  for (const auto& row : t.rows()) {
    Table::Row projected;
    projected.reserve(cols.size());
    for (std::size_t c : cols) projected.push_back(row[c]);
    rows.push_back(std::move(projected));
  }
  return Table(std::move(id), std::move(headers), std::move(rows));
}

}  // namespace observatory
