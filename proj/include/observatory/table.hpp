#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace observatory {

enum class TableFormat { kCsvWithHeader, kCsvHeaderless, kJsonlRows };

inline constexpr std::size_t kMaxTableCells = 1'000'000;

// Rectangular relational table with an optional header row. Immutable after
// construction; the constructor enforces rectangularity and the size cap.
class Table {
 public:
  using Row = std::vector<std::string>;

  Table(std::string id, std::optional<Row> headers, std::vector<Row> rows);

  const std::string& id() const { return id_; }
  const std::optional<Row>& headers() const { return headers_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t ncols() const { return ncols_; }
  std::size_t nrows() const { return rows_.size(); }

  const std::string& cell(std::size_t row, std::size_t col) const;
  // Header text of a column, or nullopt when the table is headerless.
  std::optional<std::string_view> header(std::size_t col) const;

  Table with_id(std::string id) const;

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::string id_;
  std::optional<Row> headers_;
  std::vector<Row> rows_;
  std::size_t ncols_ = 0;
};

struct ColumnRef {
  std::string table_id;
  std::size_t col_index = 0;

  friend auto operator<=>(const ColumnRef&, const ColumnRef&) = default;
};

// Strips leading/trailing ASCII whitespace. This is the cell equality used by
// every overlap and FD computation.
std::string_view trim_ascii(std::string_view s);

// Optional sign, digits with optional thousands separators, optional single
// decimal point. Applied to the trimmed cell.
bool is_numeric_cell(std::string_view cell);

Table parse_table(std::string_view bytes, TableFormat format, std::string id);
std::string serialize_table(const Table& t, TableFormat format);

std::vector<std::string> column_values(const Table& t, std::size_t c);

// True iff strictly more than half of the non-empty cells are non-numeric.
bool is_textual_column(const Table& t, std::size_t c);

// Leftmost textual column, used as a stand-in for the subject column.
std::optional<std::size_t> subject_column_proxy(const Table& t);

// New table holding the given columns in the given order.
Table project_columns(const Table& t, std::span<const std::size_t> cols,
                      std::string id);

bool is_valid_utf8(std::string_view bytes);

}  // namespace observatory
