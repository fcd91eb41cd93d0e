#include "observatory/fd.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "observatory/error.hpp"
#include "observatory/rng.hpp"

namespace observatory {

namespace {

// Dense ids of the trimmed values of one column.
std::vector<std::size_t> value_ids(const Table& t, std::size_t col) {
  std::unordered_map<std::string_view, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(t.nrows());
  for (const auto& row : t.rows()) {
    auto [it, _] = ids.emplace(trim_ascii(row[col]), ids.size());
    out.push_back(it->second);
  }
  return out;
}

bool holds_on_ids(const std::vector<std::size_t>& x,
                  const std::vector<std::size_t>& y) {
  std::unordered_map<std::size_t, std::size_t> image;
  for (std::size_t r = 0; r < x.size(); ++r) {
    auto [it, inserted] = image.emplace(x[r], y[r]);
    if (!inserted && it->second != y[r]) return false;
  }
  return true;
}

void check_pair(const Table& t, std::size_t x, std::size_t y) {
  if (x >= t.ncols() || y >= t.ncols()) {
    throw ValidationError("FD column out of bounds for table '" + t.id() + "'");
  }
  if (x == y) throw ValidationError("trivial FD x -> x is not considered");
}

}  // namespace

bool fd_holds(const Table& t, std::size_t x_col, std::size_t y_col) {
  check_pair(t, x_col, y_col);
  return holds_on_ids(value_ids(t, x_col), value_ids(t, y_col));
}

std::vector<FdInstance> discover_unary_fds(const Table& t) {
  std::vector<std::vector<std::size_t>> ids;
  ids.reserve(t.ncols());
  for (std::size_t c = 0; c < t.ncols(); ++c) ids.push_back(value_ids(t, c));
  std::vector<FdInstance> out;
  for (std::size_t x = 0; x < t.ncols(); ++x) {
    for (std::size_t y = 0; y < t.ncols(); ++y) {
      if (x != y && holds_on_ids(ids[x], ids[y])) {
        out.push_back(FdInstance{t.id(), x, y});
      }
    }
  }
  return out;
}

FdGroupSet group_by_determinant(const Table& t, std::size_t x_col,
                                std::size_t y_col) {
  check_pair(t, x_col, y_col);
  FdGroupSet set{FdInstance{t.id(), x_col, y_col}, {}};
  for (std::size_t r = 0; r < t.nrows(); ++r) {
    set.groups[std::string(trim_ascii(t.rows()[r][x_col]))].push_back(r);
  }
  return set;
}

FdGroupSet fd_groups(const Table& t, const FdInstance& fd) {
  FdGroupSet set = group_by_determinant(t, fd.x_col, fd.y_col);
  for (const auto& [x_value, rows] : set.groups) {
    const std::string_view first = trim_ascii(t.rows()[rows.front()][fd.y_col]);
    for (std::size_t r : rows) {
      const std::string_view y = trim_ascii(t.rows()[r][fd.y_col]);
      if (y != first) {
        throw ValidationError(
            "FD " + std::to_string(fd.x_col) + " -> " +
            std::to_string(fd.y_col) + " violated in table '" + t.id() +
            "': x value '" + x_value + "' maps to both '" + std::string(first) +
            "' and '" + std::string(y) + "'");
      }
    }
  }
  return set;
}

std::vector<std::pair<std::size_t, std::size_t>> sample_non_fd_pairs(
    const Table& t, std::size_t count, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> ids;
  for (std::size_t c = 0; c < t.ncols(); ++c) ids.push_back(value_ids(t, c));
  std::vector<std::pair<std::size_t, std::size_t>> eligible;
  for (std::size_t x = 0; x < t.ncols(); ++x) {
    for (std::size_t y = 0; y < t.ncols(); ++y) {
      if (x != y && !holds_on_ids(ids[x], ids[y])) eligible.emplace_back(x, y);
    }
  }
  if (eligible.empty()) {
    throw MeasureError("table '" + t.id() + "' has no column pair without an FD");
  }
  const std::size_t k = std::min(count, eligible.size());
  SeededRng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
  }
  eligible.resize(k);
  std::sort(eligible.begin(), eligible.end());
  return eligible;
}

void write_fd_csv(const std::vector<FdListEntry>& entries, std::ostream& out) {
  std::vector<Table::Row> rows;
  rows.reserve(entries.size());
  for (const auto& e : entries) {
    rows.push_back({e.fd.table_id, std::to_string(e.fd.x_col),
                    std::to_string(e.fd.y_col), e.holds ? "true" : "false"});
  }
  const Table t("fds", Table::Row{"table_id", "x_col", "y_col", "holds"},
                std::move(rows));
  out << serialize_table(t, TableFormat::kCsvWithHeader);
}

std::vector<FdListEntry> read_fd_csv(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const Table t = parse_table(buf.str(), TableFormat::kCsvWithHeader, "fds");
  if (*t.headers() != Table::Row{"table_id", "x_col", "y_col", "holds"}) {
    throw ParseError("FD list header must be table_id,x_col,y_col,holds");
  }
  std::vector<FdListEntry> out;
  for (std::size_t r = 0; r < t.nrows(); ++r) {
    const std::string where = "FD list row " + std::to_string(r + 1);
    FdListEntry e;
    e.fd.table_id = t.cell(r, 0);
    try {
      std::size_t used = 0;
      e.fd.x_col = std::stoul(t.cell(r, 1), &used);
      if (used != t.cell(r, 1).size()) throw std::invalid_argument("x");
      e.fd.y_col = std::stoul(t.cell(r, 2), &used);
      if (used != t.cell(r, 2).size()) throw std::invalid_argument("y");
    } catch (const std::logic_error&) {
      throw ParseError(where + ": column index is not a number");
    }
    const std::string& holds = t.cell(r, 3);
    if (holds == "true" || holds == "1") {
      e.holds = true;
    } else if (holds == "false" || holds == "0") {
      e.holds = false;
    } else {
      throw ParseError(where + ": holds must be true or false");
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace observatory
