#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "observatory/table.hpp"

namespace observatory {

// Unary functional dependency x_col -> y_col.
struct FdInstance {
  std::string table_id;
  std::size_t x_col = 0;
  std::size_t y_col = 0;

  friend auto operator<=>(const FdInstance&, const FdInstance&) = default;
};

struct FdGroupSet {
  FdInstance fd;
  // Trimmed determinant value -> row indices, ascending.
  std::map<std::string, std::vector<std::size_t>> groups;
};

// Whether every trimmed x value maps to a single trimmed y value. Empty cells
// are an ordinary value.
bool fd_holds(const Table& t, std::size_t x_col, std::size_t y_col);

// All ordered pairs (x, y), x != y, with x -> y; sorted by (x, y).
std::vector<FdInstance> discover_unary_fds(const Table& t);

// Tuples grouped by determinant value. Throws ValidationError naming the
// offending x value and two conflicting y values when the FD does not hold.
FdGroupSet fd_groups(const Table& t, const FdInstance& fd);

// Same grouping without the FD check, for column pairs without the
// dependency (the baseline distribution of the preservation measure).
FdGroupSet group_by_determinant(const Table& t, std::size_t x_col,
                                std::size_t y_col);

// Seeded uniform sample without replacement of ordered pairs on which no FD
// holds, at most `count` of them, returned sorted.
std::vector<std::pair<std::size_t, std::size_t>> sample_non_fd_pairs(
    const Table& t, std::size_t count, std::uint64_t seed);

// CSV rows `table_id,x_col,y_col,holds` with a header line.
struct FdListEntry {
  FdInstance fd;
  bool holds = true;
};
void write_fd_csv(const std::vector<FdListEntry>& entries, std::ostream& out);
std::vector<FdListEntry> read_fd_csv(std::istream& in);

}  // namespace observatory
