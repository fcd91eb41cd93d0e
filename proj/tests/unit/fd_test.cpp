#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "observatory/error.hpp"
#include "observatory/fd.hpp"

namespace observatory {
namespace {

Table residence() {
  return Table("residence", Table::Row{"name", "city", "country", "continent"},
               {{"Jan", "Amsterdam", "Netherlands", "Europe"},
                {"Emma", "Rotterdam", "Netherlands", "Europe"},
                {"Liam", "Toronto", "Canada", "North America"},
                {"Sophie", "Utrecht", "Netherlands", "Europe"},
                {"Olivia", "Boston", "USA", "North America"},
                {"Noah", "Seattle", "USA", "North America"}});
}

// Pairwise tuple check straight from the definition.
bool brute_fd(const Table& t, std::size_t x, std::size_t y) {
  for (std::size_t i = 0; i < t.nrows(); ++i)
    for (std::size_t j = 0; j < t.nrows(); ++j)
      if (trim_ascii(t.cell(i, x)) == trim_ascii(t.cell(j, x)) &&
          trim_ascii(t.cell(i, y)) != trim_ascii(t.cell(j, y)))
        return false;
  return true;
}

TEST(FdTest, CountryDeterminesContinent) {
  const Table t = residence();
  EXPECT_TRUE(fd_holds(t, 2, 3));
  EXPECT_FALSE(fd_holds(t, 3, 2));
  const auto fds = discover_unary_fds(t);
  EXPECT_NE(std::find(fds.begin(), fds.end(), FdInstance{"residence", 2, 3}), fds.end());
  EXPECT_EQ(std::find(fds.begin(), fds.end(), FdInstance{"residence", 3, 2}), fds.end());
}

TEST(FdTest, DiscoveryMatchesBruteForce) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t ncols = 1 + rng() % 4, nrows = 1 + rng() % 7;
    std::vector<Table::Row> rows(nrows, Table::Row(ncols));
    for (auto& r : rows)
      for (auto& c : r) c = std::string(1, static_cast<char>('a' + rng() % 3)) +
                            (rng() % 4 == 0 ? " " : "");
    const Table t("r", std::nullopt, rows);
    std::vector<FdInstance> want;
    for (std::size_t x = 0; x < ncols; ++x)
      for (std::size_t y = 0; y < ncols; ++y)
        if (x != y && brute_fd(t, x, y)) want.push_back({"r", x, y});
    EXPECT_EQ(discover_unary_fds(t), want);
  }
}

TEST(FdTest, GroupsByDeterminant) {
  const FdGroupSet gs = fd_groups(residence(), {"residence", 2, 3});
  ASSERT_EQ(gs.groups.size(), 3u);
  EXPECT_EQ(gs.groups.at("Netherlands"), (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(gs.groups.at("Canada"), (std::vector<std::size_t>{2}));
}

TEST(FdTest, ViolationNamesConflict) {
  try {
    fd_groups(residence(), {"residence", 3, 2});
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    for (const char* part : {"North America", "Canada", "USA"}) {
      EXPECT_NE(msg.find(part), std::string::npos) << msg;
    }
  }
  const FdGroupSet any = group_by_determinant(residence(), 3, 2);
  EXPECT_EQ(any.groups.at("Europe").size(), 3u);
}

TEST(FdTest, NonFdPairSampling) {
  const Table t = residence();
  const auto all = sample_non_fd_pairs(t, 100, 1);
  for (const auto& [x, y] : all) {
    EXPECT_NE(x, y);
    EXPECT_FALSE(fd_holds(t, x, y));
  }
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  const auto two = sample_non_fd_pairs(t, 2, 1);
  EXPECT_EQ(two.size(), 2u);
  EXPECT_EQ(two, sample_non_fd_pairs(t, 2, 1));
  const Table keyed("k", std::nullopt, {{"1", "a"}, {"2", "b"}});
  EXPECT_THROW(sample_non_fd_pairs(keyed, 1, 1), MeasureError);
}

TEST(FdTest, FdCsvRoundTrip) {
  const std::vector<FdListEntry> entries = {{{"residence", 2, 3}, true},
                                            {{"other, table", 0, 1}, false}};
  std::stringstream ss;
  write_fd_csv(entries, ss);
  const auto back = read_fd_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].fd, entries[1].fd);
  EXPECT_FALSE(back[1].holds);
  std::istringstream bad("table_id,x_col\nfoo,1\n");
  EXPECT_THROW(read_fd_csv(bad), ValidationError);
}

}  // namespace
}  // namespace observatory
