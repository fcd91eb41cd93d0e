#include <gtest/gtest.h>

#include <random>

#include "observatory/error.hpp"
#include "observatory/table.hpp"

namespace observatory {
namespace {

Table small_table() {
  return Table("t", Table::Row{"name", "age", "city"},
               {{"Ann", "34", "Paris"}, {"Bob", "1,204", "Lyon"}, {"Cy", "", "Nice"}});
}

TEST(TableTest, RejectsRaggedRowsWithRecordIndex) {
  try {
    Table("t", Table::Row{"a", "b"}, {{"1", "2"}, {"3"}});
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(TableTest, RejectsEmptyIdAndZeroColumns) {
  EXPECT_THROW(Table("", std::nullopt, {{"a"}}), ValidationError);
  EXPECT_THROW(Table("t", std::nullopt, {}), ValidationError);
}

TEST(TableTest, RejectsTablesOverCellCap) {
  std::vector<Table::Row> rows(kMaxTableCells / 2 + 1, Table::Row{"x", "y"});
  EXPECT_THROW(Table("big", std::nullopt, std::move(rows)), ValidationError);
}

TEST(TableTest, Accessors) {
  const Table t = small_table();
  EXPECT_EQ(t.ncols(), 3u);
  EXPECT_EQ(t.nrows(), 3u);
  EXPECT_EQ(t.cell(1, 2), "Lyon");
  EXPECT_EQ(t.header(1), "age");
  const Table h("h", std::nullopt, {{"1"}});
  EXPECT_FALSE(h.header(0).has_value());
}

TEST(TableTest, TrimAscii) {
  EXPECT_EQ(trim_ascii("  a b \t\n"), "a b");
  EXPECT_EQ(trim_ascii("   "), "");
  EXPECT_EQ(trim_ascii(""), "");
}

TEST(TableTest, NumericCells) {
  for (const char* s : {"0", "-3", "+4.5", "1,204", "12,345,678.9", " 7 ", ".5", "3."}) {
    EXPECT_TRUE(is_numeric_cell(s)) << s;
  }
  for (const char* s : {"", "abc", "1,2", "12,34", "1.2.3", "--1", "1e5", "1,2345", ","}) {
    EXPECT_FALSE(is_numeric_cell(s)) << s;
  }
}

TEST(TableTest, TextualColumnsAndSubjectProxy) {
  const Table t = small_table();
  EXPECT_TRUE(is_textual_column(t, 0));
  EXPECT_FALSE(is_textual_column(t, 1));
  EXPECT_TRUE(is_textual_column(t, 2));
  EXPECT_EQ(subject_column_proxy(t), 0u);
  const Table numeric("n", std::nullopt, {{"1", "2"}, {"3", "4"}});
  EXPECT_FALSE(subject_column_proxy(numeric).has_value());
}

TEST(TableTest, ParsesRfc4180Csv) {
  const std::string csv = "a,b\r\n\"x, y\",\"he said \"\"hi\"\"\"\n\"multi\nline\",2\n";
  const Table t = parse_table(csv, TableFormat::kCsvWithHeader, "q");
  ASSERT_EQ(t.nrows(), 2u);
  EXPECT_EQ(t.cell(0, 0), "x, y");
  EXPECT_EQ(t.cell(0, 1), "he said \"hi\"");
  EXPECT_EQ(t.cell(1, 0), "multi\nline");
}

TEST(TableTest, HeaderlessCsv) {
  const Table t = parse_table("1,2\n3,4", TableFormat::kCsvHeaderless, "h");
  EXPECT_FALSE(t.headers().has_value());
  EXPECT_EQ(t.nrows(), 2u);
}

TEST(TableTest, RaggedCsvIsParseError) {
  EXPECT_THROW(parse_table("a,b\n1\n", TableFormat::kCsvWithHeader, "r"), ParseError);
}

TEST(TableTest, JsonlRows) {
  const std::string jsonl = "{\"headers\":[\"a\",\"b\"]}\n[\"1\",\"x\"]\n[\"2\",\"y\"]\n\n";
  const Table t = parse_table(jsonl, TableFormat::kJsonlRows, "j");
  EXPECT_EQ(t.header(1), "b");
  EXPECT_EQ(t.cell(1, 1), "y");
  EXPECT_THROW(parse_table("[1,2]\n", TableFormat::kJsonlRows, "j"), ParseError);
}

TEST(TableTest, InvalidUtf8Rejected) {
  EXPECT_TRUE(is_valid_utf8("caf\xc3\xa9"));
  EXPECT_FALSE(is_valid_utf8("\xff\xfe"));
  EXPECT_THROW(parse_table("a\n\xff\n", TableFormat::kCsvWithHeader, "u"), ParseError);
}

// Round trip over random tables with quotes, separators, newlines and blanks.
TEST(TableTest, SerializeParseRoundTripProperty) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> atoms = {"a", "", " ", ",", "\"", "\n", "x y", "\r\n", "7"};
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t ncols = 1 + rng() % 4, nrows = rng() % 5;
    auto cell = [&] {
      std::string s;
      for (std::size_t k = rng() % 3; k > 0; --k) s += atoms[rng() % atoms.size()];
      return s;
    };
    std::optional<Table::Row> headers;
    if (rng() % 2 == 0) {
      headers = Table::Row(ncols);
      for (auto& h : *headers) h = cell();
    }
    std::vector<Table::Row> rows(nrows, Table::Row(ncols));
    for (auto& r : rows)
      for (auto& c : r) c = cell();
    if (!headers && rows.empty()) rows.push_back(Table::Row(ncols, "z"));
    const Table t("rt", headers, rows);
    for (TableFormat f : {TableFormat::kCsvWithHeader, TableFormat::kCsvHeaderless,
                          TableFormat::kJsonlRows}) {
      if (f == TableFormat::kCsvWithHeader && !headers) continue;
      if (f == TableFormat::kCsvHeaderless && (headers || rows.empty())) continue;
      EXPECT_EQ(parse_table(serialize_table(t, f), f, "rt"), t) << trial;
    }
  }
}

TEST(TableTest, ProjectColumns) {
  const Table t = small_table();
  const std::size_t cols[] = {2, 0};
  const Table p = project_columns(t, cols, "p");
  EXPECT_EQ(p.ncols(), 2u);
  EXPECT_EQ(p.header(0), "city");
  EXPECT_EQ(p.cell(1, 1), "Bob");
  const std::size_t bad[] = {5};
  EXPECT_THROW(project_columns(t, bad, "p"), ValidationError);
}

}  // namespace
}  // namespace observatory
