#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "observatory/error.hpp"
#include "observatory/variants.hpp"

namespace observatory {
namespace {

Table people() {
  return Table("people", Table::Row{"id", "name", "city", "age"},
               {{"1", "Ann", "Paris", "34"},
                {"2", "Bob", "Lyon", "51"},
                {"3", "Cy", "Nice", "27"}});
}

std::size_t factorial(std::size_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

TEST(PermutationTest, FullEnumerationWhenBudgetAllows) {
  const PermutationPlan p = sample_permutations(4, 24, 1);
  ASSERT_EQ(p.permutations.size(), 24u);
  Permutation perm(4);
  std::iota(perm.begin(), perm.end(), 0);
  for (const auto& got : p.permutations) {
    EXPECT_EQ(got, perm);
    std::next_permutation(perm.begin(), perm.end());
  }
}

TEST(PermutationTest, SampledPlansAreDistinctBijectionsWithIdentityFirst) {
  for (std::size_t n : {5, 7, 12}) {
    const PermutationPlan p = sample_permutations(n, 100, 42);
    const std::size_t want = std::min<std::size_t>(100, factorial(n));
    ASSERT_EQ(p.permutations.size(), want);
    Permutation id(n);
    std::iota(id.begin(), id.end(), 0);
    EXPECT_EQ(p.permutations[0], id);
    std::set<Permutation> seen;
    for (const auto& perm : p.permutations) {
      EXPECT_TRUE(is_bijection(perm, n));
      EXPECT_TRUE(seen.insert(perm).second);
    }
  }
}

TEST(PermutationTest, SeededAndReproducible) {
  EXPECT_EQ(sample_permutations(9, 50, 42), sample_permutations(9, 50, 42));
  EXPECT_NE(sample_permutations(9, 50, 42).permutations,
            sample_permutations(9, 50, 43).permutations);
}

TEST(PermutationTest, DegenerateSizes) {
  EXPECT_EQ(sample_permutations(1, 10, 0).permutations.size(), 1u);
  EXPECT_EQ(sample_permutations(3, 1, 0).permutations.size(), 1u);
  EXPECT_THROW(sample_permutations(3, 0, 0), ValidationError);
}

TEST(PermutationTest, PlanJsonRoundTrip) {
  PermutationPlan p = sample_permutations(6, 20, 9);
  p.table_id = "t";
  p.axis = Axis::kColumn;
  EXPECT_EQ(plan_from_json(plan_to_json(p)), p);
  EXPECT_THROW(plan_from_json("{\"table_id\":\"t\",\"axis\":\"row\",\"seed\":1,"
                              "\"perms\":[[1,0]]}"),
               ValidationError);
  EXPECT_THROW(plan_from_json("{\"table_id\":\"t\",\"axis\":\"row\",\"seed\":1,"
                              "\"perms\":[[0,1],[0,0]]}"),
               ValidationError);
}

TEST(PermutationTest, ApplyAndInvert) {
  const Table t = people();
  const Permutation perm = {2, 0, 1};
  const Table r = apply_permutation(t, Axis::kRow, perm, 3);
  EXPECT_EQ(r.id(), "people#row-3");
  EXPECT_EQ(r.cell(0, 1), "Cy");
  EXPECT_EQ(r.headers(), t.headers());
  const Table back = apply_permutation(r, Axis::kRow, invert_permutation(perm), 0);
  EXPECT_EQ(back.rows(), t.rows());

  const Permutation cols = {3, 2, 1, 0};
  const Table c = apply_permutation(t, Axis::kColumn, cols, 1);
  EXPECT_EQ(c.id(), "people#col-1");
  EXPECT_EQ(c.header(0), "age");
  EXPECT_EQ(c.cell(1, 1), "Lyon");
  EXPECT_THROW(apply_permutation(t, Axis::kRow, Permutation{0, 0, 1}), ValidationError);
}

// Every subset of the right size must be reachable, and draws stay uniform
// enough that no subset dominates.
TEST(SampleRowsTest, CoversAllSubsetsUniformly) {
  std::map<std::vector<std::size_t>, int> counts;
  const int trials = 6000;
  for (int s = 0; s < trials; ++s) {
    const auto idx = sample_row_indices(5, 0.4, static_cast<std::uint64_t>(s));
    ASSERT_EQ(idx.size(), 2u);
    ASSERT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    ++counts[idx];
  }
  ASSERT_EQ(counts.size(), 10u);  // C(5, 2)
  for (const auto& [subset, c] : counts) {
    EXPECT_GT(c, trials / 10 * 0.75);
    EXPECT_LT(c, trials / 10 * 1.25);
  }
}

TEST(SampleRowsTest, SizesAndOrder) {
  const std::vector<std::string> v = {"a", "b", "c", "d", "e", "f", "g"};
  EXPECT_EQ(sample_rows(v, 1.0, 3), v);
  EXPECT_EQ(sample_rows(v, 0.01, 3).size(), 1u);
  EXPECT_EQ(sample_rows(v, 0.5, 3).size(), 3u);
  const auto s = sample_rows(v, 0.5, 3);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_EQ(sample_rows(v, 0.5, 3), sample_rows(v, 0.5, 3));
  EXPECT_THROW(sample_rows(v, 0.0, 3), ValidationError);
  EXPECT_THROW(sample_rows(v, 1.5, 3), ValidationError);
}

TEST(ContextTest, SettingsForMiddleColumn) {
  const Table t = people();
  EXPECT_EQ(*context_columns(t, 2, ContextSetting::kColumnOnly), std::vector<std::size_t>{2});
  EXPECT_EQ(*context_columns(t, 2, ContextSetting::kSubjectColumn),
            (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(*context_columns(t, 2, ContextSetting::kNeighbors),
            (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(*context_columns(t, 2, ContextSetting::kEntireTable),
            (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_FALSE(context_columns(t, 1, ContextSetting::kSubjectColumn).has_value());
}

TEST(ContextTest, VariantsLocateTarget) {
  const auto vs = context_variants(people(), 3);
  EXPECT_EQ(vs.size(), 4u);
  const ContextVariant& n = vs.at(ContextSetting::kNeighbors);
  EXPECT_EQ(n.source_columns, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(n.table.header(n.target_position), "age");
}

TEST(ContextTest, SingleColumnTable) {
  const Table t("one", Table::Row{"v"}, {{"a"}, {"b"}});
  const auto vs = context_variants(t, 0);
  EXPECT_FALSE(vs.count(ContextSetting::kSubjectColumn));
  EXPECT_EQ(vs.at(ContextSetting::kEntireTable).source_columns, std::vector<std::size_t>{0});
}

TEST(ContextTest, ParseSettingNames) {
  for (ContextSetting s : kAllContextSettings) {
    EXPECT_EQ(parse_context_setting(to_string(s)), s);
  }
  EXPECT_THROW(parse_context_setting("everything"), ValidationError);
}

TEST(HeaderPerturbationTest, Abbreviation) {
  EXPECT_EQ(abbreviate_header("CountryName"), "CntryNm");
  EXPECT_EQ(abbreviate_header("population_m"), "ppltn_m");
  EXPECT_EQ(abbreviate_header("id"), "id");
  const Table p = perturb_headers(people(), HeaderPerturbation::kAbbreviate);
  EXPECT_EQ(p.header(1), "nm");
  EXPECT_EQ(p.rows(), people().rows());
}

TEST(HeaderPerturbationTest, SynonymMap) {
  const std::map<std::string, std::string> syn = {{"city", "town"}};
  const Table p = perturb_headers(people(), HeaderPerturbation::kSynonymMap, &syn);
  EXPECT_EQ(p.header(2), "town");
  EXPECT_EQ(p.header(1), "name");
  EXPECT_THROW(perturb_headers(people(), HeaderPerturbation::kSynonymMap), ValidationError);
  const Table headerless("h", std::nullopt, {{"x"}});
  EXPECT_THROW(perturb_headers(headerless, HeaderPerturbation::kAbbreviate), ValidationError);
}

}  // namespace
}  // namespace observatory
