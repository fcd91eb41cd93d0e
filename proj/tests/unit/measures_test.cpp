#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "observatory/error.hpp"
#include "observatory/measures.hpp"
#include "oracles.hpp"

namespace observatory {
namespace {

using Strings = std::vector<std::string>;

std::vector<Vector> random_vectors(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                   double offset) {
  std::normal_distribution<double> g;
  std::vector<Vector> xs(n, Vector(d));
  for (auto& x : xs)
    for (double& v : x) v = offset + g(rng);
  return xs;
}

// ---- cosine / MCV ----------------------------------------------------------

TEST(CosineTest, HandValues) {
  const Vector a = {1, 1}, b = {1, 0}, c = {0, 1};
  EXPECT_NEAR(cosine(a, b), 0.70710678118654752, 1e-15);
  EXPECT_DOUBLE_EQ(cosine(b, c), 0.0);
  EXPECT_DOUBLE_EQ(cosine(a, a), 1.0);
  const Vector z = {0, 0};
  EXPECT_THROW(cosine(a, z), MeasureError);
  EXPECT_THROW(cosine(a, Vector{1, 2, 3}), MeasureError);
}

TEST(McvTest, HandValue) {
  const std::vector<Vector> xs = {{1, 0}, {1, 2}};
  EXPECT_NEAR(mcv_az(xs), std::sqrt(0.5), 1e-12);
}

TEST(McvTest, IdenticalObservationsGiveZero) {
  const std::vector<Vector> xs(5, Vector{0.1, -0.7, 0.3});
  EXPECT_EQ(mcv_az(xs), 0.0);
}

TEST(McvTest, Errors) {
  EXPECT_THROW(mcv_az(std::vector<Vector>{{1, 2}}), MeasureError);
  EXPECT_THROW(mcv_az(std::vector<Vector>{{1, 0}, {-1, 0}}), MeasureError);
  EXPECT_THROW(mcv_az(std::vector<Vector>{{1, 0}, {1}}), MeasureError);
}

TEST(McvTest, MatchesFullCovarianceOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto xs = random_vectors(rng, 2 + rng() % 9, 1 + rng() % 8, 0.5);
    EXPECT_NEAR(mcv_az(xs), oracle::mcv(xs), 1e-9);
  }
}

TEST(McvTest, RotationAndScaleInvariantProperty) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + rng() % 6;
    const auto xs = random_vectors(rng, 3 + rng() % 7, d, 1.0);
    // Random orthogonal matrix by Gram-Schmidt.
    std::vector<Vector> q(d, Vector(d));
    for (std::size_t i = 0; i < d; ++i) {
      for (double& v : q[i]) v = g(rng);
      for (std::size_t j = 0; j < i; ++j) {
        double p = 0.0;
        for (std::size_t k = 0; k < d; ++k) p += q[i][k] * q[j][k];
        for (std::size_t k = 0; k < d; ++k) q[i][k] -= p * q[j][k];
      }
      double n = 0.0;
      for (double v : q[i]) n += v * v;
      for (double& v : q[i]) v /= std::sqrt(n);
    }
    const double s = std::exp(g(rng));
    std::vector<Vector> rotated, scaled;
    for (const auto& x : xs) {
      Vector r(d, 0.0), sc(d);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < d; ++k) r[i] += q[i][k] * x[k];
        sc[i] = s * x[i];
      }
      rotated.push_back(r);
      scaled.push_back(sc);
    }
    const double base = mcv_az(xs);
    EXPECT_GE(base, 0.0);
    EXPECT_NEAR(mcv_az(rotated), base, 1e-8);
    EXPECT_NEAR(mcv_az(scaled), base, 1e-8);
  }
}

TEST(DispersionTest, IdenticalAndTwoPoint) {
  const std::vector<Vector> same(4, Vector{1, 2, 3});
  const DispersionResult d = cosine_dispersion(same);
  EXPECT_EQ(d.n, 4u);
  EXPECT_EQ(d.cosines, std::vector<double>(3, 1.0));
  EXPECT_EQ(d.mcv, 0.0);

  // cos = 0.5 between unit vectors at 60 degrees.
  const std::vector<Vector> two = {{1, 0}, {0.5, std::sqrt(3.0) / 2}};
  const DispersionResult e = cosine_dispersion(two);
  ASSERT_EQ(e.cosines.size(), 1u);
  EXPECT_NEAR(e.cosines[0], 0.5, 1e-15);
  EXPECT_NEAR(e.mcv, oracle::mcv(two), 1e-12);
  EXPECT_THROW(cosine_dispersion(std::vector<Vector>{{1.0}}), MeasureError);
}

// ---- overlap ---------------------------------------------------------------

TEST(OverlapTest, HandValues) {
  EXPECT_NEAR(containment(Strings{"a", "b", "c"}, Strings{"b", "c", "d"}), 2.0 / 3, 1e-15);
  EXPECT_EQ(containment(Strings{"a"}, Strings{"a", "b"}), 1.0);
  EXPECT_EQ(containment(Strings{"a"}, Strings{"b"}), 0.0);
  EXPECT_EQ(jaccard(Strings{"a", "b"}, Strings{"b", "a"}), 1.0);
  EXPECT_NEAR(jaccard(Strings{"a", "b"}, Strings{"b", "c"}), 1.0 / 3, 1e-15);
  EXPECT_NEAR(multiset_jaccard(Strings{"a", "a", "b"}, Strings{"a", "b", "b"}), 1.0 / 3,
              1e-15);
  EXPECT_EQ(multiset_jaccard(Strings{"x", "y"}, Strings{"x", "y"}), 0.5);
  EXPECT_EQ(multiset_jaccard(Strings{"x"}, Strings{"y"}), 0.0);
}

TEST(OverlapTest, TrimsAndDropsEmpty) {
  EXPECT_EQ(containment(Strings{" a ", "", "b"}, Strings{"a", "b\t"}), 1.0);
  EXPECT_THROW(containment(Strings{"", "  "}, Strings{"a"}), MeasureError);
  EXPECT_THROW(jaccard(Strings{}, Strings{""}), MeasureError);
  EXPECT_THROW(multiset_jaccard(Strings{}, Strings{}), MeasureError);
}

TEST(OverlapTest, MatchesOraclesAndBoundsProperty) {
  std::mt19937_64 rng(3);
  const Strings alphabet = {"a", "b", "c", "d", "e", " a", ""};
  for (int trial = 0; trial < 500; ++trial) {
    Strings q(1 + rng() % 8), c(1 + rng() % 8);
    for (auto& s : q) s = alphabet[rng() % 5];
    for (auto& s : c) s = alphabet[rng() % alphabet.size()];
    const double co = containment(q, c), ja = jaccard(q, c), mj = multiset_jaccard(q, c);
    EXPECT_NEAR(co, oracle::containment(q, c), 1e-12);
    EXPECT_NEAR(ja, oracle::jaccard(q, c), 1e-12);
    EXPECT_NEAR(mj, oracle::multiset_jaccard(q, c), 1e-12);
    EXPECT_GE(co, 0.0);
    EXPECT_LE(co, 1.0);
    EXPECT_LE(ja, co);
    EXPECT_LE(mj, 0.5);
    const auto qs = oracle::as_set(q), cs = oracle::as_set(c);
    EXPECT_EQ(co == 1.0, std::includes(cs.begin(), cs.end(), qs.begin(), qs.end()));
  }
}

// ---- ranks / spearman ------------------------------------------------------

TEST(SpearmanTest, HandValues) {
  const std::vector<std::pair<double, double>> p = {{1, 2}, {2, 2}, {3, 1}};
  EXPECT_NEAR(spearman(p), -0.8660254037844386, 1e-12);
  const std::vector<std::pair<double, double>> up = {{1, 10}, {2, 20}, {3, 35}};
  EXPECT_EQ(spearman(up), 1.0);
  const std::vector<std::pair<double, double>> down = {{1, 3}, {2, 2}, {3, -1}};
  EXPECT_EQ(spearman(down), -1.0);
}

TEST(SpearmanTest, Errors) {
  EXPECT_THROW(spearman(std::vector<std::pair<double, double>>{{1, 1}}), MeasureError);
  EXPECT_THROW(spearman(std::vector<std::pair<double, double>>{{1, 1}, {2, 1}}),
               MeasureError);
}

TEST(SpearmanTest, AverageRanks) {
  const double v[] = {10, 20, 10, 30, 20};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{1.5, 3.5, 1.5, 5, 3.5}));
  EXPECT_TRUE(has_ties(v));
  const double w[] = {3, 1, 2};
  EXPECT_FALSE(has_ties(w));
}

TEST(SpearmanTest, MatchesRankOracleWithTies) {
  std::mt19937_64 rng(4);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::pair<double, double>> p(2 + rng() % 9);
    for (auto& [x, y] : p) {
      x = static_cast<double>(rng() % 5);
      y = static_cast<double>(rng() % 4);
    }
    const double want = oracle::spearman(p);
    if (!std::isfinite(want)) {
      EXPECT_THROW(spearman(p), MeasureError);
      continue;
    }
    EXPECT_NEAR(spearman(p), want, 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

TEST(SpearmanTest, InvariantUnderMonotoneTransformProperty) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::pair<double, double>> p(3 + rng() % 10), t;
    for (auto& [x, y] : p) {
      x = g(rng);
      y = std::round(g(rng) * 2);
    }
    for (auto [x, y] : p) t.emplace_back(std::exp(x), y * y * y + 5);
    try {
      EXPECT_NEAR(spearman(p), spearman(t), 1e-12);
    } catch (const MeasureError&) {
    }
  }
}

TEST(JoinCorrelationTest, MonotoneCosineGivesPlusOne) {
  std::vector<OverlapPair> pairs;
  for (int i = 0; i < 6; ++i) {
    OverlapPair p;
    p.r_containment = 0.1 * i;
    p.r_jaccard = 0.05 * i;
    p.r_multiset_jaccard = 0.5 - 0.05 * i;
    p.m_cosine = std::tanh(0.1 * i);
    pairs.push_back(p);
  }
  const JoinCorrelation j = join_correlation(pairs, OverlapKind::kContainment);
  EXPECT_EQ(j.rho, 1.0);
  EXPECT_EQ(j.n, 6u);
  EXPECT_FALSE(j.ties);
  EXPECT_EQ(join_correlation(pairs, OverlapKind::kMultisetJaccard).rho, -1.0);
}

TEST(JoinCorrelationTest, MakeOverlapPair) {
  const Vector e1 = {1, 0}, e2 = {1, 1};
  const OverlapPair p = make_overlap_pair({"q", 0}, Strings{"a", "b"}, {"c", 1},
                                          Strings{"b", "c", "c"}, e1, e2);
  EXPECT_EQ(p.r_containment, 0.5);
  EXPECT_NEAR(p.r_jaccard, 1.0 / 3, 1e-15);
  EXPECT_EQ(p.r_multiset_jaccard, 0.2);
  EXPECT_NEAR(p.m_cosine, std::sqrt(0.5), 1e-15);
  EXPECT_EQ(p.overlap(OverlapKind::kJaccard), p.r_jaccard);
  EXPECT_EQ(parse_overlap_kind("multiset-jaccard"), OverlapKind::kMultisetJaccard);
  EXPECT_THROW(parse_overlap_kind("dice"), ValidationError);
}

// ---- FD variance -----------------------------------------------------------

TEST(FdVarianceTest, HandValue) {
  // d values 1 and 3 in one group: variance 2.
  const std::vector<FdGroupEmbeddings> groups = {
      {{{0, 0}, {1, 0}}, {{0, 0}, {0, 3}}},
      {{{5, 5}, {1, 1}}}};
  const FdVarianceResult r = fd_group_variance(groups, Norm::kL2);
  EXPECT_DOUBLE_EQ(r.sbar2, 2.0);
  EXPECT_EQ(r.groups_used, 1u);
  EXPECT_EQ(r.groups_skipped, 1u);
  const std::vector<FdGroupEmbeddings> singles = {{{{1}, {2}}}};
  EXPECT_THROW(fd_group_variance(singles, Norm::kL1), MeasureError);
}

TEST(FdVarianceTest, IdenticalTranslationsGiveZero) {
  const std::vector<FdGroupEmbeddings> groups = {
      {{{0, 1}, {2, 3}}, {{0, 1}, {2, 3}}, {{0, 1}, {2, 3}}}};
  EXPECT_EQ(fd_group_variance(groups, Norm::kL1).sbar2, 0.0);
  EXPECT_EQ(fd_group_variance(groups, Norm::kL2).sbar2, 0.0);
}

TEST(FdVarianceTest, MatchesOracle) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng() % 8;
    std::vector<FdGroupEmbeddings> groups(1 + rng() % 4);
    for (auto& grp : groups) {
      grp.resize(1 + rng() % 5);
      for (auto& [x, y] : grp) {
        x.resize(d);
        y.resize(d);
        for (double& v : x) v = g(rng);
        for (double& v : y) v = g(rng);
      }
    }
    groups[0].resize(std::max<std::size_t>(groups[0].size(), 2), groups[0][0]);
    for (Norm n : {Norm::kL1, Norm::kL2}) {
      EXPECT_NEAR(fd_group_variance(groups, n).sbar2,
                  oracle::fd_sbar2(groups, n == Norm::kL1), 1e-9);
    }
  }
  EXPECT_EQ(parse_norm("L1"), Norm::kL1);
  EXPECT_THROW(parse_norm("l3"), ValidationError);
}

// ---- knn / stability -------------------------------------------------------

EmbeddingSpace make_space(const std::map<std::string, Vector>& entries) {
  EmbeddingSpace s("m");
  for (const auto& [k, v] : entries) s.insert(k, v);
  return s;
}

TEST(KnnTest, TieBreakAndBounds) {
  const auto space = make_space({{"q", {1, 0}}, {"b", {1, 1}}, {"a", {1, 1}}, {"c", {0, 1}}});
  EXPECT_EQ(knn(space, "q", 2), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(knn(space, "q", 3), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_THROW(knn(space, "q", 4), MeasureError);
  EXPECT_THROW(knn(space, "q", 0), MeasureError);
  EXPECT_THROW(knn(space, "zz", 1), MeasureError);
}

TEST(KnnTest, MatchesExhaustiveSortAndIgnoresInsertionOrder) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 9, d = 1 + rng() % 8;
    std::map<std::string, Vector> entries;
    std::vector<std::pair<std::string, Vector>> order;
    for (std::size_t i = 0; i < n; ++i) {
      Vector v(d);
      for (double& x : v) x = g(rng);
      entries["e" + std::to_string(i)] = v;
      order.emplace_back("e" + std::to_string(i), v);
    }
    std::shuffle(order.begin(), order.end(), rng);
    EmbeddingSpace shuffled("m");
    for (auto& [k, v] : order) shuffled.insert(k, v);
    const auto space = make_space(entries);
    const std::size_t k = 1 + rng() % (n - 1);
    for (const auto& [q, _] : entries) {
      EXPECT_EQ(knn(space, q, k), oracle::knn(entries, q, k));
      EXPECT_EQ(knn(shuffled, q, k), knn(space, q, k));
    }
  }
}

TEST(StabilityTest, IdenticalAndDisjoint) {
  std::map<std::string, Vector> s1 = {{"a", {1, 0, 0, 0}}, {"b", {0.9, 0.1, 0, 0}},
                                      {"c", {0, 0, 1, 0}}, {"d", {0, 0, 0.9, 0.1}}};
  const auto a = make_space(s1);
  const std::vector<std::string> all = {"a", "b", "c", "d"};
  for (std::size_t k = 1; k <= 3; ++k) EXPECT_EQ(entity_stability(a, a, all, k).mean, 1.0);
  // Swap partners: a's nearest is b in s1 and c in s2.
  std::map<std::string, Vector> s2 = {{"a", {1, 0, 0, 0}}, {"c", {0.9, 0.1, 0, 0}},
                                      {"b", {0, 0, 1, 0}}, {"d", {0, 0, 0.9, 0.1}}};
  const auto b = make_space(s2);
  const std::vector<std::string> q = {"a"};
  EXPECT_EQ(entity_stability(a, b, q, 1).mean, 0.0);
  EXPECT_THROW(entity_stability(a, b, std::vector<std::string>{}, 1), MeasureError);
}

TEST(StabilityTest, MatchesOracleAndIsSymmetric) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng() % 8, d = 1 + rng() % 8;
    std::map<std::string, Vector> m1, m2;
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < n; ++i) {
      Vector u(d), v(d);
      for (double& x : u) x = g(rng);
      for (std::size_t j = 0; j < d; ++j) v[j] = u[j] + 0.7 * g(rng);
      keys.push_back("k" + std::to_string(i));
      m1[keys.back()] = u;
      m2[keys.back()] = v;
    }
    const std::size_t k = 1 + rng() % (n - 1);
    const auto a = make_space(m1), b = make_space(m2);
    const auto r = entity_stability(a, b, keys, k);
    EXPECT_NEAR(r.mean, oracle::stability(m1, m2, keys, k), 1e-9);
    EXPECT_EQ(r.per_query.size(), keys.size());
    EXPECT_EQ(entity_stability(b, a, keys, k).mean, r.mean);
  }
}

// ---- fidelity / robustness / context --------------------------------------

TEST(FidelityTest, EqualSamplesAndDirectComputation) {
  const Vector full = {1, 2, 3};
  const std::vector<Vector> same(3, full);
  const FidelityResult f = sample_fidelity(full, same);
  EXPECT_EQ(f.mean_cos, 1.0);
  EXPECT_EQ(f.mcv, 0.0);

  const std::vector<Vector> perturbed = {{1, 2, 4}, {0, 2, 3}, {1, 1, 3}};
  const FidelityResult p = sample_fidelity(full, perturbed);
  double want = 0.0;
  for (const auto& s : perturbed) want += oracle::cosine(full, s) / 3.0;
  EXPECT_NEAR(p.mean_cos, want, 1e-12);
  std::vector<Vector> all = {full};
  all.insert(all.end(), perturbed.begin(), perturbed.end());
  EXPECT_NEAR(p.mcv, oracle::mcv(all), 1e-12);
  EXPECT_THROW(sample_fidelity(full, std::vector<Vector>{}), MeasureError);
}

TEST(RobustnessTest, PairAverages) {
  std::map<std::string, PerturbationGroup> groups;
  groups["x"] = {{1, 0}, {{1, 0}, {0, 1}}};
  groups["y"] = {{1, 1}, {{1, 1}, {1, 0}}};
  const RobustnessResult r = perturbation_robustness(groups);
  EXPECT_NEAR(r.overall_mean, (1.0 + 0.0 + 1.0 + std::sqrt(0.5)) / 4, 1e-12);
  EXPECT_DOUBLE_EQ(r.per_original.at("x"), 0.5);
  groups["z"] = {{1, 1}, {}};
  EXPECT_THROW(perturbation_robustness(groups), MeasureError);
}

TEST(ContextShiftTest, ColumnOnlyIsOne) {
  const Vector single = {1, 0};
  const std::map<ContextSetting, Vector> by = {{ContextSetting::kNeighbors, {1, 1}},
                                               {ContextSetting::kEntireTable, {1, 0}}};
  const auto shift = context_shift(single, by);
  EXPECT_EQ(shift.at(ContextSetting::kColumnOnly), 1.0);
  EXPECT_NEAR(shift.at(ContextSetting::kNeighbors), std::sqrt(0.5), 1e-15);
  EXPECT_EQ(shift.at(ContextSetting::kEntireTable), 1.0);
  EXPECT_FALSE(shift.count(ContextSetting::kSubjectColumn));
}

}  // namespace
}  // namespace observatory
