#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "observatory/embedding_io.hpp"
#include "observatory/stats.hpp"
#include "observatory/table.hpp"
#include "observatory/variants.hpp"

namespace observatory {

using Vector = std::vector<double>;

// u.v / (|u| |v|), clamped to [-1, 1]. Zero-norm input throws.
double cosine(std::span<const double> u, std::span<const double> v);

// Albert-Zhang multivariate coefficient of variation,
// sqrt(mu' S mu / (mu' mu)^2), with S the (n-1) sample covariance. S is never
// formed or inverted: mu' S mu = sum_i ((x_i - mu) . mu)^2 / (n - 1).
double mcv_az(std::span<const Vector> observations);

struct DispersionResult {
  std::string key;
  std::size_t n = 0;
  double mcv = 0.0;
  std::vector<double> cosines;  // variant i >= 1 against variant 0
  FiveNumber summary;           // over `cosines`
};

DispersionResult cosine_dispersion(std::span<const Vector> series);

// Value overlap between a query and a candidate column. Cells are trimmed;
// empty cells are dropped before counting.
double containment(std::span<const std::string> q,
                   std::span<const std::string> c);
double jaccard(std::span<const std::string> q, std::span<const std::string> c);
// |q ∩ c| / (|q| + |c|) with min-count multiset intersection; at most 0.5.
double multiset_jaccard(std::span<const std::string> q,
                        std::span<const std::string> c);

// Average (fractional) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> values);
bool has_ties(std::span<const double> values);

// Pearson correlation of average ranks. Throws MeasureError for n < 2 or a
// constant variable.
double spearman(std::span<const std::pair<double, double>> pairs);

enum class OverlapKind { kContainment, kJaccard, kMultisetJaccard };
std::string_view to_string(OverlapKind kind);
OverlapKind parse_overlap_kind(std::string_view text);

struct OverlapPair {
  ColumnRef query;
  ColumnRef candidate;
  double r_containment = 0.0;
  double r_jaccard = 0.0;
  double r_multiset_jaccard = 0.0;
  double m_cosine = 0.0;

  double overlap(OverlapKind kind) const;
};

OverlapPair make_overlap_pair(ColumnRef query, std::span<const std::string> q,
                              ColumnRef candidate,
                              std::span<const std::string> c,
                              std::span<const double> eq,
                              std::span<const double> ec);

struct JoinCorrelation {
  double rho = 0.0;
  std::size_t n = 0;
  bool ties = false;
};

JoinCorrelation join_correlation(std::span<const OverlapPair> pairs,
                                 OverlapKind kind);

enum class Norm { kL1, kL2 };
std::string_view to_string(Norm norm);
Norm parse_norm(std::string_view text);

// (E(x_i), E(y_i)) pairs of one FD group.
using FdGroupEmbeddings = std::vector<std::pair<Vector, Vector>>;

struct FdVarianceResult {
  double sbar2 = 0.0;
  std::size_t groups_used = 0;
  std::size_t groups_skipped = 0;
};

// Mean over groups of size >= 2 of the sample variance of the translation
// lengths |E(x_i) - E(y_i)|. Smaller groups are skipped and counted.
FdVarianceResult fd_group_variance(std::span<const FdGroupEmbeddings> groups,
                                   Norm norm);

// k nearest keys to `query_key` (excluded) by descending cosine, ties broken
// by ascending key.
std::vector<std::string> knn(const EmbeddingSpace& space,
                             const std::string& query_key, std::size_t k);

struct StabilityResult {
  double mean = 0.0;
  std::vector<double> per_query;
};

StabilityResult entity_stability(const EmbeddingSpace& s1,
                                 const EmbeddingSpace& s2,
                                 std::span<const std::string> queries,
                                 std::size_t k);

struct FidelityResult {
  double mean_cos = 0.0;
  double mcv = 0.0;
};

// Mean cosine of each sample against the full-column embedding, and the MCV of
// {full} ∪ samples.
FidelityResult sample_fidelity(std::span<const double> full,
                               std::span<const Vector> samples);

struct PerturbationGroup {
  Vector original;
  std::vector<Vector> perturbed;
};

struct RobustnessResult {
  double overall_mean = 0.0;  // over all pairs
  std::map<std::string, double> per_original;
};

RobustnessResult perturbation_robustness(
    const std::map<std::string, PerturbationGroup>& groups);

// Cosine of the single-column embedding against each available context
// embedding; the column-only setting is 1 by definition.
std::map<ContextSetting, double> context_shift(
    std::span<const double> single,
    const std::map<ContextSetting, Vector>& by_setting);

}  // namespace observatory
