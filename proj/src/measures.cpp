#include "observatory/measures.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string_view>
#include <unordered_map>

#include "observatory/error.hpp"

namespace observatory {

namespace {

std::vector<std::string_view> overlap_cells(std::span<const std::string> raw) {
  std::vector<std::string_view> out;
  out.reserve(raw.size());
  for (const auto& cell : raw) {
    std::string_view v = trim_ascii(cell);
    if (!v.empty()) out.push_back(v);
  }
  return out;
}

std::set<std::string_view> as_set(std::span<const std::string> raw) {
  const auto cells = overlap_cells(raw);
  return {cells.begin(), cells.end()};
}

std::size_t intersection_size(const std::set<std::string_view>& a,
                              const std::set<std::string_view>& b) {
  std::size_t n = 0;
  for (const auto& v : a) n += b.count(v);
  return n;
}

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

void check_same_dim(std::span<const Vector> vs) {
  for (const auto& v : vs) {
    if (v.size() != vs.front().size()) {
      throw MeasureError("observations have different dimensionality");
    }
  }
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = pairwise_sum(x) / n;
  const double my = pairwise_sum(y) / n;
  std::vector<double> sxy(x.size()), sxx(x.size()), syy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy[i] = dx * dy;
    sxx[i] = dx * dx;
    syy[i] = dy * dy;
  }
  const double cxy = pairwise_sum(sxy);
  const double cxx = pairwise_sum(sxx);
  const double cyy = pairwise_sum(syy);
  if (!(cxx > 0.0) || !(cyy > 0.0)) {
    throw MeasureError("rank correlation undefined for a constant variable");
  }
  return std::clamp(cxy / std::sqrt(cxx * cyy), -1.0, 1.0);
}

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw MeasureError("cosine of vectors with different dimensionality");
  }
  const double uu = dot(u, u);
  const double vv = dot(v, v);
  if (!(uu > 0.0) || !(vv > 0.0)) {
    throw MeasureError("cosine of a zero-norm vector");
  }
  double denom = std::sqrt(uu * vv);
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    denom = std::sqrt(uu) * std::sqrt(vv);
  }
  return std::clamp(dot(u, v) / denom, -1.0, 1.0);
}

double mcv_az(std::span<const Vector> observations) {
  const std::size_t n = observations.size();
  if (n < 2) throw MeasureError("MCV needs at least two observations");
  check_same_dim(observations);
  const std::size_t dim = observations.front().size();
  const Vector& ref = observations.front();

  // Mean as ref + mean(x_i - ref): identical observations give mu == ref
  // exactly and therefore an MCV of exactly zero.
  Vector mu(dim);
  std::vector<double> column(n);
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < n; ++i) column[i] = observations[i][d] - ref[d];
    mu[d] = ref[d] + pairwise_sum(column) / static_cast<double>(n);
  }
  const double mu_sq = dot(mu, mu);
  if (!(mu_sq > 0.0)) {
    throw MeasureError("MCV undefined: mean vector is zero");
  }
  std::vector<double> proj_sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    double p = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      p += (observations[i][d] - mu[d]) * mu[d];
    }
    proj_sq[i] = p * p;
  }
  const double quad = pairwise_sum(proj_sq) / static_cast<double>(n - 1);
  return std::sqrt(quad) / mu_sq;
}

DispersionResult cosine_dispersion(std::span<const Vector> series) {
  if (series.size() < 2) {
    throw MeasureError("dispersion needs at least two variants");
  }
  DispersionResult r;
  r.n = series.size();
  r.cosines.reserve(series.size() - 1);
  for (std::size_t i = 1; i < series.size(); ++i) {
    r.cosines.push_back(cosine(series[i], series[0]));
  }
  r.mcv = mcv_az(series);
  r.summary = summarize(r.cosines);
  return r;
}

double containment(std::span<const std::string> q,
                   std::span<const std::string> c) {
  const auto qs = as_set(q);
  if (qs.empty()) throw MeasureError("containment of an empty query column");
  return static_cast<double>(intersection_size(qs, as_set(c))) /
         static_cast<double>(qs.size());
}

double jaccard(std::span<const std::string> q, std::span<const std::string> c) {
  const auto qs = as_set(q);
  const auto cs = as_set(c);
  const std::size_t inter = intersection_size(qs, cs);
  const std::size_t uni = qs.size() + cs.size() - inter;
  if (uni == 0) throw MeasureError("Jaccard of two empty columns");
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double multiset_jaccard(std::span<const std::string> q,
                        std::span<const std::string> c) {
  const auto qv = overlap_cells(q);
  const auto cv = overlap_cells(c);
  if (qv.empty() && cv.empty()) {
    throw MeasureError("multiset Jaccard of two empty columns");
  }
  std::unordered_map<std::string_view, std::size_t> qcount;
  for (auto v : qv) ++qcount[v];
  std::size_t inter = 0;
  for (auto v : cv) {
    auto it = qcount.find(v);
    if (it != qcount.end() && it->second > 0) {
      --it->second;
      ++inter;
    }
  }
  return static_cast<double>(inter) /
         static_cast<double>(qv.size() + cv.size());
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the average of ranks i+1..j+1.
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

bool has_ties(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

double spearman(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2) {
    throw MeasureError("rank correlation needs at least two pairs");
  }
  std::vector<double> x, y;
  x.reserve(pairs.size());
  y.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw MeasureError("rank correlation of non-finite values");
    }
    x.push_back(a);
    y.push_back(b);
  }
  return pearson(average_ranks(x), average_ranks(y));
}

std::string_view to_string(OverlapKind kind) {
  switch (kind) {
    case OverlapKind::kContainment:
      return "containment";
    case OverlapKind::kJaccard:
      return "jaccard";
    case OverlapKind::kMultisetJaccard:
      return "multiset-jaccard";
  }
  return "unknown";
}

OverlapKind parse_overlap_kind(std::string_view text) {
  for (OverlapKind k : {OverlapKind::kContainment, OverlapKind::kJaccard,
                        OverlapKind::kMultisetJaccard}) {
    if (text == to_string(k)) return k;
  }
  throw ValidationError("unknown overlap kind '" + std::string(text) + "'");
}

double OverlapPair::overlap(OverlapKind kind) const {
  switch (kind) {
    case OverlapKind::kContainment:
      return r_containment;
    case OverlapKind::kJaccard:
      return r_jaccard;
    case OverlapKind::kMultisetJaccard:
      return r_multiset_jaccard;
  }
  return r_containment;
}

OverlapPair make_overlap_pair(ColumnRef query, std::span<const std::string> q,
                              ColumnRef candidate,
                              std::span<const std::string> c,
                              std::span<const double> eq,
                              std::span<const double> ec) {
  OverlapPair p;
  p.query = std::move(query);
  p.candidate = std::move(candidate);
  p.r_containment = containment(q, c);
  p.r_jaccard = jaccard(q, c);
  p.r_multiset_jaccard = multiset_jaccard(q, c);
  p.m_cosine = cosine(eq, ec);
  return p;
}

JoinCorrelation join_correlation(std::span<const OverlapPair> pairs,
                                 OverlapKind kind) {
  std::vector<std::pair<double, double>> xy;
  std::vector<double> m, r;
  xy.reserve(pairs.size());
  for (const auto& p : pairs) {
    xy.emplace_back(p.m_cosine, p.overlap(kind));
    m.push_back(p.m_cosine);
    r.push_back(p.overlap(kind));
  }
  JoinCorrelation out;
  out.rho = spearman(xy);
  out.n = pairs.size();
  out.ties = has_ties(m) || has_ties(r);
  return out;
}

std::string_view to_string(Norm norm) {
  return norm == Norm::kL1 ? "l1" : "l2";
}

Norm parse_norm(std::string_view text) {
  if (text == "l1" || text == "L1") return Norm::kL1;
  if (text == "l2" || text == "L2") return Norm::kL2;
  throw ValidationError("unknown norm '" + std::string(text) + "'");
}

FdVarianceResult fd_group_variance(std::span<const FdGroupEmbeddings> groups,
                                   Norm norm) {
  FdVarianceResult out;
  std::vector<double> variances;
  for (const auto& group : groups) {
    if (group.size() < 2) {
      ++out.groups_skipped;
      continue;
    }
    std::vector<double> d;
    d.reserve(group.size());
    for (const auto& [ex, ey] : group) {
      if (ex.size() != ey.size()) {
        throw MeasureError("FD pair embeddings differ in dimensionality");
      }
      std::vector<double> parts(ex.size());
      for (std::size_t i = 0; i < ex.size(); ++i) {
        const double diff = ex[i] - ey[i];
        parts[i] = norm == Norm::kL1 ? std::abs(diff) : diff * diff;
      }
      const double s = pairwise_sum(parts);
      d.push_back(norm == Norm::kL1 ? s : std::sqrt(s));
    }
    const double m = static_cast<double>(d.size());
    const double mean = pairwise_sum(d) / m;
    std::vector<double> sq(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      sq[i] = (d[i] - mean) * (d[i] - mean);
    }
    variances.push_back(pairwise_sum(sq) / (m - 1.0));
    ++out.groups_used;
  }
  if (variances.empty()) {
    throw MeasureError("no FD group has two or more tuples");
  }
  out.sbar2 = pairwise_sum(variances) / static_cast<double>(variances.size());
  return out;
}

std::vector<std::string> knn(const EmbeddingSpace& space,
                             const std::string& query_key, std::size_t k) {
  const Vector& q = space.at(query_key);
  if (k == 0) throw MeasureError("k must be >= 1");
  if (k + 1 > space.size()) {
    throw MeasureError("k = " + std::to_string(k) + " exceeds the " +
                       std::to_string(space.size() - 1) +
                       " other entities in space " + space.model_id());
  }
  std::vector<std::pair<double, const std::string*>> scored;
  scored.reserve(space.size() - 1);
  for (const auto& [key, v] : space.entries()) {
    if (key == query_key) continue;
    scored.emplace_back(cosine(q, v), &key);
  }
  auto better = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return *a.second < *b.second;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<long>(k),
                    scored.end(), better);
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(*scored[i].second);
  return out;
}

StabilityResult entity_stability(const EmbeddingSpace& s1,
                                 const EmbeddingSpace& s2,
                                 std::span<const std::string> queries,
                                 std::size_t k) {
  if (queries.empty()) throw MeasureError("entity stability needs queries");
  StabilityResult out;
  out.per_query.reserve(queries.size());
  for (const auto& q : queries) {
    if (!s1.contains(q) || !s2.contains(q)) {
      throw MeasureError("query entity '" + q + "' is missing from a space");
    }
    auto a = knn(s1, q, k);
    auto b = knn(s2, q, k);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::string> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(common));
    out.per_query.push_back(static_cast<double>(common.size()) /
                            static_cast<double>(k));
  }
  out.mean = pairwise_sum(out.per_query) /
             static_cast<double>(out.per_query.size());
  return out;
}

FidelityResult sample_fidelity(std::span<const double> full,
                               std::span<const Vector> samples) {
  if (samples.empty()) throw MeasureError("sample fidelity needs samples");
  std::vector<double> cosines;
  cosines.reserve(samples.size());
  std::vector<Vector> all;
  all.reserve(samples.size() + 1);
  all.emplace_back(full.begin(), full.end());
  for (const auto& s : samples) {
    cosines.push_back(cosine(full, s));
    all.push_back(s);
  }
  FidelityResult out;
  out.mean_cos = pairwise_sum(cosines) / static_cast<double>(cosines.size());
  out.mcv = mcv_az(all);
  return out;
}

RobustnessResult perturbation_robustness(
    const std::map<std::string, PerturbationGroup>& groups) {
  if (groups.empty()) throw MeasureError("no perturbed columns");
  RobustnessResult out;
  std::vector<double> all;
  for (const auto& [key, group] : groups) {
    if (group.perturbed.empty()) {
      throw MeasureError("column '" + key + "' has no perturbed variant");
    }
    std::vector<double> cos;
    for (const auto& p : group.perturbed) {
      cos.push_back(cosine(group.original, p));
      all.push_back(cos.back());
    }
    out.per_original[key] =
        pairwise_sum(cos) / static_cast<double>(cos.size());
  }
  out.overall_mean = pairwise_sum(all) / static_cast<double>(all.size());
  return out;
}

std::map<ContextSetting, double> context_shift(
    std::span<const double> single,
    const std::map<ContextSetting, Vector>& by_setting) {
  std::map<ContextSetting, double> out;
  out[ContextSetting::kColumnOnly] = 1.0;
  for (const auto& [setting, v] : by_setting) {
    if (setting == ContextSetting::kColumnOnly) continue;
    out[setting] = cosine(single, v);
  }
  return out;
}

}  // namespace observatory
