#include "observatory/variants.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "json.hpp"

#include "observatory/error.hpp"
#include "observatory/rng.hpp"

namespace observatory {

namespace {

// n! <= budget, computed with an early exit so it never overflows.
bool factorial_within(std::size_t n, std::size_t budget) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    if (f > budget / i) return false;
    f *= i;
  }
  return f <= budget;
}

Permutation identity(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

void fisher_yates(Permutation& p, SeededRng& rng) {
  for (std::size_t i = p.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(p[i - 1], p[j]);
  }
}

bool is_vowel(char ch) {
  switch (std::tolower(static_cast<unsigned char>(ch))) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return true;
    default:
      return false;
  }
}

bool is_token_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) != 0 ||
         static_cast<unsigned char>(ch) >= 0x80;
}

}  // namespace

std::string_view to_string(Axis axis) {
  return axis == Axis::kRow ? "row" : "column";
}

Axis parse_axis(std::string_view text) {
  if (text == "row") return Axis::kRow;
  if (text == "column" || text == "col") return Axis::kColumn;
  throw ValidationError("unknown axis '" + std::string(text) + "'");
}

PermutationPlan sample_permutations(std::size_t n, std::size_t budget,
                                    std::uint64_t seed) {
  if (n == 0) throw ValidationError("cannot permute an empty axis");
  if (budget == 0) throw ValidationError("permutation budget must be >= 1");

  PermutationPlan plan;
  plan.seed = seed;

  if (factorial_within(n, budget)) {
    Permutation p = identity(n);
    do {
      plan.permutations.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return plan;
  }

  const Permutation id = identity(n);
  std::set<Permutation> seen{id};
  plan.permutations.push_back(id);
  SeededRng rng(seed);
  const std::size_t max_attempts = 1000 * budget;
  std::size_t attempts = 0;
  while (plan.permutations.size() < budget) {
    if (++attempts > max_attempts) {
      throw MeasureError("could not draw " + std::to_string(budget) +
                         " distinct permutations of " + std::to_string(n) +
                         " elements");
    }
    Permutation p = id;
    fisher_yates(p, rng);
    if (seen.insert(p).second) plan.permutations.push_back(std::move(p));
  }
  return plan;
}

bool is_bijection(std::span<const std::size_t> perm, std::size_t n) {
  if (perm.size() != n) return false;
  std::vector<bool> hit(n, false);
  for (std::size_t v : perm) {
    if (v >= n || hit[v]) return false;
    hit[v] = true;
  }
  return true;
}

Permutation invert_permutation(std::span<const std::size_t> perm) {
  if (!is_bijection(perm, perm.size())) {
    throw ValidationError("permutation is not a bijection");
  }
  Permutation inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  return inv;
}

Table apply_permutation(const Table& t, Axis axis,
                        std::span<const std::size_t> perm,
                        std::size_t variant_id) {
  const std::size_t n = axis == Axis::kRow ? t.nrows() : t.ncols();
  if (!is_bijection(perm, n)) {
    throw ValidationError("permutation is not a bijection on " +
                          std::to_string(n) + " " +
                          std::string(to_string(axis)) + "s of table '" +
                          t.id() + "'");
  }
  std::string id = t.id() + (axis == Axis::kRow ? "#row-" : "#col-") +
                   std::to_string(variant_id);
  if (axis == Axis::kRow) {
    std::vector<Table::Row> rows;
    rows.reserve(n);
    for (std::size_t i : perm) rows.push_back(t.rows()[i]);
    return Table(std::move(id), t.headers(), std::move(rows));
  }
  return project_columns(t, perm, std::move(id));
}

std::vector<std::size_t> sample_row_indices(std::size_t n, double ratio,
                                            std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw ValidationError("sample ratio must lie in (0, 1]");
  }
  if (n == 0) throw ValidationError("cannot sample an empty column");
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n))));
  Permutation idx = identity(n);
  SeededRng rng(seed);
  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<std::string> sample_rows(std::span<const std::string> values,
                                     double ratio, std::uint64_t seed) {
  std::vector<std::string> out;
  for (std::size_t i : sample_row_indices(values.size(), ratio, seed)) {
    out.push_back(values[i]);
  }
  return out;
}

std::string_view to_string(ContextSetting setting) {
  switch (setting) {
    case ContextSetting::kColumnOnly:
      return "column_only";
    case ContextSetting::kSubjectColumn:
      return "subject_column";
    case ContextSetting::kNeighbors:
      return "neighbors";
    case ContextSetting::kEntireTable:
      return "entire_table";
  }
  return "unknown";
}

ContextSetting parse_context_setting(std::string_view text) {
  for (ContextSetting s : kAllContextSettings) {
    if (text == to_string(s)) return s;
  }
  if (text == "subject") return ContextSetting::kSubjectColumn;
  if (text == "table") return ContextSetting::kEntireTable;
  throw ValidationError("unknown context setting '" + std::string(text) + "'");
}

std::optional<std::vector<std::size_t>> context_columns(
    const Table& t, std::size_t c, ContextSetting setting) {
  if (c >= t.ncols()) {
    throw ValidationError("column " + std::to_string(c) +
                          " out of bounds for table '" + t.id() + "'");
  }
  switch (setting) {
    case ContextSetting::kColumnOnly:
      return std::vector<std::size_t>{c};
    case ContextSetting::kSubjectColumn: {
      const auto proxy = subject_column_proxy(t);
      if (!proxy || *proxy == c) return std::nullopt;
      return std::vector<std::size_t>{std::min(*proxy, c),
                                      std::max(*proxy, c)};
    }
    case ContextSetting::kNeighbors: {
      std::vector<std::size_t> cols;
      if (c > 0) cols.push_back(c - 1);
      cols.push_back(c);
      if (c + 1 < t.ncols()) cols.push_back(c + 1);
      return cols;
    }
    case ContextSetting::kEntireTable: {
      return identity(t.ncols());
    }
  }
  return std::nullopt;
}

std::map<ContextSetting, ContextVariant> context_variants(const Table& t,
                                                          std::size_t c) {
  std::map<ContextSetting, ContextVariant> out;
  for (ContextSetting s : kAllContextSettings) {
    auto cols = context_columns(t, c, s);
    if (!cols) continue;
    const auto pos = static_cast<std::size_t>(
        std::find(cols->begin(), cols->end(), c) - cols->begin());
    Table projected = project_columns(
        t, *cols, t.id() + "#ctx-" + std::string(to_string(s)));
    out.emplace(s, ContextVariant{std::move(projected), std::move(*cols), pos});
  }
  return out;
}

std::string abbreviate_header(std::string_view header) {
  std::string out;
  out.reserve(header.size());
  bool at_token_start = true;
  for (char ch : header) {
    if (!is_token_char(ch)) {
      out.push_back(ch);
      at_token_start = true;
      continue;
    }
    if (at_token_start || !is_vowel(ch)) out.push_back(ch);
    at_token_start = false;
  }
  return out;
}

Table perturb_headers(const Table& t, HeaderPerturbation mode,
                      const std::map<std::string, std::string>* synonyms) {
  if (!t.headers()) {
    throw ValidationError("table '" + t.id() + "' has no headers to perturb");
  }
  if (mode == HeaderPerturbation::kSynonymMap && synonyms == nullptr) {
    throw ValidationError("synonym perturbation requires a synonym map");
  }
  Table::Row headers = *t.headers();
  for (auto& h : headers) {
    if (mode == HeaderPerturbation::kAbbreviate) {
      h = abbreviate_header(h);
    } else if (auto it = synonyms->find(std::string(trim_ascii(h)));
               it != synonyms->end()) {
      h = it->second;
    }
  }
  return Table(t.id() + "#perturbed", std::move(headers), t.rows());
}

std::string plan_to_json(const PermutationPlan& plan) {
  nlohmann::json j;
  j["table_id"] = plan.table_id;
  j["axis"] = std::string(to_string(plan.axis));
  j["seed"] = plan.seed;
  j["perms"] = plan.permutations;
  return j.dump();
}

PermutationPlan plan_from_json(std::string_view text) {
  PermutationPlan plan;
  try {
    const auto j = nlohmann::json::parse(text);
    plan.table_id = j.at("table_id").get<std::string>();
    plan.axis = parse_axis(j.at("axis").get<std::string>());
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.permutations = j.at("perms").get<std::vector<Permutation>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed permutation plan: ") + e.what());
  }
  if (plan.permutations.empty()) {
    throw ValidationError("permutation plan for '" + plan.table_id +
                          "' is empty");
  }
  const std::size_t n = plan.permutations.front().size();
  for (const auto& p : plan.permutations) {
    if (!is_bijection(p, n)) {
      throw ValidationError("permutation plan for '" + plan.table_id +
                            "' contains a non-bijective permutation");
    }
  }
  if (plan.permutations.front() != identity(n)) {
    throw ValidationError("permutation plan for '" + plan.table_id +
                          "' does not start with the identity");
  }
  return plan;
}

}  // namespace observatory
