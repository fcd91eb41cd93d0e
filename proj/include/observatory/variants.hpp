#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "observatory/table.hpp"

namespace observatory {

enum class Axis { kRow, kColumn };

std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view text);

using Permutation = std::vector<std::size_t>;

// Seeded, deduplicated permutations of one table axis. permutations[0] is
// always the identity, so variant 0 is the unpermuted table.
struct PermutationPlan {
  std::string table_id;
  Axis axis = Axis::kRow;
  std::uint64_t seed = 0;
  std::vector<Permutation> permutations;

  friend bool operator==(const PermutationPlan&,
                         const PermutationPlan&) = default;
};

// All n! permutations in lexicographic order when n! <= budget, otherwise the
// identity followed by budget-1 distinct random non-identity permutations
// (seeded Fisher-Yates, duplicates rejected).
PermutationPlan sample_permutations(std::size_t n, std::size_t budget,
                                    std::uint64_t seed);

// JSON form: {"table_id", "axis", "seed", "perms"}.
std::string plan_to_json(const PermutationPlan& plan);
PermutationPlan plan_from_json(std::string_view text);

bool is_bijection(std::span<const std::size_t> perm, std::size_t n);
Permutation invert_permutation(std::span<const std::size_t> perm);

// Output row/column i is input row/column perm[i]. The result id is the input
// id with a `#row-<variant>` or `#col-<variant>` suffix.
Table apply_permutation(const Table& t, Axis axis,
                        std::span<const std::size_t> perm,
                        std::size_t variant_id = 0);

// Uniform sample without replacement of max(1, floor(ratio * n)) values, kept
// in their original relative order.
std::vector<std::string> sample_rows(std::span<const std::string> values,
                                     double ratio, std::uint64_t seed);

// Same draw as sample_rows, returning the chosen (sorted) indices.
std::vector<std::size_t> sample_row_indices(std::size_t n, double ratio,
                                            std::uint64_t seed);

// Ordinals double as variant ids for context embeddings.
enum class ContextSetting {
  kColumnOnly = 0,
  kSubjectColumn = 1,
  kNeighbors = 2,
  kEntireTable = 3,
};

inline constexpr ContextSetting kAllContextSettings[] = {
    ContextSetting::kColumnOnly, ContextSetting::kSubjectColumn,
    ContextSetting::kNeighbors, ContextSetting::kEntireTable};

std::string_view to_string(ContextSetting setting);
ContextSetting parse_context_setting(std::string_view text);

struct ContextVariant {
  Table table;
  std::vector<std::size_t> source_columns;  // original indices, table order
  std::size_t target_position = 0;          // target column inside `table`
};

// Source columns of one setting for target c, or nullopt when the setting is
// absent (subject setting when the proxy is c itself or no textual column
// exists).
std::optional<std::vector<std::size_t>> context_columns(const Table& t,
                                                        std::size_t c,
                                                        ContextSetting setting);

std::map<ContextSetting, ContextVariant> context_variants(const Table& t,
                                                          std::size_t c);

enum class HeaderPerturbation { kAbbreviate, kSynonymMap };

// Demo schema perturbations. Abbreviation drops vowels after the first
// character of every alphanumeric token ("CountryName" -> "CntryNm");
// synonym mapping replaces headers found in `synonyms`.
Table perturb_headers(const Table& t, HeaderPerturbation mode,
                      const std::map<std::string, std::string>* synonyms =
                          nullptr);

std::string abbreviate_header(std::string_view header);

}  // namespace observatory
