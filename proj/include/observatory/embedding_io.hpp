#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "observatory/error.hpp"

namespace observatory {

using Vector = std::vector<double>;

enum class Level { kTable, kColumn, kRow, kCell, kEntity };

std::string_view to_string(Level level);
Level parse_level(std::string_view text);
// Number of indices in a target tuple: table 0, column/row 1, cell/entity 2.
std::size_t target_arity(Level level);

struct EmbeddingRecord {
  std::string model_id;
  std::string table_id;
  std::size_t variant_id = 0;
  Level level = Level::kColumn;
  std::vector<std::size_t> target;
  Vector vector;
  std::map<std::string, std::string> meta;

  std::size_t dim() const { return vector.size(); }
};

// Identity of one embedded object across variants.
struct SeriesKey {
  std::string model_id;
  std::string table_id;
  Level level = Level::kColumn;
  std::vector<std::size_t> target;

  friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
  friend bool operator==(const SeriesKey&, const SeriesKey&) = default;

  std::string to_string() const;
};

SeriesKey series_key(const EmbeddingRecord& r);

class EmbeddingFormatError : public ValidationError {
 public:
  enum class Kind { kMalformed, kDimMismatch, kNonFinite, kDuplicate };

  EmbeddingFormatError(Kind kind, const std::string& what)
      : ValidationError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Series {
  std::vector<std::size_t> variant_ids;  // ascending
  std::vector<Vector> vectors;
  std::vector<std::string> warnings;  // e.g. gaps in the variant numbering
};

// Validated, indexed collection of records sharing one dimensionality.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;

  // Throws EmbeddingFormatError on dim mismatch, non-finite entries, target
  // arity mismatch, or a duplicate (model, table, variant, level, target).
  void add(EmbeddingRecord record);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<EmbeddingRecord>& records() const { return records_; }

  std::vector<SeriesKey> keys() const;
  bool contains(const SeriesKey& key) const;
  const EmbeddingRecord* find(const SeriesKey& key,
                              std::size_t variant_id) const;

  // Vectors of one key ordered by variant id. Throws ValidationError when the
  // key is missing; gaps in the numbering are reported in `warnings`.
  Series series(const SeriesKey& key) const;

 private:
  std::size_t dim_ = 0;
  std::vector<EmbeddingRecord> records_;
  std::map<SeriesKey, std::map<std::size_t, std::size_t>> index_;
};

inline Series series(const EmbeddingSet& set, const SeriesKey& key) {
  return set.series(key);
}

// One JSONL line, vector entries printed with 17 significant digits.
std::string record_to_json_line(const EmbeddingRecord& r);
EmbeddingRecord record_from_json_line(std::string_view line,
                                      std::size_t line_no);

std::size_t write_records(std::span<const EmbeddingRecord> records,
                          std::ostream& sink);
EmbeddingSet read_records(std::istream& source);

// Entity-level lookup space for nearest-neighbor queries. Vectors are stored
// unit-normalized.
class EmbeddingSpace {
 public:
  explicit EmbeddingSpace(std::string model_id) : model_id_(std::move(model_id)) {}

  void insert(std::string key, Vector v);

  const std::string& model_id() const { return model_id_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(const std::string& key) const { return entries_.count(key) > 0; }
  const Vector& at(const std::string& key) const;
  const std::map<std::string, Vector>& entries() const { return entries_; }

 private:
  std::string model_id_;
  std::size_t dim_ = 0;
  std::map<std::string, Vector> entries_;
};

// Entity key of a record: meta["entity"] when present, otherwise
// "<table>/<row>/<col>".
std::string entity_key(const EmbeddingRecord& r);

// Variant-0 entity records of one model.
EmbeddingSpace build_space(const EmbeddingSet& set, const std::string& model_id);

// Self-description written next to every embedding file.
struct Manifest {
  std::string property;
  std::vector<std::string> models;
  std::size_t dim = 0;
  std::string corpus;
  std::string corpus_dir;
  std::string corpus_hash;
  std::uint64_t seed = 42;
  std::string generator;
  std::map<std::string, std::string> params;

  std::string to_json() const;
  static Manifest from_json(std::string_view text);
};

inline constexpr std::string_view kEmbeddingsFile = "embeddings.jsonl";
inline constexpr std::string_view kManifestFile = "manifest.json";

}  // namespace observatory
