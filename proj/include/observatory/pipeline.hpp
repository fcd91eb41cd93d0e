#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "observatory/embedding_io.hpp"
#include "observatory/measures.hpp"
#include "observatory/refembed.hpp"
#include "observatory/report.hpp"
#include "observatory/table.hpp"
#include "observatory/variants.hpp"

namespace observatory {

namespace fs = std::filesystem;

// A directory of tables. `*.csv` files carry a header row, `*.headerless.csv`
// do not, `*.jsonl` follow the JSONL row format. Table ids are file stems;
// tables are ordered by id.
struct Corpus {
  std::string name;
  std::string dir;
  std::string hash;  // FNV-1a over file names and contents, hex
  std::vector<Table> tables;

  const Table& table(const std::string& id) const;
};

Corpus load_corpus(const fs::path& dir);
std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view contents);

// ---- permute ----------------------------------------------------------------

struct PermuteOptions {
  Axis axis = Axis::kRow;
  std::size_t budget = 1000;
  std::uint64_t seed = 42;
};

std::vector<PermutationPlan> make_plans(const Corpus& corpus,
                                        const PermuteOptions& opts);
// One `<table_id>.json` per plan.
void write_plans(const std::vector<PermutationPlan>& plans, const fs::path& dir);
std::map<std::string, PermutationPlan> read_plans(const fs::path& dir);

// ---- embed-ref --------------------------------------------------------------

// What the variant ids of an embedding file enumerate.
enum class VariantKind {
  kNone,          // originals only (join, fd, stability)
  kPlans,         // permutation index (row-order, col-order)
  kSamples,       // 0 = full column, then samples per ratio (fidelity)
  kPerturbation,  // 0 = original, then perturbed headers (perturbation)
  kContext,       // context-setting ordinal (context)
};

std::string_view to_string(VariantKind kind);
VariantKind parse_variant_kind(std::string_view text);

struct EmbedOptions {
  std::string model = std::string(kRefCfModel);
  std::vector<Level> levels = {Level::kColumn};
  EmbedderConfig cfg;
  VariantKind variants = VariantKind::kNone;
  // Seed for samples and any generated plans; cfg.seed seeds the hashing.
  std::uint64_t seed = 42;
  // In-memory plans take precedence over plans_dir.
  std::map<std::string, PermutationPlan> plans;
  std::optional<fs::path> plans_dir;
  // Budget for plans generated on the fly by the in-memory route.
  std::size_t permutation_budget = 1000;
  // Context used by ref-ctx column embeddings outside the context property.
  ContextSetting ctx_setting = ContextSetting::kNeighbors;
  bool exclude_header = false;
  std::vector<double> ratios = {0.25, 0.5, 0.75};
  std::size_t samples_per_ratio = 5;
  std::size_t chunk_rows = 0;  // 0 disables chunking
  // JSON {table_id: {header: [alternatives...]}}; abbreviation when absent.
  std::optional<fs::path> perturbations;
  std::size_t threads = 1;
};

struct EmbedOutput {
  std::vector<EmbeddingRecord> records;
  Manifest manifest;
  std::vector<std::string> warnings;
};

EmbedOutput embed_reference(const Corpus& corpus, const EmbedOptions& opts);
void write_embeddings(const EmbedOutput& out, const fs::path& dir);

struct LoadedEmbeddings {
  EmbeddingSet set;
  Manifest manifest;
};

LoadedEmbeddings load_embeddings(const fs::path& dir);

// ---- measure ----------------------------------------------------------------

struct MeasureOptions {
  Property property = Property::kRowOrder;
  std::optional<std::string> model;
  std::optional<fs::path> corpus_dir;  // defaults to the manifest's corpus_dir
  OverlapKind overlap = OverlapKind::kContainment;
  std::optional<fs::path> pairs_file;  // join pairs CSV
  std::optional<fs::path> fds_file;    // FD list CSV
  std::vector<double> ratios;          // empty = every ratio present
  std::size_t k = 10;
  std::size_t queries = 0;  // 0 = every shared entity
  Norm norm = Norm::kL2;
  std::uint64_t seed = 42;
  std::size_t threads = 1;
};

// Computes one property over loaded embeddings. `second` is the other
// embedding space for stability and ignored otherwise. Per-item failures
// become warnings; a run with no successful item throws MeasureError.
MeasureReport run_property(const LoadedEmbeddings& emb,
                           const LoadedEmbeddings* second,
                           const MeasureOptions& opts);

// Reference-embedder route: generates the embeddings in memory, then measures.
// Permutation properties generate plans from `embed.seed` and
// `embed.permutation_budget` when none are given; stability compares the
// configured hash seed against hash seed + 1.
MeasureReport run_property(const Corpus& corpus, const EmbedOptions& embed,
                           const MeasureOptions& opts);

// Variant kind and embedding level a property consumes.
VariantKind variant_kind_for(Property p);
Level level_for(Property p);

}  // namespace observatory
