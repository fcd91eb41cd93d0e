#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "observatory/table.hpp"
#include "observatory/variants.hpp"

namespace observatory {

using Vector = std::vector<double>;

// Deterministic feature-hashing embedders. `ref-cf` pools tokens of a column
// in isolation; `ref-ctx` mixes a column with the context columns of one
// setting using weight `alpha`.
struct EmbedderConfig {
  std::size_t dim = 64;
  std::uint64_t seed = 42;
  double alpha = 0.5;
  std::size_t token_budget = 512;

  void validate() const;
};

inline constexpr std::string_view kRefCfModel = "ref-cf";
inline constexpr std::string_view kRefCtxModel = "ref-ctx";

// Lowercased alphanumeric runs. Bytes >= 0x80 count as alphanumeric so
// multibyte UTF-8 text stays inside its token.
std::vector<std::string> tokenize(std::string_view cell);

std::uint64_t fnv1a64(std::span<const unsigned char> bytes);

// Four signed hash probes, L2-normalized.
Vector embed_token(std::string_view token, const EmbedderConfig& cfg);

// L2-normalized mean of the token vectors of `tokens` (first token_budget
// only). Order-free: equal token multisets give bit-identical vectors.
Vector embed_tokens(std::span<const std::string> tokens,
                    const EmbedderConfig& cfg);

Vector embed_column_cf(std::span<const std::string> values,
                       std::optional<std::string_view> header,
                       const EmbedderConfig& cfg);

Vector embed_column_ctx(const Table& t, std::size_t c, ContextSetting setting,
                        const EmbedderConfig& cfg);

Vector embed_row(const Table& t, std::size_t row, const EmbedderConfig& cfg);
Vector embed_cell(const Table& t, std::size_t row, std::size_t col,
                  const EmbedderConfig& cfg);
Vector embed_table(const Table& t, const EmbedderConfig& cfg);
inline Vector embed_entity(const Table& t, std::size_t row, std::size_t col,
                           const EmbedderConfig& cfg) {
  return embed_cell(t, row, col, cfg);
}

// Consecutive chunks of chunk_rows values, each embedded with the shared
// header; the normalized mean of the chunk embeddings.
Vector embed_column_chunked(std::span<const std::string> values,
                            std::optional<std::string_view> header,
                            std::size_t chunk_rows, const EmbedderConfig& cfg);

// In-place L2 normalization; throws MeasureError on a zero vector.
void normalize(Vector& v);

}  // namespace observatory
