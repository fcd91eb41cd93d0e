#include "observatory/refembed.hpp"

#include <cctype>
#include <cmath>
#include <map>

#include "observatory/error.hpp"

namespace observatory {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;
constexpr std::size_t kProbes = 4;

bool is_token_byte(unsigned char ch) {
  return std::isalnum(ch) != 0 || ch >= 0x80;
}

void append_tokens(std::string_view text, std::vector<std::string>& out) {
  std::string current;
  for (char raw : text) {
    const auto ch = static_cast<unsigned char>(raw);
    if (is_token_byte(ch)) {
      current.push_back(ch < 0x80 ? static_cast<char>(std::tolower(ch)) : raw);
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
}

std::uint64_t probe_hash(std::string_view token, std::size_t probe,
                         std::uint64_t seed) {
  std::uint64_t h = kFnvOffset;
  auto mix = [&h](unsigned char b) {
    h ^= b;
    h *= kFnvPrime;
  };
  for (char ch : token) mix(static_cast<unsigned char>(ch));
  mix(static_cast<unsigned char>(probe));
  for (int k = 0; k < 8; ++k) mix(static_cast<unsigned char>(seed >> (8 * k)));
  return h;
}

Vector mean_of(std::span<const Vector> vectors, std::size_t dim) {
  Vector out(dim, 0.0);
  for (const auto& v : vectors) {
    for (std::size_t i = 0; i < dim; ++i) out[i] += v[i];
  }
  const double n = static_cast<double>(vectors.size());
  for (double& x : out) x /= n;
  return out;
}

}  // namespace

void EmbedderConfig::validate() const {
  if (dim < 2) throw ValidationError("embedding dim must be >= 2");
  if (token_budget < 1) throw ValidationError("token budget must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in [0, 1]");
  }
}

std::vector<std::string> tokenize(std::string_view cell) {
  std::vector<std::string> out;
  append_tokens(cell, out);
  return out;
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= kFnvPrime;
  }
  return h;
}

void normalize(Vector& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (!(sq > 0.0) || !std::isfinite(sq)) {
    throw MeasureError("cannot normalize a zero or non-finite vector");
  }
  const double norm = std::sqrt(sq);
  for (double& x : v) x /= norm;
}

Vector embed_token(std::string_view token, const EmbedderConfig& cfg) {
  cfg.validate();
  if (token.empty()) throw ValidationError("cannot embed an empty token");
  Vector v(cfg.dim, 0.0);
  auto add_probe = [&](std::size_t probe) {
    const std::uint64_t h = probe_hash(token, probe, cfg.seed);
    const double sign = (h % 2 == 0) ? 1.0 : -1.0;
    v[(h / 2) % cfg.dim] += sign;
  };
  for (std::size_t i = 0; i < kProbes; ++i) add_probe(i);
  // Probes can cancel pairwise; keep probing until the vector is nonzero.
  for (std::size_t i = kProbes; i < 256; ++i) {
    bool nonzero = false;
    for (double x : v) nonzero = nonzero || x != 0.0;
    if (nonzero) break;
    add_probe(i);
  }
  normalize(v);
  return v;
}

Vector embed_tokens(std::span<const std::string> tokens,
                    const EmbedderConfig& cfg) {
  cfg.validate();
  const std::size_t used = std::min(tokens.size(), cfg.token_budget);
  if (used == 0) throw MeasureError("no tokens to embed");
  // Accumulate in sorted token order so the result depends only on the
  // token multiset, bit for bit.
  std::map<std::string_view, std::size_t> counts;
  for (std::size_t i = 0; i < used; ++i) ++counts[tokens[i]];
  Vector sum(cfg.dim, 0.0);
  for (const auto& [token, count] : counts) {
    const Vector tv = embed_token(token, cfg);
    const double w = static_cast<double>(count);
    for (std::size_t i = 0; i < cfg.dim; ++i) sum[i] += w * tv[i];
  }
  for (double& x : sum) x /= static_cast<double>(used);
  normalize(sum);
  return sum;
}

Vector embed_column_cf(std::span<const std::string> values,
                       std::optional<std::string_view> header,
                       const EmbedderConfig& cfg) {
  std::vector<std::string> tokens;
  if (header) append_tokens(*header, tokens);
  for (const auto& v : values) append_tokens(v, tokens);
  if (tokens.empty()) throw MeasureError("column has no tokens to embed");
  return embed_tokens(tokens, cfg);
}

Vector embed_column_ctx(const Table& t, std::size_t c, ContextSetting setting,
                        const EmbedderConfig& cfg) {
  cfg.validate();
  const auto cols = context_columns(t, c, setting);
  if (!cols) {
    throw MeasureError("context setting '" + std::string(to_string(setting)) +
                       "' is absent for column " + std::to_string(c) +
                       " of table '" + t.id() + "'");
  }
  auto cf = [&](std::size_t col) {
    return embed_column_cf(column_values(t, col), t.header(col), cfg);
  };
  Vector self = cf(c);
  if (setting == ContextSetting::kColumnOnly) return self;

  std::vector<Vector> context;
  for (std::size_t col : *cols) {
    if (col == c) continue;
    // Token-free context columns carry no signal and are skipped.
    try {
      context.push_back(cf(col));
    } catch (const MeasureError&) {
    }
  }
  if (context.empty()) return self;
  const Vector ctx = mean_of(context, cfg.dim);
  Vector mixed(cfg.dim);
  for (std::size_t i = 0; i < cfg.dim; ++i) {
    mixed[i] = cfg.alpha * self[i] + (1.0 - cfg.alpha) * ctx[i];
  }
  normalize(mixed);
  return mixed;
}

Vector embed_row(const Table& t, std::size_t row, const EmbedderConfig& cfg) {
  if (row >= t.nrows()) {
    throw ValidationError("row " + std::to_string(row) +
                          " out of bounds for table '" + t.id() + "'");
  }
  std::vector<std::string> tokens;
  for (const auto& cell : t.rows()[row]) append_tokens(cell, tokens);
  if (tokens.empty()) throw MeasureError("row has no tokens to embed");
  return embed_tokens(tokens, cfg);
}

Vector embed_cell(const Table& t, std::size_t row, std::size_t col,
                  const EmbedderConfig& cfg) {
  const std::vector<std::string> tokens = tokenize(t.cell(row, col));
  if (tokens.empty()) throw MeasureError("cell has no tokens to embed");
  return embed_tokens(tokens, cfg);
}

Vector embed_table(const Table& t, const EmbedderConfig& cfg) {
  std::vector<std::string> tokens;
  if (t.headers()) {
    for (const auto& h : *t.headers()) append_tokens(h, tokens);
  }
  for (const auto& row : t.rows()) {
    for (const auto& cell : row) append_tokens(cell, tokens);
  }
  if (tokens.empty()) throw MeasureError("table has no tokens to embed");
  return embed_tokens(tokens, cfg);
}

Vector embed_column_chunked(std::span<const std::string> values,
                            std::optional<std::string_view> header,
                            std::size_t chunk_rows, const EmbedderConfig& cfg) {
  if (chunk_rows < 1) throw ValidationError("chunk_rows must be >= 1");
  if (values.empty()) throw MeasureError("cannot embed an empty column");
  std::vector<Vector> chunks;
  for (std::size_t start = 0; start < values.size(); start += chunk_rows) {
    const std::size_t len = std::min(chunk_rows, values.size() - start);
    try {
      chunks.push_back(
          embed_column_cf(values.subspan(start, len), header, cfg));
    } catch (const MeasureError&) {
      // A chunk of empty cells without a header has nothing to contribute.
    }
  }
  if (chunks.empty()) throw MeasureError("column has no tokens to embed");
  if (chunks.size() == 1) return chunks.front();
  Vector out = mean_of(chunks, cfg.dim);
  normalize(out);
  return out;
}

}  // namespace observatory
