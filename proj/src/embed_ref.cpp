#include <cstdio>

#include "json.hpp"

#include "observatory/error.hpp"
#include "observatory/parallel.hpp"
#include "observatory/pipeline.hpp"

namespace observatory {

namespace {

using HeaderAlternatives =
    std::map<std::string, std::map<std::string, std::vector<std::string>>>;

std::string ratio_label(double r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", r);
  return buf;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view table_id,
                          std::initializer_list<std::uint64_t> parts) {
  std::string bytes(table_id);
  auto append = [&bytes](std::uint64_t v) {
    for (int k = 0; k < 8; ++k) bytes.push_back(static_cast<char>(v >> (8 * k)));
  };
  append(seed);
  for (auto p : parts) append(p);
  return fnv1a64(std::span(reinterpret_cast<const unsigned char*>(bytes.data()),
                           bytes.size()));
}

Table strip_headers(const Table& t) {
  if (!t.headers()) return t;
  return Table(t.id(), std::nullopt, t.rows());
}

HeaderAlternatives read_perturbations(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path)).get<HeaderAlternatives>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": malformed perturbation map: " +
                     e.what());
  }
}

std::string property_name(const EmbedOptions& opts,
                           const std::map<std::string, PermutationPlan>& plans) {
  switch (opts.variants) {
    case VariantKind::kNone:
      return "plain";
    case VariantKind::kPlans:
      return plans.empty() || plans.begin()->second.axis == Axis::kRow
                 ? "row_order"
                 : "col_order";
    case VariantKind::kSamples:
      return "fidelity";
    case VariantKind::kPerturbation:
      return "perturbation";
    case VariantKind::kContext:
      return "context";
  }
  return "plain";
}

struct TableRecords {
  std::vector<EmbeddingRecord> records;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

// Embeds one table under one property's variants.
class TableEmbedder {
 public:
  TableEmbedder(const EmbedOptions& opts, const Table& table,
                const PermutationPlan* plan,
                const HeaderAlternatives* alternatives)
      : opts_(opts), table_(table), plan_(plan), alternatives_(alternatives) {}

  TableRecords run() {
    switch (opts_.variants) {
      case VariantKind::kNone:
        embed_levels(table_, 0, nullptr);
        break;
      case VariantKind::kPlans:
        for (std::size_t v = 0; v < plan_->permutations.size(); ++v) {
          const auto& perm = plan_->permutations[v];
          embed_levels(apply_permutation(table_, plan_->axis, perm, v), v,
                       &perm);
        }
        break;
      case VariantKind::kSamples:
        embed_samples();
        break;
      case VariantKind::kPerturbation:
        embed_perturbations();
        break;
      case VariantKind::kContext:
        embed_contexts();
        break;
    }
    if (out_.skipped > 0) {
      out_.warnings.push_back("table '" + table_.id() + "': " +
                              std::to_string(out_.skipped) +
                              " targets with no tokens or a zero pooled vector were not embedded");
    }
    return std::move(out_);
  }

 private:
  bool ctx_model() const { return opts_.model == kRefCtxModel; }

  Table view_of(const Table& t) const {
    return opts_.exclude_header ? strip_headers(t) : t;
  }

  Vector cf_column(const Table& t, std::size_t c) const {
    return embed_column_cf(column_values(t, c), t.header(c), opts_.cfg);
  }

  Vector model_column(const Table& t, std::size_t c) const {
    if (!ctx_model()) return cf_column(t, c);
    if (!context_columns(t, c, opts_.ctx_setting)) {
      return embed_column_ctx(t, c, ContextSetting::kColumnOnly, opts_.cfg);
    }
    return embed_column_ctx(t, c, opts_.ctx_setting, opts_.cfg);
  }

  template <class Fn>
  void emit(std::size_t variant, Level level, std::vector<std::size_t> target,
            Fn&& make_vector, std::map<std::string, std::string> meta = {}) {
    Vector v;
    try {
      v = make_vector();
    } catch (const MeasureError&) {
      ++out_.skipped;
      return;
    }
    out_.records.push_back(EmbeddingRecord{opts_.model, table_.id(), variant,
                                           level, std::move(target),
                                           std::move(v), std::move(meta)});
  }

  // `perm` maps variant positions back to original indices on its axis.
  void embed_levels(const Table& variant_table, std::size_t variant,
                    const Permutation* perm) {
    const Table view = view_of(variant_table);
    const bool rows_permuted = perm && plan_->axis == Axis::kRow;
    const bool cols_permuted = perm && plan_->axis == Axis::kColumn;
    auto orig_row = [&](std::size_t i) { return rows_permuted ? (*perm)[i] : i; };
    auto orig_col = [&](std::size_t j) { return cols_permuted ? (*perm)[j] : j; };

    for (Level level : opts_.levels) {
      switch (level) {
        case Level::kTable:
          emit(variant, level, {}, [&] { return embed_table(view, opts_.cfg); });
          break;
        case Level::kColumn:
          for (std::size_t j = 0; j < view.ncols(); ++j) {
            emit(variant, level, {orig_col(j)},
                 [&] { return model_column(view, j); });
          }
          break;
        case Level::kRow:
          for (std::size_t i = 0; i < view.nrows(); ++i) {
            emit(variant, level, {orig_row(i)},
                 [&] { return embed_row(view, i, opts_.cfg); });
          }
          break;
        case Level::kCell:
        case Level::kEntity:
          for (std::size_t i = 0; i < view.nrows(); ++i) {
            for (std::size_t j = 0; j < view.ncols(); ++j) {
              const std::string& text = view.cell(i, j);
              std::map<std::string, std::string> meta;
              if (level == Level::kEntity) {
                if (!is_textual_column(view, j) || is_numeric_cell(text) ||
                    trim_ascii(text).empty()) {
                  continue;
                }
                meta["mention"] = text;
              }
              emit(variant, level, {orig_row(i), orig_col(j)},
                   [&] { return embed_cell(view, i, j, opts_.cfg); },
                   std::move(meta));
            }
          }
          break;
      }
    }
  }

  Vector sample_vector(std::span<const std::string> values,
                       std::optional<std::string_view> header) const {
    if (opts_.chunk_rows == 0) return embed_column_cf(values, header, opts_.cfg);
    return embed_column_chunked(values, header, opts_.chunk_rows, opts_.cfg);
  }

  void embed_samples() {
    const Table view = view_of(table_);
    if (view.nrows() == 0) return;
    const std::size_t per_ratio = opts_.samples_per_ratio;
    for (std::size_t c = 0; c < view.ncols(); ++c) {
      const std::vector<std::string> values = column_values(view, c);
      const auto header = view.header(c);
      const std::size_t before = out_.records.size();
      emit(0, Level::kColumn, {c}, [&] { return sample_vector(values, header); },
           {{"role", "full"}});
      if (out_.records.size() == before) continue;
      for (std::size_t ri = 0; ri < opts_.ratios.size(); ++ri) {
        for (std::size_t s = 0; s < per_ratio; ++s) {
          const std::uint64_t seed =
              derive_seed(opts_.seed, table_.id(), {c, ri, s});
          const auto picked = sample_row_indices(values.size(), opts_.ratios[ri], seed);
          std::vector<std::string> sample;
          sample.reserve(picked.size());
          for (std::size_t i : picked) sample.push_back(values[i]);
          emit(1 + ri * per_ratio + s, Level::kColumn, {c},
               [&] { return sample_vector(sample, header); },
               {{"role", "sample"},
                {"ratio", ratio_label(opts_.ratios[ri])},
                {"sample", std::to_string(s)}});
        }
      }
    }
  }

  void embed_perturbations() {
    if (!table_.headers()) {
      out_.warnings.push_back("table '" + table_.id() +
                              "' has no headers to perturb; skipped");
      return;
    }
    const auto& headers = *table_.headers();
    const std::map<std::string, std::vector<std::string>>* alts = nullptr;
    if (alternatives_ != nullptr) {
      if (auto it = alternatives_->find(table_.id()); it != alternatives_->end()) {
        alts = &it->second;
      }
    }
    const Table abbreviated = perturb_headers(table_, HeaderPerturbation::kAbbreviate);

    for (std::size_t c = 0; c < table_.ncols(); ++c) {
      std::vector<std::pair<Table, std::string>> variants;
      if (alternatives_ != nullptr) {
        if (alts == nullptr) continue;
        auto it = alts->find(std::string(trim_ascii(headers[c])));
        if (it == alts->end()) continue;
        for (const auto& alt : it->second) {
          Table::Row h = headers;
          h[c] = alt;
          variants.emplace_back(Table(table_.id(), h, table_.rows()), "synonym");
        }
      } else if ((*abbreviated.headers())[c] != headers[c]) {
        variants.emplace_back(abbreviated, "abbreviate");
      }
      if (variants.empty()) continue;

      const std::size_t before = out_.records.size();
      emit(0, Level::kColumn, {c}, [&] { return model_column(view_of(table_), c); },
           {{"header", headers[c]}});
      if (out_.records.size() == before) continue;
      for (std::size_t v = 0; v < variants.size(); ++v) {
        const Table& perturbed = variants[v].first;
        emit(v + 1, Level::kColumn, {c},
             [&] { return model_column(view_of(perturbed), c); },
             {{"header", (*perturbed.headers())[c]},
              {"perturbation", variants[v].second}});
      }
    }
  }

  void embed_contexts() {
    const Table view = view_of(table_);
    for (std::size_t c = 0; c < view.ncols(); ++c) {
      const std::string textual = is_textual_column(view, c) ? "true" : "false";
      for (ContextSetting s : kAllContextSettings) {
        if (!context_columns(view, c, s)) continue;
        emit(static_cast<std::size_t>(s), Level::kColumn, {c},
             [&] {
               return ctx_model() ? embed_column_ctx(view, c, s, opts_.cfg)
                                  : cf_column(view, c);
             },
             {{"setting", std::string(to_string(s))}, {"textual", textual}});
      }
    }
  }

  const EmbedOptions& opts_;
  const Table& table_;
  const PermutationPlan* plan_;
  const HeaderAlternatives* alternatives_;
  TableRecords out_;
};

std::string join_levels(const std::vector<Level>& levels) {
  std::string s;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0) s += ',';
    s += to_string(levels[i]);
  }
  return s;
}

std::string join_ratios(const std::vector<double>& ratios) {
  std::string s;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (i > 0) s += ',';
    s += ratio_label(ratios[i]);
  }
  return s;
}

}  // namespace

std::string_view to_string(VariantKind kind) {
  switch (kind) {
    case VariantKind::kNone:
      return "none";
    case VariantKind::kPlans:
      return "plans";
    case VariantKind::kSamples:
      return "samples";
    case VariantKind::kPerturbation:
      return "perturbation";
    case VariantKind::kContext:
      return "context";
  }
  return "none";
}

VariantKind parse_variant_kind(std::string_view text) {
  for (VariantKind k : {VariantKind::kNone, VariantKind::kPlans,
                        VariantKind::kSamples, VariantKind::kPerturbation,
                        VariantKind::kContext}) {
    if (text == to_string(k)) return k;
  }
  throw ValidationError("unknown variant kind '" + std::string(text) + "'");
}

EmbedOutput embed_reference(const Corpus& corpus, const EmbedOptions& opts) {
  opts.cfg.validate();
  if (opts.model != kRefCfModel && opts.model != kRefCtxModel) {
    throw ValidationError("unknown reference model '" + opts.model +
                          "' (expected ref-cf or ref-ctx)");
  }
  if (opts.levels.empty()) throw ValidationError("no embedding level selected");
  const bool column_only = opts.variants == VariantKind::kSamples ||
                           opts.variants == VariantKind::kPerturbation ||
                           opts.variants == VariantKind::kContext;
  if (column_only && (opts.levels.size() != 1 || opts.levels[0] != Level::kColumn)) {
    throw ValidationError(std::string(to_string(opts.variants)) +
                          " variants are embedded at column level only");
  }
  if (opts.variants == VariantKind::kSamples) {
    if (opts.ratios.empty()) throw ValidationError("no sample ratios given");
    for (double r : opts.ratios) {
      if (!(r > 0.0 && r <= 1.0)) {
        throw ValidationError("sample ratio " + ratio_label(r) +
                              " outside (0, 1]");
      }
    }
    if (opts.samples_per_ratio == 0) {
      throw ValidationError("samples per ratio must be >= 1");
    }
  }

  std::map<std::string, PermutationPlan> plans = opts.plans;
  if (opts.variants == VariantKind::kPlans && plans.empty()) {
    if (!opts.plans_dir) {
      throw ValidationError("plans variants need a plan directory");
    }
    plans = read_plans(*opts.plans_dir);
  }
  std::optional<HeaderAlternatives> alternatives;
  if (opts.variants == VariantKind::kPerturbation && opts.perturbations) {
    alternatives = read_perturbations(*opts.perturbations);
  }

  std::vector<const Table*> tables;
  std::vector<const PermutationPlan*> table_plans;
  std::vector<std::string> warnings;
  for (const auto& t : corpus.tables) {
    const PermutationPlan* plan = nullptr;
    if (opts.variants == VariantKind::kPlans) {
      auto it = plans.find(t.id());
      if (it == plans.end()) {
        warnings.push_back("no permutation plan for table '" + t.id() +
                           "'; skipped");
        continue;
      }
      plan = &it->second;
      const std::size_t n = plan->axis == Axis::kRow ? t.nrows() : t.ncols();
      if (plan->permutations.front().size() != n) {
        throw ValidationError("plan for table '" + t.id() +
                              "' does not match its " +
                              std::string(to_string(plan->axis)) + " count");
      }
    }
    tables.push_back(&t);
    table_plans.push_back(plan);
  }

  const auto per_table = parallel_map(tables.size(), opts.threads, [&](std::size_t i) {
    return TableEmbedder(opts, *tables[i], table_plans[i],
                         alternatives ? &*alternatives : nullptr)
        .run();
  });

  EmbedOutput out;
  out.warnings = std::move(warnings);
  for (const auto& tr : per_table) {
    out.records.insert(out.records.end(), tr.records.begin(), tr.records.end());
    out.warnings.insert(out.warnings.end(), tr.warnings.begin(), tr.warnings.end());
  }

  Manifest& m = out.manifest;
  m.property = property_name(opts, plans);
  m.models = {opts.model};
  m.dim = opts.cfg.dim;
  m.corpus = corpus.name;
  m.corpus_dir = corpus.dir;
  m.corpus_hash = corpus.hash;
  m.seed = opts.seed;
  m.generator = opts.model;
  m.params["variants"] = std::string(to_string(opts.variants));
  m.params["levels"] = join_levels(opts.levels);
  m.params["hash_seed"] = std::to_string(opts.cfg.seed);
  m.params["alpha"] = ratio_label(opts.cfg.alpha);
  m.params["token_budget"] = std::to_string(opts.cfg.token_budget);
  m.params["exclude_header"] = opts.exclude_header ? "true" : "false";
  // Dispersion measures include the identity variant 0 in the MCV sample.
  m.params["variant0"] = "identity";
  if (opts.model == kRefCtxModel) {
    m.params["ctx_setting"] = std::string(to_string(opts.ctx_setting));
  }
  if (opts.variants == VariantKind::kPlans && !plans.empty()) {
    m.params["axis"] = std::string(to_string(plans.begin()->second.axis));
    m.params["plan_seed"] = std::to_string(plans.begin()->second.seed);
  }
  if (opts.variants == VariantKind::kSamples) {
    m.params["ratios"] = join_ratios(opts.ratios);
    m.params["samples_per_ratio"] = std::to_string(opts.samples_per_ratio);
    m.params["chunk_rows"] = std::to_string(opts.chunk_rows);
  }
  if (opts.variants == VariantKind::kPerturbation) {
    m.params["perturbation"] = opts.perturbations ? "map" : "abbreviate";
  }
  return out;
}

}  // namespace observatory
