#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>

#include "observatory/error.hpp"
#include "observatory/fd.hpp"
#include "observatory/parallel.hpp"
#include "observatory/pipeline.hpp"
#include "observatory/rng.hpp"

namespace observatory {

namespace {

struct ItemOutcome {
  std::optional<ItemRecord> item;
  std::vector<std::string> warnings;
};

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

std::string target_label(const std::vector<std::size_t>& target) {
  std::string s;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(target[i]);
  }
  return s;
}

std::map<std::string, std::string> key_labels(const SeriesKey& k) {
  return {{"table", k.table_id},
          {"level", std::string(to_string(k.level))},
          {"target", target_label(k.target)}};
}

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

std::set<std::string> models_in(const EmbeddingSet& set) {
  std::set<std::string> models;
  for (const auto& r : set.records()) models.insert(r.model_id);
  return models;
}

std::string select_model(const EmbeddingSet& set,
                         const std::optional<std::string>& wanted) {
  const auto models = models_in(set);
  if (wanted) {
    if (!models.count(*wanted)) {
      throw ValidationError("model '" + *wanted + "' not in embedding file");
    }
    return *wanted;
  }
  if (models.size() != 1) {
    throw ValidationError("embedding file holds " +
                          std::to_string(models.size()) +
                          " models; select one with --model");
  }
  return *models.begin();
}

std::vector<SeriesKey> keys_of(const EmbeddingSet& set, const std::string& model,
                               std::optional<Level> level) {
  std::vector<SeriesKey> keys;
  for (auto& k : set.keys()) {
    if (k.model_id == model && (!level || k.level == *level)) keys.push_back(k);
  }
  return keys;
}

// Runs `fn` for each index on the pool and merges in index order. Item
// failures become warnings prefixed with `name(i)`.
template <class Name, class Fn>
void collect(MeasureReport& report, std::size_t n, std::size_t threads,
             Name&& name, Fn&& fn) {
  auto outcomes = parallel_map(n, threads, [&](std::size_t i) -> ItemOutcome {
    try {
      return fn(i);
    } catch (const ValidationError& e) {
      return ItemOutcome{std::nullopt, {name(i) + ": " + e.what()}};
    } catch (const MeasureError& e) {
      return ItemOutcome{std::nullopt, {name(i) + ": " + e.what()}};
    }
  });
  for (auto& o : outcomes) {
    if (o.item) report.per_item.push_back(std::move(*o.item));
    report.warnings.insert(report.warnings.end(), o.warnings.begin(),
                           o.warnings.end());
  }
}

// ---- row-order / col-order -------------------------------------------------

void measure_order(const EmbeddingSet& set, const std::string& model,
                   const MeasureOptions& opts, MeasureReport& report) {
  const auto keys = keys_of(set, model, std::nullopt);
  collect(report, keys.size(), opts.threads,
          [&](std::size_t i) { return keys[i].to_string(); },
          [&](std::size_t i) {
    ItemOutcome out;
    Series s = set.series(keys[i]);
    for (auto& w : s.warnings) out.warnings.push_back(keys[i].to_string() + ": " + w);
    if (s.vectors.size() < 2) {
      out.warnings.push_back(keys[i].to_string() +
                             ": fewer than 2 variants; skipped");
      return out;
    }
    const DispersionResult d = cosine_dispersion(s.vectors);
    ItemRecord item{keys[i].to_string(), key_labels(keys[i]), {}};
    item.labels["variants"] = std::to_string(d.n);
    item.values["mcv"] = d.mcv;
    item.values["cos_min"] = d.summary.min;
    item.values["cos_mean"] = d.summary.mean;
    item.values["cos_max"] = d.summary.max;
    out.item = std::move(item);
    return out;
  });
  if (report.per_item.empty()) return;
  double mcv_max = 0.0, cos_min = 1.0;
  std::vector<double> mcvs;
  for (const auto& item : report.per_item) {
    mcvs.push_back(item.values.at("mcv"));
    mcv_max = std::max(mcv_max, item.values.at("mcv"));
    cos_min = std::min(cos_min, item.values.at("cos_min"));
  }
  report.scalars["mcv_mean"] = mean_of(mcvs);
  report.scalars["mcv_max"] = mcv_max;
  report.scalars["cos_min"] = cos_min;
}

// ---- join ------------------------------------------------------------------

struct ColumnPair {
  ColumnRef query;
  ColumnRef candidate;
};

std::vector<ColumnPair> read_pairs_csv(const fs::path& path) {
  const Table t = parse_table(read_file(path), TableFormat::kCsvWithHeader, "pairs");
  const auto& h = *t.headers();
  const std::vector<std::string> expected = {"query_table", "query_col",
                                             "candidate_table", "candidate_col"};
  if (h.size() != 4 || !std::equal(h.begin(), h.end(), expected.begin())) {
    throw ParseError(path.string() +
                     ": expected header query_table,query_col,candidate_table,candidate_col");
  }
  std::vector<ColumnPair> pairs;
  for (std::size_t r = 0; r < t.nrows(); ++r) {
    try {
      pairs.push_back({{t.cell(r, 0), std::stoul(t.cell(r, 1))},
                       {t.cell(r, 2), std::stoul(t.cell(r, 3))}});
    } catch (const std::logic_error&) {
      throw ParseError(path.string() + ": bad column index at row " +
                       std::to_string(r + 1));
    }
  }
  return pairs;
}

std::vector<ColumnPair> default_pairs(const Corpus& corpus) {
  std::vector<ColumnPair> pairs;
  for (const auto& qt : corpus.tables) {
    for (std::size_t qc = 0; qc < qt.ncols(); ++qc) {
      const auto qv = column_values(qt, qc);
      for (const auto& ct : corpus.tables) {
        if (ct.id() == qt.id()) continue;
        for (std::size_t cc = 0; cc < ct.ncols(); ++cc) {
          const auto cv = column_values(ct, cc);
          try {
            if (jaccard(qv, cv) > 0.0) {
              pairs.push_back({{qt.id(), qc}, {ct.id(), cc}});
            }
          } catch (const MeasureError&) {
          }
        }
      }
    }
  }
  return pairs;
}

const Vector& column_vector(const EmbeddingSet& set, const std::string& model,
                            const ColumnRef& ref) {
  const SeriesKey key{model, ref.table_id, Level::kColumn, {ref.col_index}};
  const EmbeddingRecord* r = set.find(key, 0);
  if (r == nullptr) throw MeasureError("no embedding for " + key.to_string());
  return r->vector;
}

void measure_join(const EmbeddingSet& set, const std::string& model,
                  const Corpus& corpus, const MeasureOptions& opts,
                  MeasureReport& report) {
  const auto pairs =
      opts.pairs_file ? read_pairs_csv(*opts.pairs_file) : default_pairs(corpus);
  if (opts.pairs_file) {
    report.params["pairs"] = opts.pairs_file->filename().string();
  } else {
    report.params["pairs"] = "all-overlapping";
  }
  std::vector<std::optional<OverlapPair>> computed(pairs.size());
  collect(report, pairs.size(), opts.threads,
          [&](std::size_t i) {
            return pairs[i].query.table_id + "/" +
                   std::to_string(pairs[i].query.col_index) + "~" +
                   pairs[i].candidate.table_id + "/" +
                   std::to_string(pairs[i].candidate.col_index);
          },
          [&](std::size_t i) {
    ItemOutcome out;
    const auto& p = pairs[i];
    const Table& qt = corpus.table(p.query.table_id);
    const Table& ct = corpus.table(p.candidate.table_id);
    if (p.query.col_index >= qt.ncols() || p.candidate.col_index >= ct.ncols()) {
      throw ValidationError("join pair column out of range");
    }
    const OverlapPair op = make_overlap_pair(
        p.query, column_values(qt, p.query.col_index), p.candidate,
        column_values(ct, p.candidate.col_index),
        column_vector(set, model, p.query), column_vector(set, model, p.candidate));
    computed[i] = op;
    ItemRecord item;
    item.key = p.query.table_id + "/" + std::to_string(p.query.col_index) +
               "~" + p.candidate.table_id + "/" +
               std::to_string(p.candidate.col_index);
    item.labels = {{"query", p.query.table_id + "/" + std::to_string(p.query.col_index)},
                   {"candidate", p.candidate.table_id + "/" +
                                     std::to_string(p.candidate.col_index)}};
    item.values = {{"containment", op.r_containment},
                   {"jaccard", op.r_jaccard},
                   {"multiset-jaccard", op.r_multiset_jaccard},
                   {"cosine", op.m_cosine}};
    out.item = std::move(item);
    return out;
  });
  std::vector<OverlapPair> ok;
  for (auto& c : computed) {
    if (c) ok.push_back(*c);
  }
  if (ok.size() < 2) {
    throw MeasureError("join needs at least 2 measurable column pairs, got " +
                       std::to_string(ok.size()));
  }
  const JoinCorrelation main = join_correlation(ok, opts.overlap);
  report.scalars["rho"] = main.rho;
  report.scalars["pairs"] = static_cast<double>(main.n);
  if (main.ties) {
    report.warnings.push_back("ties present; average ranks used");
  }
  for (OverlapKind kind : {OverlapKind::kContainment, OverlapKind::kJaccard,
                           OverlapKind::kMultisetJaccard}) {
    try {
      report.scalars["rho_" + std::string(to_string(kind))] =
          join_correlation(ok, kind).rho;
    } catch (const MeasureError& e) {
      report.warnings.push_back(std::string(to_string(kind)) + ": " + e.what());
    }
  }
}

// ---- fd --------------------------------------------------------------------

std::vector<FdGroupEmbeddings> group_embeddings(const EmbeddingSet& set,
                                                const std::string& model,
                                                const FdGroupSet& gs,
                                                std::size_t& missing) {
  std::vector<FdGroupEmbeddings> out;
  for (const auto& [value, rows] : gs.groups) {
    FdGroupEmbeddings g;
    for (std::size_t r : rows) {
      const auto* ex = set.find({model, gs.fd.table_id, Level::kCell, {r, gs.fd.x_col}}, 0);
      const auto* ey = set.find({model, gs.fd.table_id, Level::kCell, {r, gs.fd.y_col}}, 0);
      if (ex == nullptr || ey == nullptr) {
        ++missing;
        continue;
      }
      g.emplace_back(ex->vector, ey->vector);
    }
    out.push_back(std::move(g));
  }
  return out;
}

bool has_repeated_value(const Table& t, std::size_t col) {
  std::set<std::string_view> seen;
  for (std::size_t r = 0; r < t.nrows(); ++r) {
    if (!seen.insert(trim_ascii(t.cell(r, col))).second) return true;
  }
  return false;
}

std::string fd_key(const FdInstance& fd) {
  return fd.table_id + ":" + std::to_string(fd.x_col) + "->" +
         std::to_string(fd.y_col);
}

void measure_fd(const EmbeddingSet& set, const std::string& model,
                const Corpus& corpus, const MeasureOptions& opts,
                MeasureReport& report) {
  struct Task {
    FdInstance fd;
    bool holds;
  };
  std::vector<Task> tasks;
  std::vector<std::string> warnings;
  if (opts.fds_file) {
    std::ifstream in(*opts.fds_file);
    if (!in) throw ValidationError("cannot read " + opts.fds_file->string());
    for (const auto& e : read_fd_csv(in)) tasks.push_back({e.fd, e.holds});
    report.params["fds"] = opts.fds_file->filename().string();
  } else {
    report.params["fds"] = "discovered";
    for (const auto& t : corpus.tables) {
      const auto fds = discover_unary_fds(t);
      std::size_t keyed = 0;
      for (const auto& fd : fds) {
        if (has_repeated_value(t, fd.x_col)) {
          tasks.push_back({fd, true});
        } else {
          ++keyed;
        }
      }
      if (keyed > 0) {
        warnings.push_back("table '" + t.id() + "': " + std::to_string(keyed) +
                           " FDs with a key determinant have no group of two "
                           "tuples; skipped");
      }
      try {
        for (auto [x, y] : sample_non_fd_pairs(
                 t, std::max<std::size_t>(1, fds.size()), opts.seed)) {
          tasks.push_back({{t.id(), x, y}, false});
        }
      } catch (const MeasureError& e) {
        warnings.push_back("table '" + t.id() + "': " + e.what());
      }
    }
  }
  report.warnings.insert(report.warnings.end(), warnings.begin(), warnings.end());

  collect(report, tasks.size(), opts.threads,
          [&](std::size_t i) { return fd_key(tasks[i].fd); },
          [&](std::size_t i) {
    ItemOutcome out;
    const Task& task = tasks[i];
    const Table& t = corpus.table(task.fd.table_id);
    if (task.fd.x_col >= t.ncols() || task.fd.y_col >= t.ncols()) {
      throw ValidationError(fd_key(task.fd) + ": column out of range");
    }
    const FdGroupSet gs = task.holds
                              ? fd_groups(t, task.fd)
                              : group_by_determinant(t, task.fd.x_col, task.fd.y_col);
    std::size_t missing = 0;
    const auto groups = group_embeddings(set, model, gs, missing);
    if (missing > 0) {
      out.warnings.push_back(fd_key(task.fd) + ": " + std::to_string(missing) +
                             " tuples without cell embeddings dropped");
    }
    const FdVarianceResult v = fd_group_variance(groups, opts.norm);
    const std::string kind = task.holds ? "fd" : "nonfd";
    ItemRecord item{fd_key(task.fd),
                    {{"table", task.fd.table_id},
                     {"x_col", std::to_string(task.fd.x_col)},
                     {"y_col", std::to_string(task.fd.y_col)},
                     {"kind", kind}},
                    {{"sbar2_" + kind, v.sbar2}}};
    item.labels["groups_used"] = std::to_string(v.groups_used);
    item.labels["groups_skipped"] = std::to_string(v.groups_skipped);
    out.item = std::move(item);
    return out;
  });

  for (const std::string name : {"sbar2_fd", "sbar2_nonfd"}) {
    std::vector<double> xs;
    for (const auto& item : report.per_item) {
      if (auto it = item.values.find(name); it != item.values.end()) {
        xs.push_back(it->second);
      }
    }
    if (!xs.empty()) report.scalars[name + "_mean"] = mean_of(xs);
  }
}

// ---- fidelity --------------------------------------------------------------

void measure_fidelity(const EmbeddingSet& set, const std::string& model,
                      const MeasureOptions& opts, MeasureReport& report) {
  const auto keys = keys_of(set, model, Level::kColumn);
  std::set<std::string> wanted;
  for (double r : opts.ratios) wanted.insert(fmt_g(r));
  if (!opts.ratios.empty()) {
    std::string s;
    for (double r : opts.ratios) s += (s.empty() ? "" : ",") + fmt_g(r);
    report.params["ratios"] = s;
  }

  collect(report, keys.size(), opts.threads,
          [&](std::size_t i) { return keys[i].to_string(); },
          [&](std::size_t i) {
    ItemOutcome out;
    const EmbeddingRecord* full = set.find(keys[i], 0);
    if (full == nullptr) {
      out.warnings.push_back(keys[i].to_string() + ": no full-column embedding");
      return out;
    }
    std::map<std::string, std::vector<Vector>> by_ratio;
    for (const auto& r : set.records()) {
      if (r.variant_id == 0 || series_key(r) != keys[i]) continue;
      auto it = r.meta.find("ratio");
      if (it == r.meta.end()) continue;
      if (!wanted.empty() && !wanted.count(it->second)) continue;
      by_ratio[it->second].push_back(r.vector);
    }
    if (by_ratio.empty()) {
      out.warnings.push_back(keys[i].to_string() + ": no samples");
      return out;
    }
    ItemRecord item{keys[i].to_string(), key_labels(keys[i]), {}};
    for (const auto& [ratio, samples] : by_ratio) {
      const FidelityResult f = sample_fidelity(full->vector, samples);
      item.values["mean_cos@" + ratio] = f.mean_cos;
      item.values["mcv@" + ratio] = f.mcv;
    }
    out.item = std::move(item);
    return out;
  });
  for (const auto& name : report.metric_names()) {
    std::vector<double> xs;
    for (const auto& item : report.per_item) {
      if (auto it = item.values.find(name); it != item.values.end()) {
        xs.push_back(it->second);
      }
    }
    report.scalars[name] = mean_of(xs);
  }
}

// ---- stability -------------------------------------------------------------

void measure_stability(const EmbeddingSet& s1, const std::string& m1,
                       const EmbeddingSet& s2, const std::string& m2,
                       const MeasureOptions& opts, MeasureReport& report) {
  const EmbeddingSpace a = build_space(s1, m1);
  const EmbeddingSpace b = build_space(s2, m2);
  std::vector<std::string> shared;
  for (const auto& [key, _] : a.entries()) {
    if (b.contains(key)) shared.push_back(key);
  }
  if (shared.size() < a.size() || shared.size() < b.size()) {
    report.warnings.push_back(std::to_string(a.size() - shared.size()) + " + " +
                              std::to_string(b.size() - shared.size()) +
                              " entities present in only one space");
  }
  if (shared.empty()) throw MeasureError("the two spaces share no entity");
  if (opts.k + 1 > a.size() || opts.k + 1 > b.size()) {
    throw MeasureError("k = " + std::to_string(opts.k) +
                       " exceeds the entity population minus one");
  }
  std::vector<std::string> queries = shared;
  if (opts.queries > 0 && opts.queries < shared.size()) {
    SeededRng rng(opts.seed);
    for (std::size_t i = 0; i < opts.queries; ++i) {
      std::swap(queries[i], queries[i + rng.below(queries.size() - i)]);
    }
    queries.resize(opts.queries);
    std::sort(queries.begin(), queries.end());
  }
  report.params["model2"] = m2;

  collect(report, queries.size(), opts.threads,
          [&](std::size_t i) { return queries[i]; },
          [&](std::size_t i) {
    ItemOutcome out;
    const std::span<const std::string> q(&queries[i], 1);
    const StabilityResult r = entity_stability(a, b, q, opts.k);
    out.item = ItemRecord{queries[i], {}, {{"overlap", r.per_query.at(0)}}};
    return out;
  });
  std::vector<double> xs;
  for (const auto& item : report.per_item) xs.push_back(item.values.at("overlap"));
  if (!xs.empty()) report.scalars["mean_stability"] = mean_of(xs);
}

// ---- perturbation ----------------------------------------------------------

void measure_perturbation(const EmbeddingSet& set, const std::string& model,
                          const MeasureOptions& opts, MeasureReport& report) {
  const auto keys = keys_of(set, model, Level::kColumn);
  std::vector<std::optional<PerturbationGroup>> groups(keys.size());
  collect(report, keys.size(), opts.threads,
          [&](std::size_t i) { return keys[i].to_string(); },
          [&](std::size_t i) {
    ItemOutcome out;
    Series s = set.series(keys[i]);
    if (s.variant_ids.empty() || s.variant_ids.front() != 0 || s.vectors.size() < 2) {
      out.warnings.push_back(keys[i].to_string() +
                             ": needs the original and >= 1 perturbed variant");
      return out;
    }
    PerturbationGroup g{s.vectors.front(),
                        std::vector<Vector>(s.vectors.begin() + 1, s.vectors.end())};
    std::map<std::string, PerturbationGroup> one{{keys[i].to_string(), g}};
    const RobustnessResult r = perturbation_robustness(one);
    ItemRecord item{keys[i].to_string(), key_labels(keys[i]),
                    {{"mean_cos", r.overall_mean}}};
    item.labels["perturbed"] = std::to_string(g.perturbed.size());
    if (const auto* orig = set.find(keys[i], 0)) {
      if (auto it = orig->meta.find("header"); it != orig->meta.end()) {
        item.labels["header"] = it->second;
      }
    }
    groups[i] = std::move(g);
    out.item = std::move(item);
    return out;
  });
  std::map<std::string, PerturbationGroup> all;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (groups[i]) all.emplace(keys[i].to_string(), std::move(*groups[i]));
  }
  if (!all.empty()) {
    report.scalars["overall_mean"] = perturbation_robustness(all).overall_mean;
  }
}

// ---- context ---------------------------------------------------------------

void measure_context(const EmbeddingSet& set, const std::string& model,
                     const MeasureOptions& opts, MeasureReport& report) {
  const auto keys = keys_of(set, model, Level::kColumn);
  collect(report, keys.size(), opts.threads,
          [&](std::size_t i) { return keys[i].to_string(); },
          [&](std::size_t i) {
    ItemOutcome out;
    const EmbeddingRecord* single = set.find(keys[i], 0);
    if (single == nullptr) {
      out.warnings.push_back(keys[i].to_string() + ": no column-only embedding");
      return out;
    }
    std::map<ContextSetting, Vector> by_setting;
    for (ContextSetting s : kAllContextSettings) {
      if (s == ContextSetting::kColumnOnly) continue;
      if (const auto* r = set.find(keys[i], static_cast<std::size_t>(s))) {
        by_setting.emplace(s, r->vector);
      }
    }
    const auto shift = context_shift(single->vector, by_setting);
    std::string textual = "unknown";
    if (auto it = single->meta.find("textual"); it != single->meta.end()) {
      textual = it->second == "true" ? "textual" : "non_textual";
    }
    ItemRecord item{keys[i].to_string(), key_labels(keys[i]), {}};
    item.labels["textual"] = textual;
    for (const auto& [s, cos] : shift) {
      const std::string name(to_string(s));
      item.values[name] = cos;
      item.values[name + "/" + textual] = cos;
    }
    out.item = std::move(item);
    return out;
  });
  for (ContextSetting s : kAllContextSettings) {
    const std::string name(to_string(s));
    std::vector<double> xs;
    for (const auto& item : report.per_item) {
      if (auto it = item.values.find(name); it != item.values.end()) {
        xs.push_back(it->second);
      }
    }
    if (!xs.empty()) report.scalars[name + "_mean"] = mean_of(xs);
  }
}

bool needs_corpus(Property p) {
  return p == Property::kJoin || p == Property::kFd;
}

MeasureReport run_impl(const LoadedEmbeddings& emb,
                       const LoadedEmbeddings* second, const Corpus* corpus,
                       const MeasureOptions& opts) {
  MeasureReport report;
  report.property = opts.property;
  report.model_id = select_model(emb.set, opts.model);
  report.corpus = emb.manifest.corpus;
  report.params["seed"] = std::to_string(opts.seed);
  report.params["k"] = std::to_string(opts.k);
  report.params["norm"] = std::string(to_string(opts.norm));
  report.params["overlap"] = std::string(to_string(opts.overlap));
  report.params["queries"] = std::to_string(opts.queries);
  report.params["corpus_hash"] = emb.manifest.corpus_hash;
  report.params["emb.seed"] = std::to_string(emb.manifest.seed);
  report.params["emb.dim"] = std::to_string(emb.set.dim());
  for (const auto& [k, v] : emb.manifest.params) report.params["emb." + k] = v;

  switch (opts.property) {
    case Property::kRowOrder:
    case Property::kColOrder:
      measure_order(emb.set, report.model_id, opts, report);
      break;
    case Property::kJoin:
      measure_join(emb.set, report.model_id, *corpus, opts, report);
      break;
    case Property::kFd:
      measure_fd(emb.set, report.model_id, *corpus, opts, report);
      break;
    case Property::kFidelity:
      measure_fidelity(emb.set, report.model_id, opts, report);
      break;
    case Property::kStability: {
      if (second == nullptr) {
        throw ValidationError("stability needs a second embedding file (--emb2)");
      }
      const auto models2 = models_in(second->set);
      std::string m2;
      if (models2.size() == 1) {
        m2 = *models2.begin();
      } else if (models2.count(report.model_id)) {
        m2 = report.model_id;
      } else {
        throw ValidationError("cannot pick a model from the second embedding file");
      }
      measure_stability(emb.set, report.model_id, second->set, m2, opts, report);
      break;
    }
    case Property::kPerturbation:
      measure_perturbation(emb.set, report.model_id, opts, report);
      break;
    case Property::kContext:
      measure_context(emb.set, report.model_id, opts, report);
      break;
  }
  if (report.per_item.empty()) {
    std::string msg = "no item could be measured for " +
                      std::string(to_string(opts.property));
    if (!report.warnings.empty()) msg += ": " + report.warnings.front();
    throw MeasureError(msg);
  }
  report.recompute_summary();
  return report;
}

}  // namespace

VariantKind variant_kind_for(Property p) {
  switch (p) {
    case Property::kRowOrder:
    case Property::kColOrder:
      return VariantKind::kPlans;
    case Property::kFidelity:
      return VariantKind::kSamples;
    case Property::kPerturbation:
      return VariantKind::kPerturbation;
    case Property::kContext:
      return VariantKind::kContext;
    case Property::kJoin:
    case Property::kFd:
    case Property::kStability:
      return VariantKind::kNone;
  }
  return VariantKind::kNone;
}

Level level_for(Property p) {
  switch (p) {
    case Property::kFd:
      return Level::kCell;
    case Property::kStability:
      return Level::kEntity;
    default:
      return Level::kColumn;
  }
}

MeasureReport run_property(const LoadedEmbeddings& emb,
                           const LoadedEmbeddings* second,
                           const MeasureOptions& opts) {
  std::optional<Corpus> corpus;
  if (needs_corpus(opts.property)) {
    fs::path dir;
    if (opts.corpus_dir) {
      dir = *opts.corpus_dir;
    } else if (!emb.manifest.corpus_dir.empty()) {
      dir = emb.manifest.corpus_dir;
    } else {
      throw ValidationError(std::string(to_string(opts.property)) +
                            " needs the corpus (--corpus)");
    }
    corpus = load_corpus(dir);
    if (!emb.manifest.corpus_hash.empty() &&
        corpus->hash != emb.manifest.corpus_hash) {
      throw ValidationError("corpus " + dir.string() +
                            " does not match the embedded corpus hash");
    }
  }
  return run_impl(emb, second, corpus ? &*corpus : nullptr, opts);
}

MeasureReport run_property(const Corpus& corpus, const EmbedOptions& embed,
                           const MeasureOptions& opts) {
  EmbedOptions e = embed;
  e.variants = variant_kind_for(opts.property);
  if (e.variants != VariantKind::kPlans) e.levels = {level_for(opts.property)};
  if (e.variants == VariantKind::kPlans && e.plans.empty() && !e.plans_dir) {
    PermuteOptions p;
    p.axis = opts.property == Property::kRowOrder ? Axis::kRow : Axis::kColumn;
    p.budget = e.permutation_budget;
    p.seed = e.seed;
    for (auto& plan : make_plans(corpus, p)) {
      std::string id = plan.table_id;
      e.plans.emplace(std::move(id), std::move(plan));
    }
  }
  auto load = [&](const EmbedOptions& o) {
    EmbedOutput out = embed_reference(corpus, o);
    LoadedEmbeddings loaded;
    for (auto& r : out.records) loaded.set.add(std::move(r));
    loaded.manifest = std::move(out.manifest);
    return std::make_pair(std::move(loaded), std::move(out.warnings));
  };
  auto [first, warnings] = load(e);
  std::optional<LoadedEmbeddings> second;
  if (opts.property == Property::kStability) {
    EmbedOptions e2 = e;
    e2.cfg.seed = e.cfg.seed + 1;
    second = load(e2).first;
  }
  MeasureReport report =
      run_impl(first, second ? &*second : nullptr, &corpus, opts);
  report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
  return report;
}

}  // namespace observatory
