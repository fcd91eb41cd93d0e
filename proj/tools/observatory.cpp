// observatory: variant generation, reference embeddings, property measures
// and reports for table embeddings.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "observatory/error.hpp"
#include "observatory/parallel.hpp"
#include "observatory/pipeline.hpp"

namespace obs = observatory;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitMeasure = 3;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_ratios(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) {
    std::size_t used = 0;
    double r = 0.0;
    try {
      r = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw obs::ValidationError("bad ratio '" + s + "'");
    out.push_back(r);
  }
  if (out.empty()) throw obs::ValidationError("empty ratio list");
  return out;
}

std::vector<obs::Level> parse_levels(const std::string& text) {
  std::vector<obs::Level> out;
  for (const auto& s : split_list(text)) out.push_back(obs::parse_level(s));
  if (out.empty()) throw obs::ValidationError("empty level list");
  return out;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

struct EmbedArgs {
  std::string corpus;
  std::string model = "ref-cf";
  std::string levels = "column";
  std::string plans;
  std::size_t dim = 64;
  double alpha = 0.5;
  std::uint64_t hash_seed = 42;
  std::size_t token_budget = 512;
  std::string variants;
  std::string ratios = "0.25,0.5,0.75";
  std::size_t samples = 5;
  std::size_t chunk_rows = 0;
  std::string perturbations;
  std::string context = "neighbors";
  bool exclude_header = false;
  std::uint64_t seed = 42;
  std::size_t budget = 1000;
};

obs::EmbedOptions to_embed_options(const EmbedArgs& a, std::size_t threads) {
  obs::EmbedOptions o;
  o.model = a.model;
  o.levels = parse_levels(a.levels);
  o.cfg.dim = a.dim;
  o.cfg.alpha = a.alpha;
  o.cfg.seed = a.hash_seed;
  o.cfg.token_budget = a.token_budget;
  if (!a.plans.empty()) {
    o.plans_dir = a.plans;
    o.variants = obs::VariantKind::kPlans;
  }
  if (!a.variants.empty()) o.variants = obs::parse_variant_kind(a.variants);
  o.ratios = parse_ratios(a.ratios);
  o.samples_per_ratio = a.samples;
  o.chunk_rows = a.chunk_rows;
  if (!a.perturbations.empty()) o.perturbations = a.perturbations;
  o.ctx_setting = obs::parse_context_setting(a.context);
  o.exclude_header = a.exclude_header;
  o.seed = a.seed;
  o.permutation_budget = a.budget;
  o.threads = threads;
  return o;
}

void add_embedder_flags(CLI::App* cmd, EmbedArgs& a) {
  cmd->add_option("--model", a.model, "ref-cf or ref-ctx")->capture_default_str();
  cmd->add_option("--dim", a.dim, "embedding dimension")->capture_default_str();
  cmd->add_option("--alpha", a.alpha, "ref-ctx self weight")->capture_default_str();
  cmd->add_option("--hash-seed", a.hash_seed, "feature-hashing seed")
      ->capture_default_str();
  cmd->add_option("--token-budget", a.token_budget, "tokens pooled per target")
      ->capture_default_str();
  cmd->add_option("--context", a.context,
                  "ref-ctx column context: column_only|subject_column|neighbors|entire_table")
      ->capture_default_str();
  cmd->add_flag("--exclude-header", a.exclude_header,
                "leave headers out of the serialization");
  cmd->add_option("--chunk-rows", a.chunk_rows,
                  "chunk size for full-column embeddings (0 = off)")
      ->capture_default_str();
  cmd->add_option("--samples", a.samples, "samples per ratio")->capture_default_str();
  cmd->add_option("--perturbations", a.perturbations,
                  "JSON {table: {header: [alternatives]}}");
}

struct MeasureArgs {
  std::string property;
  std::string emb;
  std::string emb2;
  std::string overlap = "containment";
  std::string ratios;
  std::size_t k = 10;
  std::string norm = "l2";
  std::string out;
  std::string corpus;
  std::string pairs;
  std::string fds;
  std::string model;
  std::size_t queries = 0;
  std::uint64_t seed = 42;
  std::string plot_data;
  std::string generator;
};

int run_measure(const MeasureArgs& m, const EmbedArgs& e, std::size_t threads,
                CLI::App* cmd) {
  obs::MeasureOptions o;
  try {
    o.property = obs::parse_property(m.property);
  } catch (const obs::ValidationError& err) {
    std::cerr << err.what() << "\n\n" << cmd->help();
    return kExitUsage;
  }
  if (!m.model.empty()) o.model = m.model;
  if (!m.corpus.empty()) o.corpus_dir = m.corpus;
  o.overlap = obs::parse_overlap_kind(m.overlap);
  if (!m.pairs.empty()) o.pairs_file = m.pairs;
  if (!m.fds.empty()) o.fds_file = m.fds;
  if (!m.ratios.empty()) o.ratios = parse_ratios(m.ratios);
  o.k = m.k;
  o.queries = m.queries;
  o.norm = obs::parse_norm(m.norm);
  o.seed = m.seed;
  o.threads = threads;

  obs::MeasureReport report;
  if (!m.generator.empty()) {
    if (m.corpus.empty()) throw obs::ValidationError("--generator needs --corpus");
    EmbedArgs gen = e;
    gen.model = m.generator;
    obs::EmbedOptions eo = to_embed_options(gen, threads);
    if (o.property == obs::Property::kRowOrder ||
        o.property == obs::Property::kColOrder) {
      eo.variants = obs::VariantKind::kPlans;
    }
    o.model.reset();
    report = obs::run_property(obs::load_corpus(m.corpus), eo, o);
  } else {
    if (m.emb.empty()) throw obs::ValidationError("--emb or --generator is required");
    const obs::LoadedEmbeddings emb = obs::load_embeddings(m.emb);
    std::optional<obs::LoadedEmbeddings> emb2;
    if (!m.emb2.empty()) emb2 = obs::load_embeddings(m.emb2);
    report = obs::run_property(emb, emb2 ? &*emb2 : nullptr, o);
  }

  print_warnings(report.warnings);
  const std::string json = report.to_json();
  if (m.out.empty()) {
    std::cout << json;
  } else {
    const obs::fs::path out(m.out);
    obs::fs::path csv = out;
    csv.replace_extension(".csv");
    obs::write_file(out, json);
    obs::write_file(csv, report.items_csv());
    obs::write_file(obs::fs::path(m.out + ".log"),
                    utc_timestamp() + " measure " + m.property + " model=" +
                        report.model_id + " items=" +
                        std::to_string(report.per_item.size()) + " warnings=" +
                        std::to_string(report.warnings.size()) + "\n");
    std::cerr << "wrote " << out.string() << " and " << csv.string() << '\n';
  }
  if (!m.plot_data.empty()) {
    const obs::fs::path p = obs::fs::path(m.plot_data) /
                            (m.property + "_" + report.model_id + ".csv");
    obs::write_file(p, report.items_csv());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characterize table embeddings: variants, reference embeddings, "
               "property measures and reports"};
  app.require_subcommand(1);

  // permute
  auto* permute = app.add_subcommand("permute", "Write row or column permutation plans");
  std::string p_corpus, p_axis = "row", p_out;
  std::size_t p_budget = 1000;
  std::uint64_t p_seed = 42;
  permute->add_option("--corpus", p_corpus, "corpus directory")->required();
  permute->add_option("--axis", p_axis, "row or column")->capture_default_str();
  permute->add_option("--budget", p_budget, "permutations per table")->capture_default_str();
  permute->add_option("--seed", p_seed, "sampling seed")->capture_default_str();
  permute->add_option("--out", p_out, "plan directory")->required();

  // embed-ref
  auto* embed = app.add_subcommand("embed-ref", "Embed a corpus with a reference embedder");
  EmbedArgs ea;
  std::string e_out;
  embed->add_option("--corpus", ea.corpus, "corpus directory")->required();
  embed->add_option("--level", ea.levels,
                    "comma list of table,column,row,cell,entity")
      ->capture_default_str();
  embed->add_option("--plans", ea.plans, "plan directory (permutation variants)");
  embed->add_option("--variants", ea.variants,
                    "none|plans|samples|perturbation|context");
  embed->add_option("--ratios", ea.ratios, "sample ratios")->capture_default_str();
  embed->add_option("--seed", ea.seed, "sampling seed")->capture_default_str();
  embed->add_option("--out", e_out, "output directory")->required();
  add_embedder_flags(embed, ea);

  // measure
  auto* measure = app.add_subcommand("measure", "Compute one property measure");
  MeasureArgs ma;
  EmbedArgs mg;
  measure->add_option("property", ma.property,
                      "row-order|col-order|join|fd|fidelity|stability|perturbation|context")
      ->required();
  measure->add_option("--emb", ma.emb, "embedding directory or JSONL file");
  measure->add_option("--emb2", ma.emb2, "second embedding space (stability)");
  measure->add_option("--overlap", ma.overlap, "containment|jaccard|multiset-jaccard")
      ->capture_default_str();
  measure->add_option("--ratios", ma.ratios, "sample ratios to evaluate");
  measure->add_option("--k", ma.k, "neighbors for stability")->capture_default_str();
  measure->add_option("--norm", ma.norm, "l1 or l2")->capture_default_str();
  measure->add_option("--out", ma.out, "report JSON path (CSV written alongside)");
  measure->add_option("--corpus", ma.corpus, "corpus directory (join, fd, --generator)");
  measure->add_option("--pairs", ma.pairs,
                      "join pairs CSV query_table,query_col,candidate_table,candidate_col");
  measure->add_option("--fds", ma.fds, "FD list CSV table_id,x_col,y_col,holds");
  measure->add_option("--model", ma.model, "model id inside the embedding file");
  measure->add_option("--queries", ma.queries, "sampled stability queries (0 = all)")
      ->capture_default_str();
  measure->add_option("--seed", ma.seed, "measure seed")->capture_default_str();
  measure->add_option("--plot-data", ma.plot_data, "directory for boxplot-ready CSV");
  measure->add_option("--generator", ma.generator,
                      "embed in memory with ref-cf or ref-ctx instead of --emb");
  measure->add_option("--budget", mg.budget, "permutations per table (--generator)")
      ->capture_default_str();
  measure->add_option("--level", mg.levels, "levels for permutation properties (--generator)")
      ->capture_default_str();
  {
    // Embedder flags apply to --generator; --model selects inside a file.
    auto* g = measure->add_option_group("generator", "reference embedder settings");
    g->add_option("--dim", mg.dim)->capture_default_str();
    g->add_option("--alpha", mg.alpha)->capture_default_str();
    g->add_option("--hash-seed", mg.hash_seed)->capture_default_str();
    g->add_option("--chunk-rows", mg.chunk_rows)->capture_default_str();
    g->add_option("--samples", mg.samples)->capture_default_str();
    g->add_flag("--exclude-header", mg.exclude_header);
    g->add_option("--context", mg.context)->capture_default_str();
  }

  // report
  auto* report = app.add_subcommand("report", "Render a saved report");
  std::string r_in, r_format = "text";
  report->add_option("--in", r_in, "report JSON")->required();
  report->add_option("--format", r_format, "text or csv")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const std::size_t threads = obs::default_thread_count();
    if (*permute) {
      obs::PermuteOptions o;
      o.axis = obs::parse_axis(p_axis);
      o.budget = p_budget;
      o.seed = p_seed;
      const auto plans = obs::make_plans(obs::load_corpus(p_corpus), o);
      obs::write_plans(plans, p_out);
      std::cerr << "wrote " << plans.size() << " plans to " << p_out << '\n';
    } else if (*embed) {
      const obs::EmbedOutput out =
          obs::embed_reference(obs::load_corpus(ea.corpus), to_embed_options(ea, threads));
      print_warnings(out.warnings);
      obs::write_embeddings(out, e_out);
      std::cerr << "wrote " << out.records.size() << " records to " << e_out << '\n';
    } else if (*measure) {
      if (!ma.ratios.empty()) mg.ratios = ma.ratios;
      mg.seed = ma.seed;
      return run_measure(ma, mg, threads, measure);
    } else if (*report) {
      const auto r = obs::MeasureReport::from_json(obs::read_file(r_in));
      if (r_format == "text") {
        std::cout << r.to_text();
      } else if (r_format == "csv") {
        std::cout << r.items_csv();
      } else {
        throw obs::ValidationError("unknown format '" + r_format + "' (text|csv)");
      }
    }
  } catch (const obs::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const obs::MeasureError& e) {
    std::cerr << "measure failed: " << e.what() << '\n';
    return kExitMeasure;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}
