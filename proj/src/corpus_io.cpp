#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "observatory/error.hpp"
#include "observatory/parallel.hpp"
#include "observatory/pipeline.hpp"

namespace observatory {

namespace {

constexpr std::string_view kHeaderlessSuffix = ".headerless.csv";

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::size_t default_thread_count() {
  if (const char* env = std::getenv("OBSERVATORY_THREADS")) {
    try {
      const unsigned long n = std::stoul(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw ValidationError("OBSERVATORY_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw ValidationError("failed writing " + path.string());
}

const Table& Corpus::table(const std::string& id) const {
  auto it = std::lower_bound(
      tables.begin(), tables.end(), id,
      [](const Table& t, const std::string& key) { return t.id() < key; });
  if (it == tables.end() || it->id() != id) {
    throw ValidationError("table '" + id + "' is not in corpus " + name);
  }
  return *it;
}

Corpus load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw ValidationError("corpus directory " + dir.string() + " not found");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (ends_with(name, ".csv") || ends_with(name, ".jsonl")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw ValidationError("corpus directory " + dir.string() +
                          " contains no .csv or .jsonl tables");
  }

  Corpus corpus;
  corpus.dir = fs::absolute(dir).lexically_normal().string();
  corpus.name = fs::absolute(dir).lexically_normal().filename().string();
  if (corpus.name.empty()) {
    corpus.name = fs::absolute(dir).lexically_normal().parent_path().filename().string();
  }
  std::string hash_input;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    std::string id;
    TableFormat format;
    if (ends_with(name, kHeaderlessSuffix)) {
      id = name.substr(0, name.size() - kHeaderlessSuffix.size());
      format = TableFormat::kCsvHeaderless;
    } else if (ends_with(name, ".csv")) {
      id = name.substr(0, name.size() - 4);
      format = TableFormat::kCsvWithHeader;
    } else {
      id = name.substr(0, name.size() - 6);
      format = TableFormat::kJsonlRows;
    }
    const std::string bytes = read_file(path);
    hash_input += name;
    hash_input.push_back('\0');
    hash_input += bytes;
    hash_input.push_back('\0');
    try {
      corpus.tables.push_back(parse_table(bytes, format, id));
    } catch (const ValidationError& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  std::sort(corpus.tables.begin(), corpus.tables.end(),
            [](const Table& a, const Table& b) { return a.id() < b.id(); });
  for (std::size_t i = 1; i < corpus.tables.size(); ++i) {
    if (corpus.tables[i].id() == corpus.tables[i - 1].id()) {
      throw ValidationError("duplicate table id '" + corpus.tables[i].id() +
                            "' in corpus " + corpus.name);
    }
  }
  corpus.hash = hex64(fnv1a64(std::span(
      reinterpret_cast<const unsigned char*>(hash_input.data()),
      hash_input.size())));
  return corpus;
}

std::vector<PermutationPlan> make_plans(const Corpus& corpus,
                                        const PermuteOptions& opts) {
  std::vector<PermutationPlan> plans;
  plans.reserve(corpus.tables.size());
  for (const auto& t : corpus.tables) {
    const std::size_t n = opts.axis == Axis::kRow ? t.nrows() : t.ncols();
    if (n == 0) {
      throw ValidationError("table '" + t.id() + "' has no rows to permute");
    }
    PermutationPlan plan = sample_permutations(n, opts.budget, opts.seed);
    plan.table_id = t.id();
    plan.axis = opts.axis;
    plans.push_back(std::move(plan));
  }
  return plans;
}

void write_plans(const std::vector<PermutationPlan>& plans,
                 const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& plan : plans) {
    write_file(dir / (plan.table_id + ".json"), plan_to_json(plan) + "\n");
  }
}

std::map<std::string, PermutationPlan> read_plans(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw ValidationError("plan directory " + dir.string() + " not found");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, PermutationPlan> plans;
  for (const auto& path : files) {
    PermutationPlan plan;
    try {
      plan = plan_from_json(read_file(path));
    } catch (const ValidationError& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    std::string id = plan.table_id;
    if (!plans.emplace(id, std::move(plan)).second) {
      throw ValidationError("two plans for table '" + id + "' in " +
                            dir.string());
    }
  }
  if (plans.empty()) {
    throw ValidationError("plan directory " + dir.string() + " has no plans");
  }
  return plans;
}

void write_embeddings(const EmbedOutput& out, const fs::path& dir) {
  fs::create_directories(dir);
  std::ostringstream records;
  write_records(out.records, records);
  write_file(dir / kEmbeddingsFile, records.str());
  write_file(dir / kManifestFile, out.manifest.to_json());
}

LoadedEmbeddings load_embeddings(const fs::path& dir) {
  const fs::path records_path =
      fs::is_directory(dir) ? dir / kEmbeddingsFile : dir;
  const fs::path manifest_path = records_path.parent_path() / kManifestFile;
  LoadedEmbeddings out;
  out.manifest = Manifest::from_json(read_file(manifest_path));
  std::ifstream in(records_path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + records_path.string());
  out.set = read_records(in);
  if (out.set.empty()) {
    throw ValidationError(records_path.string() + " contains no records");
  }
  if (out.manifest.dim != 0 && out.manifest.dim != out.set.dim()) {
    throw ValidationError("manifest dim " + std::to_string(out.manifest.dim) +
                          " does not match record dim " +
                          std::to_string(out.set.dim()));
  }
  return out;
}

}  // namespace observatory
