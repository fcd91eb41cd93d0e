#include "observatory/embedding_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace observatory {

namespace {

using Kind = EmbeddingFormatError::Kind;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string target_string(const std::vector<std::size_t>& target) {
  std::string s = "[";
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(target[i]);
  }
  return s + "]";
}

std::string record_key_string(const EmbeddingRecord& r) {
  return r.model_id + "/" + r.table_id + "/variant " +
         std::to_string(r.variant_id) + "/" + std::string(to_string(r.level)) +
         target_string(r.target);
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::kTable:
      return "table";
    case Level::kColumn:
      return "column";
    case Level::kRow:
      return "row";
    case Level::kCell:
      return "cell";
    case Level::kEntity:
      return "entity";
  }
  return "unknown";
}

Level parse_level(std::string_view text) {
  for (Level l : {Level::kTable, Level::kColumn, Level::kRow, Level::kCell,
                  Level::kEntity}) {
    if (text == to_string(l)) return l;
  }
  throw ValidationError("unknown embedding level '" + std::string(text) + "'");
}

std::size_t target_arity(Level level) {
  switch (level) {
    case Level::kTable:
      return 0;
    case Level::kColumn:
    case Level::kRow:
      return 1;
    case Level::kCell:
    case Level::kEntity:
      return 2;
  }
  return 0;
}

std::string SeriesKey::to_string() const {
  return model_id + "/" + table_id + "/" +
         std::string(observatory::to_string(level)) + target_string(target);
}

SeriesKey series_key(const EmbeddingRecord& r) {
  return SeriesKey{r.model_id, r.table_id, r.level, r.target};
}

void EmbeddingSet::add(EmbeddingRecord record) {
  if (record.vector.empty()) {
    throw EmbeddingFormatError(Kind::kMalformed,
                               "record " + record_key_string(record) +
                                   " has an empty vector");
  }
  if (record.target.size() != target_arity(record.level)) {
    throw EmbeddingFormatError(
        Kind::kMalformed, "record " + record_key_string(record) +
                              ": target arity does not match level");
  }
  for (double x : record.vector) {
    if (!std::isfinite(x)) {
      throw EmbeddingFormatError(Kind::kNonFinite,
                                 "record " + record_key_string(record) +
                                     " contains a non-finite value");
    }
  }
  if (records_.empty()) {
    dim_ = record.dim();
  } else if (record.dim() != dim_) {
    throw EmbeddingFormatError(
        Kind::kDimMismatch, "record " + record_key_string(record) + " has dim " +
                                std::to_string(record.dim()) +
                                ", expected " + std::to_string(dim_));
  }
  auto& variants = index_[series_key(record)];
  if (variants.count(record.variant_id) > 0) {
    throw EmbeddingFormatError(
        Kind::kDuplicate, "duplicate record " + record_key_string(record));
  }
  variants.emplace(record.variant_id, records_.size());
  records_.push_back(std::move(record));
}

std::vector<SeriesKey> EmbeddingSet::keys() const {
  std::vector<SeriesKey> out;
  out.reserve(index_.size());
  for (const auto& [key, _] : index_) out.push_back(key);
  return out;
}

bool EmbeddingSet::contains(const SeriesKey& key) const {
  return index_.count(key) > 0;
}

const EmbeddingRecord* EmbeddingSet::find(const SeriesKey& key,
                                          std::size_t variant_id) const {
  auto it = index_.find(key);
  if (it == index_.end()) return nullptr;
  auto vit = it->second.find(variant_id);
  if (vit == it->second.end()) return nullptr;
  return &records_[vit->second];
}

Series EmbeddingSet::series(const SeriesKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) {
    throw ValidationError("no embeddings for key " + key.to_string());
  }
  Series s;
  std::size_t expected = 0;
  for (const auto& [variant, pos] : it->second) {
    if (variant != expected) {
      s.warnings.push_back(key.to_string() + ": variants " +
                           std::to_string(expected) + ".." +
                           std::to_string(variant - 1) + " missing");
    }
    s.variant_ids.push_back(variant);
    s.vectors.push_back(records_[pos].vector);
    expected = variant + 1;
  }
  return s;
}

std::string record_to_json_line(const EmbeddingRecord& r) {
  std::string line = "{\"model\":" + nlohmann::json(r.model_id).dump() +
                     ",\"table\":" + nlohmann::json(r.table_id).dump() +
                     ",\"variant\":" + std::to_string(r.variant_id) +
                     ",\"level\":\"" + std::string(to_string(r.level)) +
                     "\",\"target\":" + target_string(r.target) +
                     ",\"dim\":" + std::to_string(r.dim()) + ",\"vec\":[";
  for (std::size_t i = 0; i < r.vector.size(); ++i) {
    if (i > 0) line += ',';
    line += format_double(r.vector[i]);
  }
  line += ']';
  if (!r.meta.empty()) line += ",\"meta\":" + nlohmann::json(r.meta).dump();
  line += '}';
  return line;
}

EmbeddingRecord record_from_json_line(std::string_view line,
                                      std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw EmbeddingFormatError(Kind::kMalformed,
                               where + "malformed JSON (" + e.what() + ")");
  }
  EmbeddingRecord r;
  std::size_t declared_dim = 0;
  try {
    if (!j.is_object()) throw std::runtime_error("not a JSON object");
    r.model_id = j.at("model").get<std::string>();
    r.table_id = j.at("table").get<std::string>();
    r.variant_id = j.at("variant").get<std::size_t>();
    r.level = parse_level(j.at("level").get<std::string>());
    r.target = j.at("target").get<std::vector<std::size_t>>();
    declared_dim = j.at("dim").get<std::size_t>();
    for (const auto& x : j.at("vec")) {
      if (!x.is_number()) throw std::runtime_error("non-numeric vector entry");
      r.vector.push_back(x.get<double>());
    }
    if (j.contains("meta")) {
      r.meta = j["meta"].get<std::map<std::string, std::string>>();
    }
  } catch (const EmbeddingFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw EmbeddingFormatError(Kind::kMalformed,
                               where + "malformed record (" + e.what() + ")");
  }
  if (declared_dim != r.vector.size()) {
    throw EmbeddingFormatError(
        Kind::kDimMismatch, where + "declared dim " +
                                std::to_string(declared_dim) + " but vector has " +
                                std::to_string(r.vector.size()) + " entries");
  }
  return r;
}

std::size_t write_records(std::span<const EmbeddingRecord> records,
                          std::ostream& sink) {
  if (!records.empty()) {
    const std::size_t dim = records.front().dim();
    for (const auto& r : records) {
      if (r.dim() != dim) {
        throw EmbeddingFormatError(Kind::kDimMismatch,
                                   "record " + record_key_string(r) +
                                       " has dim " + std::to_string(r.dim()) +
                                       ", expected " + std::to_string(dim));
      }
      for (double x : r.vector) {
        if (!std::isfinite(x)) {
          throw EmbeddingFormatError(
              Kind::kNonFinite,
              "record " + record_key_string(r) + " contains a non-finite value");
        }
      }
    }
  }
  for (const auto& r : records) sink << record_to_json_line(r) << '\n';
  if (!sink) throw ValidationError("failed to write embedding records");
  return records.size();
}

EmbeddingSet read_records(std::istream& source) {
  EmbeddingSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    EmbeddingRecord r = record_from_json_line(line, line_no);
    try {
      set.add(std::move(r));
    } catch (const EmbeddingFormatError& e) {
      throw EmbeddingFormatError(e.kind(), "line " + std::to_string(line_no) +
                                               ": " + e.what());
    }
  }
  return set;
}

void EmbeddingSpace::insert(std::string key, Vector v) {
  if (entries_.count(key) > 0) {
    throw ValidationError("duplicate entity key '" + key + "' in space " +
                          model_id_);
  }
  double sq = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw ValidationError("entity '" + key + "' has a non-finite vector");
    }
    sq += x * x;
  }
  if (!(sq > 0.0)) {
    throw ValidationError("entity '" + key + "' has a zero vector");
  }
  if (entries_.empty()) {
    dim_ = v.size();
  } else if (v.size() != dim_) {
    throw ValidationError("entity '" + key + "' has dim " +
                          std::to_string(v.size()) + ", expected " +
                          std::to_string(dim_));
  }
  const double norm = std::sqrt(sq);
  for (double& x : v) x /= norm;
  entries_.emplace(std::move(key), std::move(v));
}

const Vector& EmbeddingSpace::at(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw MeasureError("entity '" + key + "' is not in space " + model_id_);
  }
  return it->second;
}

std::string entity_key(const EmbeddingRecord& r) {
  if (auto it = r.meta.find("entity"); it != r.meta.end()) return it->second;
  std::string key = r.table_id;
  for (std::size_t t : r.target) key += "/" + std::to_string(t);
  return key;
}

EmbeddingSpace build_space(const EmbeddingSet& set,
                           const std::string& model_id) {
  EmbeddingSpace space(model_id);
  for (const auto& r : set.records()) {
    if (r.model_id != model_id || r.level != Level::kEntity ||
        r.variant_id != 0) {
      continue;
    }
    space.insert(entity_key(r), r.vector);
  }
  return space;
}

std::string Manifest::to_json() const {
  nlohmann::json j;
  j["property"] = property;
  j["models"] = models;
  j["dim"] = dim;
  j["corpus"] = corpus;
  j["corpus_dir"] = corpus_dir;
  j["corpus_hash"] = corpus_hash;
  j["seed"] = seed;
  j["generator"] = generator;
  j["params"] = params;
  return j.dump(2) + "\n";
}

Manifest Manifest::from_json(std::string_view text) {
  Manifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.property = j.at("property").get<std::string>();
    m.models = j.at("models").get<std::vector<std::string>>();
    m.dim = j.at("dim").get<std::size_t>();
    m.corpus = j.at("corpus").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.generator = j.at("generator").get<std::string>();
    m.corpus_dir = j.value("corpus_dir", std::string{});
    m.corpus_hash = j.value("corpus_hash", std::string{});
    if (j.contains("params")) {
      m.params = j["params"].get<std::map<std::string, std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

}  // namespace observatory
