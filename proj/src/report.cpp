#include "observatory/report.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"

#include "observatory/error.hpp"

namespace observatory {

namespace {

nlohmann::json five_number_json(const FiveNumber& f) {
  return {{"min", f.min},       {"q1", f.q1},
          {"median", f.median}, {"q3", f.q3},
          {"max", f.max},       {"whisker_lo", f.whisker_lo},
          {"whisker_hi", f.whisker_hi}, {"mean", f.mean},
          {"std", f.std},       {"count", f.count}};
}

FiveNumber five_number_from_json(const nlohmann::json& j) {
  FiveNumber f;
  f.min = j.at("min").get<double>();
  f.q1 = j.at("q1").get<double>();
  f.median = j.at("median").get<double>();
  f.q3 = j.at("q3").get<double>();
  f.max = j.at("max").get<double>();
  f.whisker_lo = j.at("whisker_lo").get<double>();
  f.whisker_hi = j.at("whisker_hi").get<double>();
  f.mean = j.at("mean").get<double>();
  f.std = j.at("std").get<double>();
  f.count = j.at("count").get<std::size_t>();
  return f;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string short_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

std::string_view to_string(Property p) {
  switch (p) {
    case Property::kRowOrder:
      return "row-order";
    case Property::kColOrder:
      return "col-order";
    case Property::kJoin:
      return "join";
    case Property::kFd:
      return "fd";
    case Property::kFidelity:
      return "fidelity";
    case Property::kStability:
      return "stability";
    case Property::kPerturbation:
      return "perturbation";
    case Property::kContext:
      return "context";
  }
  return "unknown";
}

Property parse_property(std::string_view text) {
  for (Property p : kAllProperties) {
    if (text == to_string(p)) return p;
  }
  throw ValidationError("unknown property '" + std::string(text) + "'");
}

std::vector<std::string> MeasureReport::metric_names() const {
  std::set<std::string> names;
  for (const auto& item : per_item) {
    for (const auto& [name, _] : item.values) names.insert(name);
  }
  return {names.begin(), names.end()};
}

void MeasureReport::recompute_summary() {
  summary.clear();
  for (const auto& name : metric_names()) {
    std::vector<double> values;
    for (const auto& item : per_item) {
      if (auto it = item.values.find(name); it != item.values.end()) {
        values.push_back(it->second);
      }
    }
    summary.emplace(name, summarize(values));
  }
}

std::string MeasureReport::to_json() const {
  nlohmann::json j;
  j["property"] = std::string(to_string(property));
  j["model"] = model_id;
  j["corpus"] = corpus;
  j["status"] = status;
  j["params"] = params;
  j["scalars"] = scalars;
  nlohmann::json summary_json = nlohmann::json::object();
  for (const auto& [name, f] : summary) summary_json[name] = five_number_json(f);
  j["summary"] = std::move(summary_json);
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : per_item) {
    items.push_back({{"key", item.key},
                     {"labels", item.labels},
                     {"values", item.values}});
  }
  j["per_item"] = std::move(items);
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

MeasureReport MeasureReport::from_json(std::string_view text) {
  MeasureReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.property = parse_property(j.at("property").get<std::string>());
    r.model_id = j.at("model").get<std::string>();
    r.corpus = j.at("corpus").get<std::string>();
    r.status = j.at("status").get<std::string>();
    r.params = j.at("params").get<std::map<std::string, std::string>>();
    r.scalars = j.at("scalars").get<std::map<std::string, double>>();
    for (const auto& [name, f] : j.at("summary").items()) {
      r.summary.emplace(name, five_number_from_json(f));
    }
    for (const auto& item : j.at("per_item")) {
      r.per_item.push_back(ItemRecord{
          item.at("key").get<std::string>(),
          item.at("labels").get<std::map<std::string, std::string>>(),
          item.at("values").get<std::map<std::string, double>>()});
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string MeasureReport::items_csv() const {
  std::set<std::string> label_set;
  for (const auto& item : per_item) {
    for (const auto& [name, _] : item.labels) label_set.insert(name);
  }
  const std::vector<std::string> labels(label_set.begin(), label_set.end());
  const std::vector<std::string> metrics = metric_names();

  std::ostringstream out;
  out << "key";
  for (const auto& l : labels) out << ',' << csv_field(l);
  for (const auto& m : metrics) out << ',' << csv_field(m);
  out << '\n';
  for (const auto& item : per_item) {
    out << csv_field(item.key);
    for (const auto& l : labels) {
      out << ',';
      if (auto it = item.labels.find(l); it != item.labels.end()) {
        out << csv_field(it->second);
      }
    }
    for (const auto& m : metrics) {
      out << ',';
      if (auto it = item.values.find(m); it != item.values.end()) {
        out << number(it->second);
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string MeasureReport::to_text() const {
  std::ostringstream out;
  out << "property: " << to_string(property) << '\n'
      << "model:    " << model_id << '\n'
      << "corpus:   " << corpus << '\n'
      << "status:   " << status << '\n'
      << "items:    " << per_item.size() << '\n';
  if (!params.empty()) {
    out << "params:\n";
    for (const auto& [k, v] : params) out << "  " << k << " = " << v << '\n';
  }
  if (!scalars.empty()) {
    out << "results:\n";
    for (const auto& [k, v] : scalars) {
      out << "  " << k << " = " << short_number(v) << '\n';
    }
  }
  if (!summary.empty()) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-28s %6s %10s %10s %10s %10s %10s %10s\n",
                  "metric", "n", "min", "q1", "median", "q3", "max", "mean");
    out << line;
    for (const auto& [name, f] : summary) {
      std::snprintf(line, sizeof(line),
                    "%-28s %6zu %10.4g %10.4g %10.4g %10.4g %10.4g %10.4g\n",
                    name.c_str(), f.count, f.min, f.q1, f.median, f.q3, f.max,
                    f.mean);
      out << line;
    }
  }
  if (!warnings.empty()) {
    out << "warnings (" << warnings.size() << "):\n";
    for (const auto& w : warnings) out << "  " << w << '\n';
  }
  return out.str();
}

}  // namespace observatory
