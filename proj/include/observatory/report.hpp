#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "observatory/stats.hpp"

namespace observatory {

enum class Property {
  kRowOrder,
  kColOrder,
  kJoin,
  kFd,
  kFidelity,
  kStability,
  kPerturbation,
  kContext,
};

inline constexpr Property kAllProperties[] = {
    Property::kRowOrder,  Property::kColOrder,     Property::kJoin,
    Property::kFd,        Property::kFidelity,     Property::kStability,
    Property::kPerturbation, Property::kContext};

// CLI spelling: row-order, col-order, join, fd, fidelity, stability,
// perturbation, context.
std::string_view to_string(Property p);
Property parse_property(std::string_view text);

struct ItemRecord {
  std::string key;
  std::map<std::string, std::string> labels;
  std::map<std::string, double> values;
};

// Result of one property run. `summary` always equals summarize() of the
// per-item values of each metric; call recompute_summary() after edits.
struct MeasureReport {
  Property property = Property::kRowOrder;
  std::string model_id;
  std::string corpus;
  std::string status = "ok";
  std::map<std::string, std::string> params;
  std::map<std::string, double> scalars;
  std::vector<ItemRecord> per_item;
  std::map<std::string, FiveNumber> summary;
  std::vector<std::string> warnings;

  void recompute_summary();
  std::vector<std::string> metric_names() const;

  std::string to_json() const;
  static MeasureReport from_json(std::string_view text);

  // One row per item: key, labels, then metrics in name order.
  std::string items_csv() const;
  std::string to_text() const;
};

}  // namespace observatory
