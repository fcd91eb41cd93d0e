#pragma once

#include <cstddef>
#include <span>

namespace observatory {

// Box-plot summary. Quartiles interpolate linearly between order statistics
// (R type 7); whiskers sit at q1 - 1.5 IQR and q3 + 1.5 IQR clipped to the
// observed range; std is the sample standard deviation (0 for one value).
struct FiveNumber {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;

  friend bool operator==(const FiveNumber&, const FiveNumber&) = default;
};

FiveNumber summarize(std::span<const double> values);

// Type-7 quantile of already sorted values, p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

// Pairwise (cascade) summation; error grows with log n rather than n.
double pairwise_sum(std::span<const double> values);

}  // namespace observatory
