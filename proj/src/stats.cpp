#include "observatory/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "observatory/error.hpp"

namespace observatory {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw MeasureError("quantile of an empty sequence");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

FiveNumber summarize(std::span<const double> values) {
  if (values.empty()) throw MeasureError("cannot summarize an empty sequence");
  for (double v : values) {
    if (!std::isfinite(v)) throw MeasureError("cannot summarize non-finite values");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  FiveNumber f;
  f.count = sorted.size();
  f.min = sorted.front();
  f.max = sorted.back();
  f.q1 = quantile_sorted(sorted, 0.25);
  f.median = quantile_sorted(sorted, 0.5);
  f.q3 = quantile_sorted(sorted, 0.75);
  const double iqr = f.q3 - f.q1;
  f.whisker_lo = std::max(f.min, f.q1 - 1.5 * iqr);
  f.whisker_hi = std::min(f.max, f.q3 + 1.5 * iqr);

  const double n = static_cast<double>(sorted.size());
  // Rounding in the mean must not push it outside the observed range.
  f.mean = std::clamp(pairwise_sum(values) / n, f.min, f.max);
  if (sorted.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - f.mean;
      sq[i] = d * d;
    }
    f.std = std::sqrt(pairwise_sum(sq) / (n - 1.0));
  }
  return f;
}

}  // namespace observatory
