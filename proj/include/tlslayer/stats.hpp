#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tlslayer {

struct LayerStatistics {
  std::size_t count = 0;
  double mean = 0;
  double p50 = 0;
  double p90 = 0;
  double p95 = 0;
  double p99 = 0;
  double min = 0;
  double max = 0;
  double sd = 0;

  bool operator==(const LayerStatistics&) const = default;
};

// Linear interpolation between closest ranks: h = (n - 1) p.
// `sorted` must be ascending. Throws Error{EmptySamples}.
double percentile_sorted(std::span<const double> sorted, double p);
double percentile(std::span<const double> samples, double p);

// Sample standard deviation uses the n - 1 denominator (0 for n == 1).
// Throws Error{EmptySamples}.
LayerStatistics summarize(std::span<const double> samples);
LayerStatistics summarize_sorted(std::span<const double> sorted);

}  // namespace tlslayer
