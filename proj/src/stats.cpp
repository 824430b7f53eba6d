#include "tlslayer/stats.hpp"

#include <algorithm>
#include <cmath>

#include "tlslayer/error.hpp"
#include "tlslayer/kernels.hpp"

namespace tlslayer {

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(Errc::EmptySamples, "percentile of empty sample");
  p = std::clamp(p, 0.0, 1.0);
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double percentile(std::span<const double> samples, double p) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return percentile_sorted(sorted, p);
}

LayerStatistics summarize_sorted(std::span<const double> sorted) {
  if (sorted.empty()) throw Error(Errc::EmptySamples, "summary of empty sample");
  const auto& k = kernels::active();
  const std::size_t n = sorted.size();
  LayerStatistics s;
  s.count = n;
  s.mean = k.sum(sorted.data(), n) / static_cast<double>(n);
  s.sd = n > 1 ? std::sqrt(k.sum_squared_deviation(sorted.data(), n, s.mean) /
                           static_cast<double>(n - 1))
               : 0.0;
  s.min = sorted.front();
  s.max = sorted.back();
  s.p50 = percentile_sorted(sorted, 0.50);
  s.p90 = percentile_sorted(sorted, 0.90);
  s.p95 = percentile_sorted(sorted, 0.95);
  s.p99 = percentile_sorted(sorted, 0.99);
  return s;
}

LayerStatistics summarize(std::span<const double> samples) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return summarize_sorted(sorted);
}

}  // namespace tlslayer
