#include "tlslayer/metrics.hpp"

#include <cmath>

#include "tlslayer/error.hpp"

namespace tlslayer {

std::string_view effect_class_name(EffectClass c) noexcept {
  switch (c) {
    case EffectClass::Negligible: return "negligible";
    case EffectClass::SmallToMedium: return "small_to_medium";
    case EffectClass::Large: return "large";
  }
  return "";
}

EffectClass classify_effect(double delta) noexcept {
  const double a = std::fabs(delta);
  if (a < 0.2) return EffectClass::Negligible;
  if (a <= 0.8) return EffectClass::SmallToMedium;
  return EffectClass::Large;
}

double overhead_factor(double candidate_ms, double baseline_ms) {
  if (!(baseline_ms > 0)) throw Error(Errc::ZeroBaseline, "baseline latency must be positive");
  return candidate_ms / baseline_ms;
}

double combined_overhead_factor(double tcp_to_tls_candidate, double tls_candidate,
                                double tcp_to_tls_baseline, double tls_baseline) {
  const double base = tcp_to_tls_baseline + tls_baseline;
  if (!(base > 0)) throw Error(Errc::ZeroBaseline, "baseline layer sum must be positive");
  return (tcp_to_tls_candidate + tls_candidate) / base;
}

double cryptographic_overhead_share(double tcp_to_tls_candidate, double tls_candidate,
                                   double tcp_to_tls_baseline, double tls_baseline,
                                   double e2e_denominator) {
  if (!(e2e_denominator > 0)) throw Error(Errc::ZeroDenominator, "end-to-end denominator");
  const double excess =
      (tcp_to_tls_candidate - tcp_to_tls_baseline) + (tls_candidate - tls_baseline);
  return 100.0 * excess / e2e_denominator;
}

EffectSize glass_delta(double candidate, double baseline, double baseline_sd) {
  if (!(baseline_sd > 0)) throw Error(Errc::ZeroBaselineSD, "baseline SD must be positive");
  EffectSize e;
  e.delta = (candidate - baseline) / baseline_sd;
  e.classification = classify_effect(e.delta);
  return e;
}

double relative_e2e_overhead(double e2e_candidate, double e2e_baseline) {
  if (!(e2e_baseline > 0)) throw Error(Errc::ZeroBaseline, "baseline end-to-end time");
  return 100.0 * (e2e_candidate - e2e_baseline) / e2e_baseline;
}

}  // namespace tlslayer
