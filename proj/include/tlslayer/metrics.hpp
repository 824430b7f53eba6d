#pragma once

#include <string_view>

namespace tlslayer {

enum class EffectClass { Negligible, SmallToMedium, Large };

std::string_view effect_class_name(EffectClass c) noexcept;

struct EffectSize {
  double delta = 0;
  EffectClass classification = EffectClass::Negligible;
};

// Cohen's thresholds on |delta|: < 0.2, 0.2 to 0.8 inclusive, > 0.8.
EffectClass classify_effect(double delta) noexcept;

// Candidate latency over baseline latency for one layer.
// Throws Error{ZeroBaseline} when the baseline is not positive.
double overhead_factor(double candidate_ms, double baseline_ms);

// Joint factor of the two key-exchange-sensitive layers.
double combined_overhead_factor(double tcp_to_tls_candidate, double tls_candidate,
                                double tcp_to_tls_baseline, double tls_baseline);

// Excess latency of TCP-to-TLS and TLS handshake as a percentage of the
// candidate's total connection time. Throws Error{ZeroDenominator}.
double cryptographic_overhead_share(double tcp_to_tls_candidate, double tls_candidate,
                                   double tcp_to_tls_baseline, double tls_baseline,
                                   double e2e_denominator);

// Glass's delta: difference over the baseline's standard deviation.
// Throws Error{ZeroBaselineSD}.
EffectSize glass_delta(double candidate, double baseline, double baseline_sd);

// Percent change of end-to-end time. Throws Error{ZeroBaseline}.
double relative_e2e_overhead(double e2e_candidate, double e2e_baseline);

}  // namespace tlslayer
