#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tlslayer/analysis.hpp"
#include "tlslayer/metrics.hpp"

namespace tlslayer {

inline constexpr std::string_view kAnalysisSchema = "tlslayer.analysis/1";
inline constexpr std::string_view kComparisonSchema = "tlslayer.comparison/1";

// Statistic names in document order.
inline constexpr std::array<std::string_view, 9> kStatisticNames = {
    "count", "mean", "p50", "p90", "p95", "p99", "min", "max", "sd"};
inline constexpr std::array<std::string_view, 4> kPercentileNames = {"p50", "p90", "p95", "p99"};

// Statistics as carried by a document. Fields may be missing in
// hand-encoded documents (say, one carrying only p50/p95/p99/sd).
struct DocStats {
  std::optional<std::size_t> count;
  std::optional<double> mean, p50, p90, p95, p99, min, max, sd;

  static DocStats from(const LayerStatistics& s);
  // Lookup by statistic name; count is returned as a double.
  std::optional<double> get(std::string_view stat) const;
  void set(std::string_view stat, double value);

  bool operator==(const DocStats&) const = default;
};

struct InputDigest {
  std::string name;
  std::string sha256;
  bool operator==(const InputDigest&) const = default;
};

struct DocMetadata {
  std::optional<std::string> group;
  std::optional<std::uint32_t> key_share_len;
  std::optional<std::uint32_t> client_hello_len;
  std::optional<std::uint32_t> server_hello_len;
  std::optional<std::string> cipher_suite;
  bool operator==(const DocMetadata&) const = default;
};

struct AnalysisDocument {
  std::string schema{kAnalysisSchema};
  std::string tool_version;
  std::map<std::string, InputDigest> inputs;  // "capture", "keylog"
  std::string label;
  bool decrypted = true;
  std::array<std::optional<DocStats>, 5> layers;
  std::optional<DocStats> e2e;
  std::optional<DocStats> ttlb;
  RunCounts counts;
  DocMetadata metadata;
  std::string cos_denominator_mode = "layersum";

  bool operator==(const AnalysisDocument&) const = default;
};

// Values are rounded to the rendered precision so that a document equals
// its own parsed rendering.
AnalysisDocument make_analysis_document(const RunSummary& summary);

struct PercentileReport {
  std::string percentile;
  std::array<std::optional<double>, 5> of;
  std::optional<double> of_combined;
  std::optional<double> cos_percent;
  std::optional<double> relative_e2e_overhead_percent;

  bool operator==(const PercentileReport&) const = default;
};

struct DocEffect {
  double delta = 0;
  EffectClass classification = EffectClass::Negligible;
  bool operator==(const DocEffect&) const = default;
};

struct ComparisonDocument {
  std::string schema{kComparisonSchema};
  std::string tool_version;
  std::string baseline_label;
  std::string candidate_label;
  std::vector<std::string> percentiles;
  std::string cos_denominator = "layersum";
  std::string delta_basis = "p50";
  std::vector<PercentileReport> reports;
  std::array<std::optional<DocEffect>, 5> effect_sizes;
  // End-to-end overhead at p50, when both documents carry it.
  std::optional<double> relative_e2e_overhead_percent;

  bool operator==(const ComparisonDocument&) const = default;
};

struct CompareSettings {
  std::vector<std::string> percentiles{"p50", "p95"};
  std::string cos_denominator = "layersum";  // layersum | e2e
  std::string delta_basis = "p50";           // p50 | mean
};

// Unrounded metrics. Throws Error{IncompatibleDocuments} when either side
// lacks decrypted layers or a value the settings require, and
// Error{InvalidSpec} on bad settings.
ComparisonDocument compare_documents(const AnalysisDocument& baseline,
                                     const AnalysisDocument& candidate,
                                     const CompareSettings& settings);

// Rounds every value to its rendered precision.
ComparisonDocument quantized(ComparisonDocument doc);

// Canonical JSON: sorted keys, two-space indent, fixed decimals.
std::string render_json(const AnalysisDocument& doc);
std::string render_json(const ComparisonDocument& doc);
std::string render_csv(const AnalysisDocument& doc);
std::string render_csv(const ComparisonDocument& doc);
std::string render_table(const AnalysisDocument& doc);
std::string render_table(const ComparisonDocument& doc);

// Throw Error{InvalidDocument}.
AnalysisDocument parse_analysis_document(std::string_view text);
ComparisonDocument parse_comparison_document(std::string_view text);

// Throws Error{UnreadableFile}.
std::string read_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view data);

}  // namespace tlslayer
