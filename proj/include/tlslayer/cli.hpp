#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tlslayer::cli {

// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUnreadableInput = 2;
inline constexpr int kNoValidConnections = 3;
inline constexpr int kInvariantViolation = 4;
inline constexpr int kIncompatibleDocuments = 5;

struct AnalyzeOptions {
  std::filesystem::path pcap;
  std::optional<std::filesystem::path> keylog;
  std::string label;
  std::optional<std::filesystem::path> out;
  unsigned workers = 1;
  std::string format = "table";  // console rendering: json | csv | table
};

struct CompareOptions {
  std::filesystem::path baseline;
  std::filesystem::path candidate;
  std::vector<std::string> percentiles{"p50", "p95"};
  std::string cos_denominator = "layersum";
  std::string delta_basis = "p50";
  std::optional<std::filesystem::path> out;
  std::string format = "table";
};

struct SynthOptions {
  std::filesystem::path spec;
  std::filesystem::path out;
  std::string capture_format = "pcap-ns";  // pcap-us | pcap-ns | pcapng
};

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace tlslayer::cli
