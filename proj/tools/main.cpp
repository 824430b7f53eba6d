#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "tlslayer/cli.hpp"
#include "tlslayer/version.hpp"

int main(int argc, char** argv) {
  using namespace tlslayer::cli;
  CLI::App app{"Per-layer latency decomposition of TLS 1.3 packet captures"};
  app.set_version_flag("--version", tlslayer::kToolVersion);
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  std::string pcap, keylog, out_doc;
  auto* a = app.add_subcommand("analyze", "Decompose a capture into layer statistics");
  a->add_option("--pcap", pcap, "pcap or pcapng capture")->required();
  a->add_option("--keylog", keylog, "NSS key log; omit for TCP-only analysis");
  a->add_option("--label", analyze.label, "Run label")->required();
  a->add_option("--out", out_doc, "Write the analysis document (JSON) here");
  a->add_option("--workers", analyze.workers, "Parallel connection batches")
      ->default_val(std::max(1u, std::thread::hardware_concurrency()))
      ->check(CLI::PositiveNumber);
  a->add_option("--format", analyze.format, "Console rendering")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->default_val("table");

  CompareOptions compare;
  std::string baseline, candidate, out_cmp, percentiles = "p50,p95";
  auto* c = app.add_subcommand("compare", "Overhead metrics of a candidate run against a baseline");
  c->add_option("--baseline", baseline, "Baseline analysis document")->required();
  c->add_option("--candidate", candidate, "Candidate analysis document")->required();
  c->add_option("--percentiles", percentiles, "Comma-separated subset of p50,p90,p95,p99");
  c->add_option("--cos-denominator", compare.cos_denominator, "layersum or e2e")
      ->check(CLI::IsMember({"layersum", "e2e"}));
  c->add_option("--delta-basis", compare.delta_basis, "p50 or mean")->check(CLI::IsMember({"p50", "mean"}));
  c->add_option("--out", out_cmp, "Write the comparison document (JSON) here");
  c->add_option("--format", compare.format, "Console rendering")
      ->check(CLI::IsMember({"json", "csv", "table"}));

  SynthOptions synth;
  std::string spec, out_dir;
  auto* s = app.add_subcommand("synth", "Generate a synthetic capture, key log and ground truth");
  s->add_option("--spec", spec, "Scenario file (JSON)")->required();
  s->add_option("--out", out_dir, "Output directory")->required();
  s->add_option("--capture-format", synth.capture_format, "pcap-us, pcap-ns or pcapng")
      ->check(CLI::IsMember({"pcap-us", "pcap-ns", "pcapng"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUnreadableInput;
  }

  if (*a) {
    analyze.pcap = pcap;
    if (!keylog.empty()) analyze.keylog = keylog;
    if (!out_doc.empty()) analyze.out = out_doc;
    return cmd_analyze(analyze, std::cout, std::cerr);
  }
  if (*c) {
    compare.baseline = baseline;
    compare.candidate = candidate;
    compare.percentiles.clear();
    std::size_t pos = 0;
    while (pos <= percentiles.size()) {
      auto next = percentiles.find(',', pos);
      if (next == std::string::npos) next = percentiles.size();
      if (next > pos) compare.percentiles.push_back(percentiles.substr(pos, next - pos));
      pos = next + 1;
    }
    if (!out_cmp.empty()) compare.out = out_cmp;
    return cmd_compare(compare, std::cout, std::cerr);
  }
  synth.spec = spec;
  synth.out = out_dir;
  return cmd_synth(synth, std::cout, std::cerr);
}
