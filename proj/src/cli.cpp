#include "tlslayer/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "tlslayer/analysis.hpp"
#include "tlslayer/capture.hpp"
#include "tlslayer/document.hpp"
#include "tlslayer/error.hpp"
#include "tlslayer/keylog.hpp"
#include "tlslayer/packet.hpp"
#include "tlslayer/reassembly.hpp"
#include "tlslayer/synth.hpp"

namespace tlslayer::cli {

namespace {

bool input_error(Errc c) {
  return c == Errc::UnreadableFile || c == Errc::UnknownMagic || c == Errc::UnknownLinkType ||
         c == Errc::InvalidDocument || c == Errc::InvalidSpec;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  f.close();
  if (!f) throw Error(Errc::WriteFailure, path.string());
}

std::string ordered_violation(const ConnectionTimeline& tl) {
  if (tl.validity != Validity::Valid) return {};
  LayerDeltas d = compute_deltas(tl);
  std::int64_t sum = 0;
  for (auto v : d.layer_ns) {
    if (v < 0) return "negative layer delta";
    sum += v;
  }
  if (sum != d.e2e_ns) return "layer deltas do not sum to e2e";
  return {};
}

std::string stats_violation(const std::optional<LayerStatistics>& s) {
  if (!s) return {};
  if (s->count == 0) return "empty statistics block";
  if (!(s->min <= s->p50 && s->p50 <= s->p90 && s->p90 <= s->p95 && s->p95 <= s->p99 && s->p99 <= s->max)) {
    return "percentiles out of order";
  }
  if (s->sd < 0) return "negative sd";
  return {};
}

std::string check_invariants(std::span<const ConnectionTimeline> timelines, const RunSummary& run) {
  std::size_t tallied = run.counts.valid;
  for (const auto& [_, n] : run.counts.partial_by_reason) tallied += n;
  for (const auto& [_, n] : run.counts.excluded_by_reason) tallied += n;
  if (tallied != run.counts.total_streams) return "counts do not sum to total_streams";
  for (const auto& tl : timelines) {
    if (auto v = ordered_violation(tl); !v.empty()) return v;
  }
  for (const auto& s : run.layers) {
    if (auto v = stats_violation(s); !v.empty()) return v;
  }
  if (auto v = stats_violation(run.e2e); !v.empty()) return v;
  return {};
}

void render(std::ostream& out, const std::string& format, const auto& doc) {
  if (format == "json") {
    out << render_json(doc);
  } else if (format == "csv") {
    out << render_csv(doc);
  } else {
    out << render_table(doc);
  }
}

bool known_format(const std::string& f) { return f == "json" || f == "csv" || f == "table"; }

}  // namespace

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
  if (!known_format(opts.format)) {
    err << "unknown format " << opts.format << "\n";
    return kUnreadableInput;
  }
  AnalysisDocument doc;
  std::vector<ConnectionTimeline> timelines;
  RunSummary run;
  try {
    const std::string capture_bytes = read_file(opts.pcap);
    std::size_t truncated = 0;
    std::vector<CapturedFrame> frames = read_capture(opts.pcap, &truncated);

    std::optional<KeyLogStore> keys;
    std::string keylog_bytes;
    if (opts.keylog) {
      keylog_bytes = read_file(*opts.keylog);
      keys = parse_keylog(std::string_view(keylog_bytes));
      const auto& diag = keys->diagnostics();
      if (diag.malformed_lines + diag.unknown_labels > 0) {
        err << "keylog: " << diag.malformed_lines << " malformed lines, " << diag.unknown_labels
            << " unknown labels ignored\n";
      }
    }

    std::vector<DecodedPacket> packets;
    packets.reserve(frames.size());
    std::size_t malformed = 0;
    for (const auto& f : frames) {
      try {
        if (auto p = decode_frame(f)) packets.push_back(std::move(*p));
      } catch (const Error&) {
        ++malformed;
      }
    }
    if (truncated + malformed > 0) {
      err << "capture: " << truncated << " truncated records, " << malformed << " malformed frames skipped\n";
    }

    AssemblyResult assembly = assemble_connections(packets);
    timelines = analyze_connections(assembly.connections, keys ? &*keys : nullptr,
                                    std::max(1u, opts.workers));
    run = summarize_run(opts.label, timelines, keys.has_value());
    if (auto v = check_invariants(timelines, run); !v.empty()) {
      err << "invariant violation: " << v << "\n";
      return kInvariantViolation;
    }

    doc = make_analysis_document(run);
    doc.inputs["capture"] = {opts.pcap.filename().string(), sha256_hex(capture_bytes)};
    if (opts.keylog) doc.inputs["keylog"] = {opts.keylog->filename().string(), sha256_hex(keylog_bytes)};
    if (opts.out) write_text(*opts.out, render_json(doc));
  } catch (const Error& e) {
    err << e.what() << "\n";
    if (input_error(e.code())) return kUnreadableInput;
    return kInvariantViolation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariantViolation;
  }

  render(out, opts.format, doc);
  const bool usable = doc.decrypted ? doc.counts.valid > 0
                                    : doc.layers[static_cast<std::size_t>(Layer::TcpToTls)].has_value();
  if (!usable) {
    err << "no valid connections\n";
    return kNoValidConnections;
  }
  return kOk;
}

int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err) {
  if (!known_format(opts.format)) {
    err << "unknown format " << opts.format << "\n";
    return kUnreadableInput;
  }
  try {
    AnalysisDocument baseline = parse_analysis_document(read_file(opts.baseline));
    AnalysisDocument candidate = parse_analysis_document(read_file(opts.candidate));
    CompareSettings settings{opts.percentiles, opts.cos_denominator, opts.delta_basis};
    ComparisonDocument doc = quantized(compare_documents(baseline, candidate, settings));
    if (opts.out) write_text(*opts.out, render_json(doc));
    render(out, opts.format, doc);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.code() == Errc::IncompatibleDocuments ? kIncompatibleDocuments : kUnreadableInput;
  }
  return kOk;
}

int cmd_synth(const SynthOptions& opts, std::ostream& out, std::ostream& err) {
  CaptureFormat format;
  std::string capture_name = "capture.pcap";
  if (opts.capture_format == "pcap-us") {
    format = CaptureFormat::PcapMicro;
  } else if (opts.capture_format == "pcap-ns") {
    format = CaptureFormat::PcapNano;
  } else if (opts.capture_format == "pcapng") {
    format = CaptureFormat::Pcapng;
    capture_name = "capture.pcapng";
  } else {
    err << "unknown capture format " << opts.capture_format << "\n";
    return kUnreadableInput;
  }
  try {
    synth::ScenarioSpec spec = synth::load_scenario(opts.spec);
    synth::SynthOutput result = synth::generate(spec);
    std::error_code ec;
    std::filesystem::create_directories(opts.out, ec);
    if (ec) throw Error(Errc::WriteFailure, opts.out.string() + ": " + ec.message());
    synth::emit_capture(result.frames, opts.out / capture_name, format);
    write_text(opts.out / "keylog.txt", result.keylog);
    write_text(opts.out / "ground_truth.json", synth::ground_truth_json(result.truth));
    out << "wrote " << result.truth.connections.size() << " connections, " << result.frames.size()
        << " frames to " << (opts.out / capture_name).string() << "\n";
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kUnreadableInput;
  }
  return kOk;
}

}  // namespace tlslayer::cli
