#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tlslayer/groups.hpp"
#include "tlslayer/analysis.hpp"
#include "tlslayer/keylog.hpp"
#include "tlslayer/packet.hpp"
#include "tlslayer/reassembly.hpp"
#include "tlslayer/stats.hpp"
#include "tlslayer/synth.hpp"

namespace testsupport {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("tlslayer-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Sort-and-interpolate reference, long double throughout.
struct OracleStats {
  std::size_t count = 0;
  long double mean = 0, sd = 0, min = 0, max = 0;
  long double pct(double p) const {
    long double rank = static_cast<long double>(p) * static_cast<long double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(rank));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    long double w = rank - static_cast<long double>(lo);
    return sorted[lo] * (1 - w) + sorted[hi] * w;
  }
  std::vector<long double> sorted;
};

inline OracleStats oracle_stats(std::span<const double> samples) {
  OracleStats o;
  o.count = samples.size();
  o.sorted.assign(samples.begin(), samples.end());
  std::sort(o.sorted.begin(), o.sorted.end());
  long double sum = 0;
  for (auto v : o.sorted) sum += v;
  o.mean = sum / o.sorted.size();
  long double ss = 0;
  for (auto v : o.sorted) ss += (v - o.mean) * (v - o.mean);
  o.sd = o.sorted.size() > 1 ? std::sqrt(ss / (o.sorted.size() - 1)) : 0;
  o.min = o.sorted.front();
  o.max = o.sorted.back();
  return o;
}

inline bool close_rel(double a, long double b, double rel) {
  long double scale = std::max<long double>(std::fabs(b), 1.0L);
  return std::fabs(static_cast<long double>(a) - b) <= rel * scale;
}

struct PipelineResult {
  std::vector<tlslayer::TcpConnection> connections;
  std::vector<tlslayer::ConnectionTimeline> timelines;
  // timelines reordered so that entry i belongs to scenario connection i
  std::vector<const tlslayer::ConnectionTimeline*> by_index;
  tlslayer::KeyLogStore keys;
};

inline std::vector<tlslayer::DecodedPacket> decode_all(std::span<const tlslayer::CapturedFrame> frames) {
  std::vector<tlslayer::DecodedPacket> out;
  for (const auto& f : frames) {
    if (auto p = tlslayer::decode_frame(f)) out.push_back(std::move(*p));
  }
  return out;
}

// Generator client addresses encode the connection index as 10.a.b.c.
inline std::size_t index_of(const tlslayer::FlowKey& key) {
  const auto& o = key.client_ip.octets;
  return (static_cast<std::size_t>(o[1]) << 16) | (static_cast<std::size_t>(o[2]) << 8) | o[3];
}

inline PipelineResult run_pipeline(const tlslayer::synth::SynthOutput& synth, unsigned workers = 1,
                                   bool with_keys = true) {
  PipelineResult r;
  auto packets = decode_all(synth.frames);
  r.connections = tlslayer::assemble_connections(packets).connections;
  r.keys = tlslayer::parse_keylog(std::string_view(synth.keylog));
  r.timelines = tlslayer::analyze_connections(r.connections, with_keys ? &r.keys : nullptr, workers);
  r.by_index.assign(synth.truth.connections.size(), nullptr);
  for (std::size_t i = 0; i < r.connections.size(); ++i) {
    auto idx = index_of(r.connections[i].key);
    if (idx < r.by_index.size()) r.by_index[idx] = &r.timelines[i];
  }
  return r;
}

// Mixed clean scenario: 200 connections, all groups, all suites, 4 KB and
// 40 KB bodies, per-layer durations drawn from wide ranges.
inline tlslayer::synth::ScenarioSpec mixed_scenario(std::size_t count = 200, std::uint64_t seed = 7) {
  using namespace tlslayer;
  synth::GeneratorBlock block;
  block.count = count;
  block.seed = seed;
  block.start_ns = 1'000'000'000;
  block.interval_ns = 2'000'000;
  block.groups = {group_id::kX25519, group_id::kX25519Mlkem512, group_id::kX25519Mlkem768,
                  group_id::kMlkem512, group_id::kMlkem1024};
  block.cipher_suites = {CipherSuite::Aes128GcmSha256, CipherSuite::Aes256GcmSha384,
                         CipherSuite::Chacha20Poly1305Sha256};
  block.response_body_bytes = {4096, 40960};
  block.layer_ns = {{{100'000, 3'000'000},
                     {200'000, 5'000'000},
                     {3'000'000, 12'000'000},
                     {300'000, 3'000'000},
                     {6'000'000, 17'000'000}}};
  synth::ScenarioSpec spec;
  spec.connections = synth::expand(block);
  return spec;
}

}  // namespace testsupport
