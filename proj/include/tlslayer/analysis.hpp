#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tlslayer/keylog.hpp"
#include "tlslayer/reassembly.hpp"
#include "tlslayer/stats.hpp"
#include "tlslayer/timeline.hpp"

namespace tlslayer {

// Recovers the six boundaries of one connection. `keys` may be null, in
// which case only the TCP handshake and ClientHello are located.
ConnectionTimeline analyze_connection(const TcpConnection& conn, const KeyLogStore* keys);

// Connections are split into `workers` contiguous batches processed in
// parallel; the result is ordered like the input regardless of batching.
std::vector<ConnectionTimeline> analyze_connections(std::span<const TcpConnection> connections,
                                                    const KeyLogStore* keys, unsigned workers);

struct RunCounts {
  std::size_t total_streams = 0;
  std::size_t valid = 0;
  std::map<std::string, std::size_t> partial_by_reason;
  std::map<std::string, std::size_t> excluded_by_reason;

  bool operator==(const RunCounts&) const = default;
};

// Most frequent value per field among connections that sent a ClientHello.
struct HandshakeMetadata {
  std::optional<std::uint16_t> group;
  std::optional<std::uint16_t> key_share_len;
  std::optional<std::uint32_t> client_hello_len;
  std::optional<std::uint32_t> server_hello_len;
  std::optional<CipherSuite> cipher_suite;

  bool operator==(const HandshakeMetadata&) const = default;
};

struct RunSummary {
  std::string label;
  bool decrypted = true;
  std::array<std::optional<LayerStatistics>, 5> layers;
  // Per-connection SYN to HTTP 200, over valid connections only.
  std::optional<LayerStatistics> e2e;
  // HTTP GET to last response byte, informational.
  std::optional<LayerStatistics> ttlb;
  RunCounts counts;
  HandshakeMetadata metadata;
};

// Per-layer samples in milliseconds: every non-excluded timeline whose
// boundary prefix reaches the layer contributes.
std::vector<double> layer_samples_ms(std::span<const ConnectionTimeline> timelines, Layer layer);
std::vector<double> e2e_samples_ms(std::span<const ConnectionTimeline> timelines);

RunSummary summarize_run(std::string label, std::span<const ConnectionTimeline> timelines,
                         bool decrypted);

}  // namespace tlslayer
