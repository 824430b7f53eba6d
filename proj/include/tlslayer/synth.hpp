#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlslayer/capture.hpp"
#include "tlslayer/crypto.hpp"
#include "tlslayer/packet.hpp"
#include "tlslayer/timeline.hpp"
#include "tlslayer/tls.hpp"

// Deterministic generator of decryptable TLS 1.3 captures with known
// boundary timestamps. Everything here is written independently of the
// analyzer's parsing and decryption paths; only key derivation is shared.
namespace tlslayer::synth {

namespace anomaly {
inline constexpr std::uint8_t kRetransmit = 0x01;
inline constexpr std::uint8_t kReorder = 0x02;
inline constexpr std::uint8_t kDropKeylog = 0x04;
inline constexpr std::uint8_t kTruncate = 0x08;
inline constexpr std::uint8_t kNon200 = 0x10;
}  // namespace anomaly

std::optional<std::uint8_t> anomaly_from_name(std::string_view name) noexcept;
std::vector<std::string> anomaly_names(std::uint8_t mask);

struct ConnectionSpec {
  // SYN, SYN-ACK, ClientHello, client Finished, HTTP GET, HTTP 200.
  std::array<std::int64_t, 6> boundary_ns{};
  std::uint16_t group = 0x001D;
  CipherSuite cipher_suite = CipherSuite::Aes128GcmSha256;
  std::uint32_t response_body_bytes = 4096;
  std::uint64_t segmentation_seed = 0;
  std::uint8_t anomalies = 0;
};

struct ScenarioSpec {
  std::vector<ConnectionSpec> connections;
  LinkType link_type = LinkType::Ethernet;
};

// Block of connections with per-layer durations drawn uniformly from
// inclusive nanosecond ranges.
struct GeneratorBlock {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::int64_t start_ns = 0;
  std::int64_t interval_ns = 1'000'000;
  std::vector<std::uint16_t> groups{0x001D};
  std::vector<CipherSuite> cipher_suites{CipherSuite::Aes128GcmSha256};
  std::vector<std::uint32_t> response_body_bytes{4096};
  std::array<std::pair<std::int64_t, std::int64_t>, 5> layer_ns{};
  std::uint8_t anomalies = 0;
};

std::vector<ConnectionSpec> expand(const GeneratorBlock& block);

// JSON scenario document; see docs/scenario.md. Throws Error{InvalidSpec}.
ScenarioSpec parse_scenario(std::string_view text);
ScenarioSpec load_scenario(const std::filesystem::path& path);

struct RecordLayout {
  std::uint64_t stream_offset = 0;
  ContentType content_type = ContentType::Handshake;
  std::uint16_t length = 0;
};

struct ProtectedRecord {
  bool client_to_server = true;
  std::uint64_t stream_offset = 0;
  std::uint64_t sequence = 0;
  SecretLabel label = SecretLabel::ClientHandshakeTraffic;
  ContentType inner_type = ContentType::Handshake;
  Bytes plaintext;
};

struct ExpectedConnection {
  ConnectionTimeline timeline;
  std::optional<LayerDeltas> deltas;
  ClientRandom client_random{};
  std::vector<RecordLayout> client_records;
  std::vector<RecordLayout> server_records;
  std::vector<ProtectedRecord> protected_records;
};

struct GroundTruth {
  std::vector<ExpectedConnection> connections;
};

struct SynthOutput {
  std::vector<CapturedFrame> frames;
  std::string keylog;
  GroundTruth truth;
};

// Throws Error{InvalidSpec}.
SynthOutput generate(const ScenarioSpec& spec);

void emit_capture(std::span<const CapturedFrame> frames, const std::filesystem::path& path,
                  CaptureFormat format);

// Wire rendering used by the generator. Key-share payloads are filler
// bytes of the advertised length.
Bytes render_client_hello(const ClientHelloInfo& info);
Bytes render_server_hello(const ServerHelloInfo& info);
Bytes render_record(ContentType type, ByteView body, std::uint16_t legacy_version = 0x0303);
// Encrypts one TLSInnerPlaintext with `padding` zero bytes, using and then
// advancing keys.sequence.
Bytes protect_record(ContentType inner_type, ByteView plaintext, std::size_t padding,
                     TrafficKeys& keys);

struct TcpSegmentSpec {
  IpAddress src_ip;
  IpAddress dst_ip;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint32_t seq = 0;
  std::uint32_t ack = 0;
  std::uint8_t flags = 0;
  ByteView payload;
  // Appended as-is; must be a multiple of four bytes.
  ByteView options;
};

Bytes encode_tcp_frame(LinkType link, const TcpSegmentSpec& seg);

std::string ground_truth_json(const GroundTruth& truth);

}  // namespace tlslayer::synth
