#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "tlslayer/crypto.hpp"
#include "tlslayer/reassembly.hpp"
#include "tlslayer/tls.hpp"

namespace tlslayer {

enum class Layer : std::uint8_t {
  TcpHandshake,
  TcpToTls,
  TlsHandshake,
  TlsToApp,
  AppResponse,
};

inline constexpr std::array kLayers{Layer::TcpHandshake, Layer::TcpToTls, Layer::TlsHandshake,
                                    Layer::TlsToApp, Layer::AppResponse};

std::string_view layer_name(Layer layer) noexcept;
std::optional<Layer> layer_from_name(std::string_view name) noexcept;

enum class Validity : std::uint8_t { Valid, Partial, Excluded };

enum class TimelineIssue : std::uint8_t {
  None,
  NoSynAck,
  NoClientHello,
  Undecryptable,
  NoKeys,
  DecryptFailed,
  KeyUpdate,
  NoFinished,
  NoRequest,
  NoResponse,
  HelloRetry,
  NonOkStatus,
  Ordering,
};

std::string_view issue_name(TimelineIssue issue) noexcept;

// Boundary indices in connection order.
enum Boundary : std::size_t { kSyn, kSynAck, kClientHello, kClientFinished, kHttpGet, kHttp200 };
inline constexpr std::size_t kBoundaryCount = 6;

struct ConnectionTimeline {
  std::array<std::optional<std::int64_t>, kBoundaryCount> t{};
  // Arrival of the final response byte; informational only.
  std::optional<std::int64_t> t_last_byte;
  std::uint16_t group = 0;
  std::uint32_t client_hello_len = 0;
  std::uint32_t server_hello_len = 0;
  std::uint16_t key_share_len = 0;
  std::optional<CipherSuite> cipher_suite;
  std::optional<int> http_status;
  Validity validity = Validity::Partial;
  TimelineIssue issue = TimelineIssue::None;

  // Number of leading boundaries present, i.e. layers measurable + 1.
  std::size_t boundary_prefix() const noexcept;
  bool operator==(const ConnectionTimeline&) const = default;
};

// Exact nanosecond deltas; milliseconds are derived on demand.
struct LayerDeltas {
  std::array<std::int64_t, 5> layer_ns{};
  std::int64_t e2e_ns = 0;

  double layer_ms(Layer layer) const noexcept {
    return static_cast<double>(layer_ns[static_cast<std::size_t>(layer)]) / 1e6;
  }
  double e2e_ms() const noexcept { return static_cast<double>(e2e_ns) / 1e6; }
  bool operator==(const LayerDeltas&) const = default;
};

// Status-line arrival of the first response to the measured request.
struct HttpResponse {
  int status = 0;
  std::int64_t timestamp_ns = 0;
  std::uint64_t stream_offset = 0;
};

// Throws Error{NoRequestFound}.
std::int64_t detect_http_request(std::span<const DecryptedMessage> client_messages);
// Throws Error{NoResponseFound}.
HttpResponse detect_http_response(std::span<const DecryptedMessage> server_messages,
                                  std::int64_t not_before_ns);

// Boundaries recovered past the TCP handshake, plus why recovery stopped.
struct ObservedBoundaries {
  std::optional<std::int64_t> t_clienthello;
  std::optional<std::int64_t> t_client_finished;
  std::optional<std::int64_t> t_http_get;
  std::optional<std::int64_t> t_http_200;
  std::optional<std::int64_t> t_last_byte;
  std::optional<int> http_status;
  TimelineIssue stopped_by = TimelineIssue::None;
};

ConnectionTimeline build_timeline(const TcpConnection& conn, const ClientHelloInfo* hello,
                                  const ServerHelloInfo* server_hello,
                                  const ObservedBoundaries& boundaries);

// Throws Error{InvalidTimeline} unless the timeline is valid.
LayerDeltas compute_deltas(const ConnectionTimeline& timeline);

// Duration of one layer when this timeline contributes to it.
std::optional<std::int64_t> layer_duration_ns(const ConnectionTimeline& timeline, Layer layer);

}  // namespace tlslayer
