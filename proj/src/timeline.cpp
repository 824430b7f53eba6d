#include "tlslayer/timeline.hpp"

#include <algorithm>
#include <charconv>
#include <string_view>

#include "tlslayer/error.hpp"

namespace tlslayer {

std::string_view layer_name(Layer layer) noexcept {
  switch (layer) {
    case Layer::TcpHandshake: return "tcp_handshake";
    case Layer::TcpToTls: return "tcp_to_tls";
    case Layer::TlsHandshake: return "tls_handshake";
    case Layer::TlsToApp: return "tls_to_app";
    case Layer::AppResponse: return "app_response";
  }
  return "";
}

std::optional<Layer> layer_from_name(std::string_view name) noexcept {
  for (auto l : kLayers) {
    if (layer_name(l) == name) return l;
  }
  return std::nullopt;
}

std::string_view issue_name(TimelineIssue issue) noexcept {
  switch (issue) {
    case TimelineIssue::None: return "none";
    case TimelineIssue::NoSynAck: return "no_synack";
    case TimelineIssue::NoClientHello: return "no_clienthello";
    case TimelineIssue::Undecryptable: return "undecryptable";
    case TimelineIssue::NoKeys: return "no_keys";
    case TimelineIssue::DecryptFailed: return "decrypt_failed";
    case TimelineIssue::KeyUpdate: return "key_update";
    case TimelineIssue::NoFinished: return "no_finished";
    case TimelineIssue::NoRequest: return "no_request";
    case TimelineIssue::NoResponse: return "no_response";
    case TimelineIssue::HelloRetry: return "hello_retry";
    case TimelineIssue::NonOkStatus: return "non_200";
    case TimelineIssue::Ordering: return "ordering";
  }
  return "";
}

std::size_t ConnectionTimeline::boundary_prefix() const noexcept {
  std::size_t n = 0;
  while (n < kBoundaryCount && t[n]) ++n;
  return n;
}

namespace {

std::string_view text_of(const DecryptedMessage& msg) {
  return {reinterpret_cast<const char*>(msg.plaintext.data()), msg.plaintext.size()};
}

bool starts_with_method(std::string_view text) {
  static constexpr std::string_view kMethods[] = {"GET ",    "POST ",    "PUT ",  "HEAD ",
                                                  "DELETE ", "OPTIONS ", "PATCH "};
  for (auto m : kMethods) {
    if (text.starts_with(m)) return true;
  }
  return text.starts_with("PRI * HTTP/2.0");
}

}  // namespace

std::int64_t detect_http_request(std::span<const DecryptedMessage> client_messages) {
  for (const auto& msg : client_messages) {
    if (msg.inner_type != ContentType::ApplicationData) continue;
    if (starts_with_method(text_of(msg))) return msg.record_timestamp_ns;
  }
  throw Error(Errc::NoRequestFound, "no HTTP request in client application data");
}

HttpResponse detect_http_response(std::span<const DecryptedMessage> server_messages,
                                  std::int64_t not_before_ns) {
  for (const auto& msg : server_messages) {
    if (msg.inner_type != ContentType::ApplicationData) continue;
    if (msg.record_timestamp_ns < not_before_ns) continue;
    auto text = text_of(msg);
    if (!text.starts_with("HTTP/1.")) continue;
    // "HTTP/1.x NNN"
    int status = 0;
    if (text.size() >= 12 && text[8] == ' ') {
      std::from_chars(text.data() + 9, text.data() + 12, status);
    }
    return {status, msg.record_timestamp_ns, msg.stream_offset};
  }
  throw Error(Errc::NoResponseFound, "no HTTP/1.x status line in server application data");
}

ConnectionTimeline build_timeline(const TcpConnection& conn, const ClientHelloInfo* hello,
                                  const ServerHelloInfo* server_hello,
                                  const ObservedBoundaries& b) {
  ConnectionTimeline tl;
  tl.t[kSyn] = conn.t_syn;
  tl.t[kSynAck] = conn.t_synack;
  tl.t[kClientHello] = b.t_clienthello;
  tl.t[kClientFinished] = b.t_client_finished;
  tl.t[kHttpGet] = b.t_http_get;
  tl.t[kHttp200] = b.t_http_200;
  tl.t_last_byte = b.t_last_byte;
  tl.http_status = b.http_status;

  if (hello) {
    tl.client_hello_len = hello->total_length;
    if (!hello->key_shares.empty()) tl.key_share_len = hello->key_shares.front().length;
  }
  if (server_hello) {
    tl.server_hello_len = server_hello->total_length;
    tl.group = server_hello->selected_group;
    tl.cipher_suite = server_hello->cipher_suite;
    if (hello) {
      for (const auto& ks : hello->key_shares) {
        if (ks.group == server_hello->selected_group) tl.key_share_len = ks.length;
      }
    }
  } else if (hello && !hello->key_shares.empty()) {
    tl.group = hello->key_shares.front().group;
  }

  auto exclude = [&](TimelineIssue why) {
    tl.validity = Validity::Excluded;
    tl.issue = why;
    return tl;
  };

  if (!tl.t[kSynAck]) return exclude(TimelineIssue::NoSynAck);
  if (server_hello && server_hello->hello_retry_request) return exclude(TimelineIssue::HelloRetry);
  if (b.http_status && *b.http_status != 200) return exclude(TimelineIssue::NonOkStatus);

  const std::size_t prefix = tl.boundary_prefix();
  for (std::size_t i = 1; i < prefix; ++i) {
    if (*tl.t[i] < *tl.t[i - 1]) return exclude(TimelineIssue::Ordering);
  }
  if (prefix == kBoundaryCount) {
    tl.validity = Validity::Valid;
    tl.issue = TimelineIssue::None;
    return tl;
  }

  static constexpr TimelineIssue kMissing[kBoundaryCount] = {
      TimelineIssue::NoSynAck,    TimelineIssue::NoSynAck,  TimelineIssue::NoClientHello,
      TimelineIssue::NoFinished,  TimelineIssue::NoRequest, TimelineIssue::NoResponse};
  tl.validity = Validity::Partial;
  tl.issue = b.stopped_by != TimelineIssue::None ? b.stopped_by : kMissing[prefix];
  return tl;
}

LayerDeltas compute_deltas(const ConnectionTimeline& timeline) {
  if (timeline.validity != Validity::Valid || timeline.boundary_prefix() != kBoundaryCount) {
    throw Error(Errc::InvalidTimeline, std::string(issue_name(timeline.issue)));
  }
  LayerDeltas d;
  for (std::size_t i = 0; i < d.layer_ns.size(); ++i) {
    d.layer_ns[i] = *timeline.t[i + 1] - *timeline.t[i];
    if (d.layer_ns[i] < 0) throw Error(Errc::InvalidTimeline, "negative layer delta");
  }
  d.e2e_ns = *timeline.t[kHttp200] - *timeline.t[kSyn];
  return d;
}

std::optional<std::int64_t> layer_duration_ns(const ConnectionTimeline& timeline, Layer layer) {
  if (timeline.validity == Validity::Excluded) return std::nullopt;
  auto i = static_cast<std::size_t>(layer);
  if (timeline.boundary_prefix() < i + 2) return std::nullopt;
  return *timeline.t[i + 1] - *timeline.t[i];
}

}  // namespace tlslayer
