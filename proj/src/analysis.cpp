#include "tlslayer/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <thread>

#include "tlslayer/error.hpp"
#include "tlslayer/kernels.hpp"

namespace tlslayer {

namespace {

struct EpochKeys {
  std::optional<TrafficKeys> handshake;
  std::optional<TrafficKeys> application;
};

std::optional<TrafficKeys> keys_for(const KeyLogStore& store, const ClientRandom& random,
                                    SecretLabel label, CipherSuite suite) {
  const Bytes* secret = store.find(random, label);
  if (!secret) return std::nullopt;
  try {
    return derive_traffic_keys(*secret, suite);
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool contains_handshake(const DecryptedMessage& msg, std::uint8_t type) {
  if (msg.inner_type != ContentType::Handshake) return false;
  auto parts = split_handshake(msg.plaintext);
  if (!parts) return false;
  return std::any_of(parts->begin(), parts->end(),
                     [&](const HandshakeMessage& m) { return m.type == type; });
}

// Protected records of one direction, split into the handshake epoch (up to
// and including the sender's Finished) and the application epoch.
struct DirectionPlaintext {
  std::vector<DecryptedMessage> handshake;
  std::vector<DecryptedMessage> application;
  bool finished_seen = false;
  bool key_update = false;
  bool auth_failed = false;
  bool missing_app_keys = false;
  // Index into the record list where decryption stopped.
  std::size_t next_record = 0;
};

// Decrypts records in order. With `stop_when` set, application records are
// opened lazily until it returns true.
template <typename StopFn>
void decrypt_direction(const std::vector<TlsRecord>& records, std::size_t first,
                       EpochKeys keys, DirectionPlaintext& out, StopFn&& stop_when) {
  for (std::size_t i = first; i < records.size(); ++i) {
    const TlsRecord& rec = records[i];
    out.next_record = i + 1;
    if (rec.content_type == ContentType::ChangeCipherSpec) continue;
    if (rec.content_type != ContentType::ApplicationData) continue;
    TrafficKeys* k = nullptr;
    if (!out.finished_seen) {
      k = keys.handshake ? &*keys.handshake : nullptr;
    } else {
      if (!keys.application) {
        out.missing_app_keys = true;
        return;
      }
      k = &*keys.application;
    }
    if (!k) return;
    DecryptedMessage msg;
    try {
      msg = decrypt_record(rec, *k);
    } catch (const Error&) {
      out.auth_failed = true;
      return;
    }
    if (!out.finished_seen) {
      bool fin = contains_handshake(msg, handshake_type::kFinished);
      out.handshake.push_back(std::move(msg));
      if (fin) out.finished_seen = true;
      continue;
    }
    if (contains_handshake(msg, handshake_type::kKeyUpdate)) {
      out.key_update = true;
      return;
    }
    out.application.push_back(std::move(msg));
    if (stop_when(out)) return;
  }
}

std::optional<std::size_t> content_length(std::string_view head) {
  auto lower = [](char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; };
  std::size_t pos = 0;
  while (pos < head.size()) {
    auto eol = head.find("\r\n", pos);
    if (eol == std::string_view::npos) eol = head.size();
    auto line = head.substr(pos, eol - pos);
    constexpr std::string_view kName = "content-length:";
    if (line.size() > kName.size()) {
      bool match = true;
      for (std::size_t i = 0; i < kName.size() && match; ++i) match = lower(line[i]) == kName[i];
      if (match) {
        auto value = line.substr(kName.size());
        while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
        std::size_t n = 0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
        if (ec == std::errc()) return n;
      }
    }
    pos = eol + 2;
  }
  return std::nullopt;
}

// Arrival of the response's final byte, when Content-Length frames it.
std::optional<std::int64_t> last_byte_time(const DirectionalStream& stream,
                                           const std::vector<TlsRecord>& records,
                                           const std::vector<DecryptedMessage>& app,
                                           std::uint64_t response_offset) {
  auto start = std::find_if(app.begin(), app.end(), [&](const DecryptedMessage& m) {
    return m.stream_offset == response_offset;
  });
  if (start == app.end()) return std::nullopt;
  std::string head(start->plaintext.begin(), start->plaintext.end());
  auto header_end = head.find("\r\n\r\n");
  if (header_end == std::string::npos) return std::nullopt;
  auto body_len = content_length(std::string_view(head).substr(0, header_end));
  if (!body_len) return std::nullopt;
  std::size_t need = header_end + 4 + *body_len;
  std::size_t have = 0;
  for (auto it = start; it != app.end(); ++it) {
    if (it->inner_type != ContentType::ApplicationData) continue;
    have += it->plaintext.size();
    if (have >= need) {
      auto rec = std::find_if(records.begin(), records.end(), [&](const TlsRecord& r) {
        return r.stream_offset == it->stream_offset;
      });
      if (rec == records.end()) return std::nullopt;
      return timestamp_at(stream, rec->stream_offset + kRecordHeaderSize + rec->body.size() - 1);
    }
  }
  return std::nullopt;
}

}  // namespace

ConnectionTimeline analyze_connection(const TcpConnection& conn, const KeyLogStore* keys) {
  ObservedBoundaries b;
  auto finish = [&](TimelineIssue why, const ClientHelloInfo* ch, const ServerHelloInfo* sh) {
    b.stopped_by = why;
    return build_timeline(conn, ch, sh, b);
  };

  const RecordParse client = parse_records(conn.client_to_server);
  if (client.records.empty() || client.records.front().content_type != ContentType::Handshake) {
    return finish(TimelineIssue::NoClientHello, nullptr, nullptr);
  }
  ClientHelloInfo hello;
  try {
    hello = parse_client_hello(client.records.front());
  } catch (const Error&) {
    return finish(TimelineIssue::NoClientHello, nullptr, nullptr);
  }
  b.t_clienthello = client.records.front().timestamp_ns;

  const RecordParse server = parse_records(conn.server_to_client);
  auto sh_record = std::find_if(server.records.begin(), server.records.end(), [](const TlsRecord& r) {
    return r.content_type == ContentType::Handshake;
  });
  if (sh_record == server.records.end()) return finish(TimelineIssue::Undecryptable, &hello, nullptr);
  ServerHelloInfo shello;
  try {
    shello = parse_server_hello(*sh_record);
  } catch (const Error&) {
    return finish(TimelineIssue::Undecryptable, &hello, nullptr);
  }
  if (shello.hello_retry_request) return finish(TimelineIssue::HelloRetry, &hello, &shello);
  if (!keys) return finish(TimelineIssue::NoKeys, &hello, &shello);

  const auto& random = hello.client_random;
  EpochKeys client_keys{
      keys_for(*keys, random, SecretLabel::ClientHandshakeTraffic, shello.cipher_suite),
      keys_for(*keys, random, SecretLabel::ClientTraffic0, shello.cipher_suite)};
  EpochKeys server_keys{
      keys_for(*keys, random, SecretLabel::ServerHandshakeTraffic, shello.cipher_suite),
      keys_for(*keys, random, SecretLabel::ServerTraffic0, shello.cipher_suite)};
  if (!client_keys.handshake) return finish(TimelineIssue::NoKeys, &hello, &shello);

  DirectionPlaintext cplain;
  decrypt_direction(client.records, 1, client_keys, cplain, [](const DirectionPlaintext& p) {
    try {
      detect_http_request(p.application);
      return true;
    } catch (const Error&) {
      return false;
    }
  });
  try {
    b.t_client_finished = find_client_finished(cplain.handshake);
  } catch (const Error&) {
    return finish(cplain.auth_failed ? TimelineIssue::DecryptFailed : TimelineIssue::NoFinished,
                  &hello, &shello);
  }
  try {
    b.t_http_get = detect_http_request(cplain.application);
  } catch (const Error&) {
    TimelineIssue why = TimelineIssue::NoRequest;
    if (cplain.missing_app_keys) why = TimelineIssue::NoKeys;
    if (cplain.auth_failed) why = TimelineIssue::DecryptFailed;
    if (cplain.key_update) why = TimelineIssue::KeyUpdate;
    return finish(why, &hello, &shello);
  }

  // Server records are opened until the response status line is found and,
  // when Content-Length frames the body, until its final byte.
  const std::size_t first_server = static_cast<std::size_t>(sh_record - server.records.begin()) + 1;
  std::optional<std::size_t> response_need;
  std::size_t response_have = 0;
  bool response_started = false;
  const std::int64_t t_get = *b.t_http_get;
  DirectionPlaintext splain;
  decrypt_direction(server.records, first_server, server_keys, splain,
                    [&](const DirectionPlaintext& p) {
                      const auto& m = p.application.back();
                      if (m.inner_type != ContentType::ApplicationData) return false;
                      if (!response_started) {
                        std::string_view text(reinterpret_cast<const char*>(m.plaintext.data()),
                                              m.plaintext.size());
                        if (m.record_timestamp_ns < t_get || !text.starts_with("HTTP/1.")) return false;
                        response_started = true;
                        auto end = text.find("\r\n\r\n");
                        if (end == std::string_view::npos) return true;
                        auto len = content_length(text.substr(0, end));
                        if (!len) return true;
                        response_need = end + 4 + *len;
                      }
                      response_have += m.plaintext.size();
                      return response_have >= *response_need;
                    });
  if (!splain.finished_seen && !splain.auth_failed && !server_keys.handshake) {
    return finish(TimelineIssue::NoKeys, &hello, &shello);
  }
  HttpResponse response;
  try {
    response = detect_http_response(splain.application, t_get);
  } catch (const Error&) {
    TimelineIssue why = TimelineIssue::NoResponse;
    if (splain.missing_app_keys) why = TimelineIssue::NoKeys;
    if (splain.auth_failed) why = TimelineIssue::DecryptFailed;
    if (splain.key_update) why = TimelineIssue::KeyUpdate;
    return finish(why, &hello, &shello);
  }
  b.t_http_200 = response.timestamp_ns;
  b.http_status = response.status;
  try {
    b.t_last_byte = last_byte_time(conn.server_to_client, server.records, splain.application,
                                   response.stream_offset);
  } catch (const Error&) {
    b.t_last_byte.reset();
  }
  return finish(TimelineIssue::None, &hello, &shello);
}

std::vector<ConnectionTimeline> analyze_connections(std::span<const TcpConnection> connections,
                                                    const KeyLogStore* keys, unsigned workers) {
  std::vector<ConnectionTimeline> out(connections.size());
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(connections.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < connections.size(); ++i) out[i] = analyze_connection(connections[i], keys);
    return out;
  }
  const std::size_t n = connections.size();
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) out[i] = analyze_connection(connections[i], keys);
    });
  }
  return out;
}

namespace {

std::vector<double> durations_ms(std::vector<std::int64_t>& ends, std::vector<std::int64_t>& starts) {
  const auto& k = kernels::active();
  std::vector<std::int64_t> ns(ends.size());
  k.difference(ends.data(), starts.data(), ns.data(), ns.size());
  std::vector<double> ms(ns.size());
  k.ns_to_ms(ns.data(), ms.data(), ms.size());
  return ms;
}

std::optional<LayerStatistics> maybe_summary(std::vector<double> samples) {
  if (samples.empty()) return std::nullopt;
  std::sort(samples.begin(), samples.end());
  return summarize_sorted(samples);
}

template <typename T>
std::optional<T> mode_of(const std::vector<T>& values) {
  if (values.empty()) return std::nullopt;
  std::map<T, std::size_t> freq;
  for (const auto& v : values) ++freq[v];
  auto best = freq.begin();
  for (auto it = freq.begin(); it != freq.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

}  // namespace

std::vector<double> layer_samples_ms(std::span<const ConnectionTimeline> timelines, Layer layer) {
  const auto i = static_cast<std::size_t>(layer);
  std::vector<std::int64_t> starts;
  std::vector<std::int64_t> ends;
  for (const auto& tl : timelines) {
    if (!layer_duration_ns(tl, layer)) continue;
    starts.push_back(*tl.t[i]);
    ends.push_back(*tl.t[i + 1]);
  }
  return durations_ms(ends, starts);
}

std::vector<double> e2e_samples_ms(std::span<const ConnectionTimeline> timelines) {
  std::vector<std::int64_t> starts;
  std::vector<std::int64_t> ends;
  for (const auto& tl : timelines) {
    if (tl.validity != Validity::Valid) continue;
    starts.push_back(*tl.t[kSyn]);
    ends.push_back(*tl.t[kHttp200]);
  }
  return durations_ms(ends, starts);
}

RunSummary summarize_run(std::string label, std::span<const ConnectionTimeline> timelines,
                         bool decrypted) {
  RunSummary run;
  run.label = std::move(label);
  run.decrypted = decrypted;
  for (auto layer : kLayers) {
    if (!decrypted && layer != Layer::TcpHandshake && layer != Layer::TcpToTls) continue;
    run.layers[static_cast<std::size_t>(layer)] = maybe_summary(layer_samples_ms(timelines, layer));
  }
  if (decrypted) {
    run.e2e = maybe_summary(e2e_samples_ms(timelines));
    std::vector<std::int64_t> starts;
    std::vector<std::int64_t> ends;
    for (const auto& tl : timelines) {
      if (tl.validity != Validity::Valid || !tl.t_last_byte) continue;
      starts.push_back(*tl.t[kHttpGet]);
      ends.push_back(*tl.t_last_byte);
    }
    run.ttlb = maybe_summary(durations_ms(ends, starts));
  }

  run.counts.total_streams = timelines.size();
  std::vector<std::uint16_t> groups;
  std::vector<std::uint16_t> shares;
  std::vector<std::uint32_t> ch_lens;
  std::vector<std::uint32_t> sh_lens;
  std::vector<std::uint16_t> suites;
  for (const auto& tl : timelines) {
    switch (tl.validity) {
      case Validity::Valid: ++run.counts.valid; break;
      case Validity::Partial: ++run.counts.partial_by_reason[std::string(issue_name(tl.issue))]; break;
      case Validity::Excluded: ++run.counts.excluded_by_reason[std::string(issue_name(tl.issue))]; break;
    }
    if (tl.client_hello_len == 0) continue;
    ch_lens.push_back(tl.client_hello_len);
    if (tl.group) groups.push_back(tl.group);
    if (tl.key_share_len) shares.push_back(tl.key_share_len);
    if (tl.server_hello_len) sh_lens.push_back(tl.server_hello_len);
    if (tl.cipher_suite) suites.push_back(static_cast<std::uint16_t>(*tl.cipher_suite));
  }
  run.metadata.group = mode_of(groups);
  run.metadata.key_share_len = mode_of(shares);
  run.metadata.client_hello_len = mode_of(ch_lens);
  run.metadata.server_hello_len = mode_of(sh_lens);
  if (auto s = mode_of(suites)) run.metadata.cipher_suite = static_cast<CipherSuite>(*s);
  return run;
}

}  // namespace tlslayer
