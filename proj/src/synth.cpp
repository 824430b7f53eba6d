#include "tlslayer/synth.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "json.hpp"
#include "tlslayer/error.hpp"
#include "tlslayer/groups.hpp"

namespace tlslayer::synth {

namespace {

constexpr std::size_t kMss = 1448;
constexpr std::size_t kMinSegment = 160;
constexpr std::size_t kResponseChunk = 1500;
constexpr std::int64_t kResponseSpacingNs = 3'000;
constexpr std::int64_t kRetransmitDelayNs = 5'000'000;
constexpr std::uint16_t kServerPort = 443;
constexpr std::size_t kCertificateBytes = 1024;

struct NamedAnomaly {
  std::string_view name;
  std::uint8_t bit;
};
constexpr NamedAnomaly kAnomalies[] = {{"retransmit", anomaly::kRetransmit},
                                       {"reorder", anomaly::kReorder},
                                       {"drop_keylog", anomaly::kDropKeylog},
                                       {"truncate", anomaly::kTruncate},
                                       {"non200", anomaly::kNon200}};

std::uint8_t filler_for(std::uint16_t group) { return static_cast<std::uint8_t>(0xA0 ^ (group & 0xff)); }

}  // namespace

std::optional<std::uint8_t> anomaly_from_name(std::string_view name) noexcept {
  for (const auto& a : kAnomalies) {
    if (a.name == name) return a.bit;
  }
  return std::nullopt;
}

std::vector<std::string> anomaly_names(std::uint8_t mask) {
  std::vector<std::string> out;
  for (const auto& a : kAnomalies) {
    if (mask & a.bit) out.emplace_back(a.name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wire rendering

Bytes render_client_hello(const ClientHelloInfo& info) {
  ByteWriter w;
  w.u8(handshake_type::kClientHello);
  auto body = w.open_length(3);
  w.u16(0x0303);
  w.append(info.client_random);
  w.u8(32);
  w.fill(32, 0x5A);
  auto suites = w.open_length(2);
  for (auto s : info.cipher_suites) w.u16(s);
  w.close_length(suites, 2);
  w.u8(1);
  w.u8(0);
  if (!info.offered_groups.empty() || !info.key_shares.empty()) {
    auto exts = w.open_length(2);
    w.u16(extension_type::kSupportedVersions);
    w.u16(3);
    w.u8(2);
    w.u16(0x0304);
    if (!info.offered_groups.empty()) {
      w.u16(extension_type::kSupportedGroups);
      auto ext = w.open_length(2);
      auto list = w.open_length(2);
      for (auto g : info.offered_groups) w.u16(g);
      w.close_length(list, 2);
      w.close_length(ext, 2);
    }
    // signature_algorithms: rsa_pss_rsae_sha256, rsa_pkcs1_sha256
    w.u16(13);
    w.u16(6);
    w.u16(4);
    w.u16(0x0804);
    w.u16(0x0401);
    if (!info.key_shares.empty()) {
      w.u16(extension_type::kKeyShare);
      auto ext = w.open_length(2);
      auto list = w.open_length(2);
      for (const auto& ks : info.key_shares) {
        w.u16(ks.group);
        w.u16(ks.length);
        w.fill(ks.length, filler_for(ks.group));
      }
      w.close_length(list, 2);
      w.close_length(ext, 2);
    }
    w.close_length(exts, 2);
  }
  w.close_length(body, 3);
  return std::move(w).take();
}

Bytes render_server_hello(const ServerHelloInfo& info) {
  ByteWriter w;
  w.u8(handshake_type::kServerHello);
  auto body = w.open_length(3);
  w.u16(0x0303);
  w.append(info.hello_retry_request ? kHelloRetryRandom : info.server_random);
  w.u8(32);
  w.fill(32, 0x5A);
  w.u16(static_cast<std::uint16_t>(info.cipher_suite));
  w.u8(0);
  auto exts = w.open_length(2);
  w.u16(extension_type::kSupportedVersions);
  w.u16(2);
  w.u16(0x0304);
  w.u16(extension_type::kKeyShare);
  auto ext = w.open_length(2);
  w.u16(info.selected_group);
  if (!info.hello_retry_request) {
    w.u16(info.key_share_length);
    w.fill(info.key_share_length, filler_for(info.selected_group) ^ 0xFF);
  }
  w.close_length(ext, 2);
  w.close_length(exts, 2);
  w.close_length(body, 3);
  return std::move(w).take();
}

Bytes render_record(ContentType type, ByteView body, std::uint16_t legacy_version) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(type));
  w.u16(legacy_version);
  w.u16(static_cast<std::uint16_t>(body.size()));
  w.append(body);
  return std::move(w).take();
}

namespace {

struct CtxFree {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};

const EVP_CIPHER* cipher_of(CipherSuite suite) {
  switch (suite) {
    case CipherSuite::Aes128GcmSha256: return EVP_aes_128_gcm();
    case CipherSuite::Aes256GcmSha384: return EVP_aes_256_gcm();
    case CipherSuite::Chacha20Poly1305Sha256: return EVP_chacha20_poly1305();
  }
  return nullptr;
}

}  // namespace

Bytes protect_record(ContentType inner_type, ByteView plaintext, std::size_t padding,
                     TrafficKeys& keys) {
  Bytes inner(plaintext.begin(), plaintext.end());
  inner.push_back(static_cast<std::uint8_t>(inner_type));
  inner.insert(inner.end(), padding, 0);

  constexpr std::size_t kTag = 16;
  const auto record_len = static_cast<std::uint16_t>(inner.size() + kTag);
  const std::uint8_t header[5] = {23, 0x03, 0x03, static_cast<std::uint8_t>(record_len >> 8),
                                  static_cast<std::uint8_t>(record_len)};
  std::array<std::uint8_t, 12> nonce = keys.iv;
  for (int i = 0; i < 8; ++i) nonce[4 + i] ^= static_cast<std::uint8_t>(keys.sequence >> (56 - 8 * i));

  std::unique_ptr<EVP_CIPHER_CTX, CtxFree> ctx(EVP_CIPHER_CTX_new());
  Bytes out(header, header + 5);
  out.resize(5 + inner.size() + kTag);
  int len = 0;
  bool ok = ctx && EVP_EncryptInit_ex(ctx.get(), cipher_of(keys.suite), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_IVLEN, 12, nullptr) == 1 &&
            EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, keys.key.data(), nonce.data()) == 1 &&
            EVP_EncryptUpdate(ctx.get(), nullptr, &len, header, 5) == 1 &&
            EVP_EncryptUpdate(ctx.get(), out.data() + 5, &len, inner.data(),
                              static_cast<int>(inner.size())) == 1 &&
            EVP_EncryptFinal_ex(ctx.get(), out.data() + 5 + len, &len) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, kTag,
                                out.data() + 5 + inner.size()) == 1;
  if (!ok) throw Error(Errc::CryptoBackend, "record encryption");
  ++keys.sequence;
  return out;
}

// ---------------------------------------------------------------------------
// Frames

namespace {

std::uint32_t checksum_add(std::uint32_t sum, ByteView data) {
  for (std::size_t i = 0; i + 1 < data.size(); i += 2) sum += (data[i] << 8) | data[i + 1];
  if (data.size() % 2) sum += data.back() << 8;
  return sum;
}

std::uint16_t checksum_fold(std::uint32_t sum) {
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

}  // namespace

Bytes encode_tcp_frame(LinkType link, const TcpSegmentSpec& seg) {
  ByteWriter tcp;
  tcp.u16(seg.src_port);
  tcp.u16(seg.dst_port);
  tcp.u32(seg.seq);
  tcp.u32(seg.ack);
  tcp.u8(static_cast<std::uint8_t>(((20 + seg.options.size()) / 4) << 4));
  tcp.u8(seg.flags);
  tcp.u16(0xFFFF);
  tcp.u16(0);
  tcp.u16(0);
  tcp.append(seg.options);
  tcp.append(seg.payload);
  Bytes segment = std::move(tcp).take();

  const std::uint8_t pseudo[12] = {seg.src_ip.octets[0], seg.src_ip.octets[1], seg.src_ip.octets[2],
                                   seg.src_ip.octets[3], seg.dst_ip.octets[0], seg.dst_ip.octets[1],
                                   seg.dst_ip.octets[2], seg.dst_ip.octets[3], 0, 6,
                                   static_cast<std::uint8_t>(segment.size() >> 8),
                                   static_cast<std::uint8_t>(segment.size())};
  std::uint16_t tcp_sum = checksum_fold(checksum_add(checksum_add(0, pseudo), segment));
  segment[16] = static_cast<std::uint8_t>(tcp_sum >> 8);
  segment[17] = static_cast<std::uint8_t>(tcp_sum);

  ByteWriter ip;
  ip.u8(0x45);
  ip.u8(0);
  ip.u16(static_cast<std::uint16_t>(20 + segment.size()));
  ip.u16(0);
  ip.u16(0x4000);
  ip.u8(64);
  ip.u8(6);
  ip.u16(0);
  ip.append(ByteView(seg.src_ip.octets.data(), 4));
  ip.append(ByteView(seg.dst_ip.octets.data(), 4));
  Bytes ip_header = std::move(ip).take();
  std::uint16_t ip_sum = checksum_fold(checksum_add(0, ip_header));
  ip_header[10] = static_cast<std::uint8_t>(ip_sum >> 8);
  ip_header[11] = static_cast<std::uint8_t>(ip_sum);

  ByteWriter frame;
  switch (link) {
    case LinkType::Ethernet:
      for (std::uint8_t b : {0x02, 0x00, 0x00, 0x00, 0x00, 0x02}) frame.u8(b);
      for (std::uint8_t b : {0x02, 0x00, 0x00, 0x00, 0x00, 0x01}) frame.u8(b);
      frame.u16(0x0800);
      break;
    case LinkType::LinuxSLL:
      frame.u16(0);
      frame.u16(1);
      frame.u16(6);
      for (std::uint8_t b : {0x02, 0x00, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00}) frame.u8(b);
      frame.u16(0x0800);
      break;
    case LinkType::RawIP: break;
  }
  frame.append(ip_header);
  frame.append(segment);
  return std::move(frame).take();
}

// ---------------------------------------------------------------------------
// Scenario expansion and parsing

std::vector<ConnectionSpec> expand(const GeneratorBlock& block) {
  if (block.groups.empty() || block.cipher_suites.empty() || block.response_body_bytes.empty()) {
    throw Error(Errc::InvalidSpec, "generator block needs groups, suites and body sizes");
  }
  std::mt19937_64 rng(block.seed);
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw Error(Errc::InvalidSpec, "layer range with hi < lo");
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  std::vector<ConnectionSpec> out;
  out.reserve(block.count);
  for (std::size_t i = 0; i < block.count; ++i) {
    ConnectionSpec c;
    c.boundary_ns[0] = block.start_ns + static_cast<std::int64_t>(i) * block.interval_ns;
    for (std::size_t l = 0; l < 5; ++l) {
      c.boundary_ns[l + 1] = c.boundary_ns[l] + pick(block.layer_ns[l].first, block.layer_ns[l].second);
    }
    c.group = block.groups[rng() % block.groups.size()];
    c.cipher_suite = block.cipher_suites[rng() % block.cipher_suites.size()];
    c.response_body_bytes = block.response_body_bytes[rng() % block.response_body_bytes.size()];
    c.segmentation_seed = rng();
    c.anomalies = block.anomalies;
    out.push_back(c);
  }
  return out;
}

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::InvalidSpec, what); }

std::uint16_t group_of(const json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint16_t>();
  auto g = find_group(j.get<std::string>());
  if (!g) invalid("unknown group " + j.dump());
  return g->id;
}

CipherSuite suite_of(const json& j) {
  auto s = cipher_suite_from_name(j.get<std::string>());
  if (!s) invalid("unknown cipher suite " + j.dump());
  return *s;
}

std::uint8_t anomalies_of(const json& j) {
  std::uint8_t mask = 0;
  for (const auto& a : j) {
    auto bit = anomaly_from_name(a.get<std::string>());
    if (!bit) invalid("unknown anomaly " + a.dump());
    mask |= *bit;
  }
  return mask;
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text) {
  ScenarioSpec spec;
  try {
    json doc = json::parse(text);
    if (doc.contains("link_type")) {
      auto lt = doc.at("link_type").get<std::string>();
      if (lt == "ethernet") {
        spec.link_type = LinkType::Ethernet;
      } else if (lt == "raw") {
        spec.link_type = LinkType::RawIP;
      } else if (lt == "sll") {
        spec.link_type = LinkType::LinuxSLL;
      } else {
        invalid("unknown link_type " + lt);
      }
    }
    for (const auto& c : doc.value("connections", json::array())) {
      ConnectionSpec cs;
      const auto& b = c.at("boundaries_ns");
      if (b.size() != 6) invalid("boundaries_ns needs six values");
      for (std::size_t i = 0; i < 6; ++i) cs.boundary_ns[i] = b[i].get<std::int64_t>();
      if (c.contains("group")) cs.group = group_of(c["group"]);
      if (c.contains("cipher_suite")) cs.cipher_suite = suite_of(c["cipher_suite"]);
      cs.response_body_bytes = c.value("response_body_bytes", 4096u);
      cs.segmentation_seed = c.value("segmentation_seed", std::uint64_t{0});
      if (c.contains("anomalies")) cs.anomalies = anomalies_of(c["anomalies"]);
      spec.connections.push_back(cs);
    }
    for (const auto& g : doc.value("generate", json::array())) {
      GeneratorBlock block;
      block.count = g.at("count").get<std::size_t>();
      block.seed = g.value("seed", std::uint64_t{0});
      block.start_ns = g.value("start_ns", std::int64_t{0});
      block.interval_ns = g.value("interval_ns", std::int64_t{1'000'000});
      if (g.contains("groups")) {
        block.groups.clear();
        for (const auto& x : g["groups"]) block.groups.push_back(group_of(x));
      }
      if (g.contains("cipher_suites")) {
        block.cipher_suites.clear();
        for (const auto& x : g["cipher_suites"]) block.cipher_suites.push_back(suite_of(x));
      }
      if (g.contains("response_body_bytes")) {
        block.response_body_bytes = g["response_body_bytes"].get<std::vector<std::uint32_t>>();
      }
      const auto& ranges = g.at("layer_ns");
      for (auto layer : kLayers) {
        const auto& r = ranges.at(std::string(layer_name(layer)));
        block.layer_ns[static_cast<std::size_t>(layer)] = {r.at(0).get<std::int64_t>(),
                                                           r.at(1).get<std::int64_t>()};
      }
      if (g.contains("anomalies")) block.anomalies = anomalies_of(g["anomalies"]);
      auto more = expand(block);
      spec.connections.insert(spec.connections.end(), more.begin(), more.end());
    }
  } catch (const json::exception& e) {
    invalid(e.what());
  }
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::UnreadableFile, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

// ---------------------------------------------------------------------------
// Generation

namespace {

struct PendingFrame {
  std::int64_t ts;
  std::uint64_t order;
  CapturedFrame frame;
};

struct Endpoint {
  IpAddress ip;
  std::uint16_t port;
  std::uint32_t next_seq;
};

const Bytes kDataOptions = {0x01, 0x01, 0x08, 0x0A, 0, 0, 0, 1, 0, 0, 0, 0};
const Bytes kSynOptions = {0x02, 0x04, 0x05, 0xB4, 0x04, 0x02, 0x08, 0x0A, 0, 0,
                           0,    1,    0,    0,    0,    0,    0x01, 0x03, 0x03, 0x07};

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

class ConnectionWriter {
 public:
  ConnectionWriter(const ConnectionSpec& spec, std::size_t index, LinkType link,
                   std::vector<PendingFrame>& frames, std::uint64_t& order)
      : spec_(spec), link_(link), frames_(frames), order_(order),
        rng_(seeded(spec.segmentation_seed, index)) {
    auto i = static_cast<std::uint32_t>(index);
    client_ = {IpAddress::v4(10, static_cast<std::uint8_t>(i >> 16), static_cast<std::uint8_t>(i >> 8),
                             static_cast<std::uint8_t>(i)),
               static_cast<std::uint16_t>(20000 + i % 40000), static_cast<std::uint32_t>(rng_())};
    server_ = {IpAddress::v4(192, 168, 100, 10), kServerPort, static_cast<std::uint32_t>(rng_())};
  }

  std::mt19937_64& rng() { return rng_; }

  void control(bool from_client, std::int64_t ts, std::uint8_t flags) {
    Endpoint& src = from_client ? client_ : server_;
    Endpoint& dst = from_client ? server_ : client_;
    bool syn = flags & tcp_flag::kSyn;
    TcpSegmentSpec seg{src.ip, dst.ip, src.port, dst.port, syn ? src.next_seq : src.next_seq + 1,
                       (flags & tcp_flag::kAck) ? dst.next_seq + 1 : 0, flags, {},
                       syn ? ByteView(kSynOptions) : ByteView(kDataOptions)};
    push(ts, encode_tcp_frame(link_, seg));
    if (flags & tcp_flag::kFin) ++src.next_seq;
  }

  struct SentSegment {
    std::uint64_t offset;
    std::size_t length;
    std::int64_t ts;
    Bytes frame;
  };

  // Segments `bytes` at stream offset `stream_offset`. Segment k is stamped
  // ts + k * spacing. Returns the segments without queueing them.
  std::vector<SentSegment> segment(bool from_client, ByteView bytes, std::uint64_t stream_offset,
                                   std::int64_t ts, std::int64_t spacing) {
    Endpoint& src = from_client ? client_ : server_;
    Endpoint& dst = from_client ? server_ : client_;
    std::vector<SentSegment> out;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
      std::size_t len = kMinSegment + rng_() % (kMss - kMinSegment + 1);
      len = std::min(len, bytes.size() - pos);
      auto seq = static_cast<std::uint32_t>(src.next_seq + 1 + stream_offset + pos);
      TcpSegmentSpec seg{src.ip, dst.ip, src.port, dst.port, seq, dst.next_seq + 1,
                         static_cast<std::uint8_t>(tcp_flag::kAck | tcp_flag::kPsh),
                         bytes.subspan(pos, len), kDataOptions};
      out.push_back({stream_offset + pos, len, ts + static_cast<std::int64_t>(out.size()) * spacing,
                     encode_tcp_frame(link_, seg)});
      pos += len;
    }
    return out;
  }

  void push(std::int64_t ts, Bytes frame) {
    CapturedFrame f;
    f.timestamp_ns = ts;
    f.link_type = link_;
    f.original_length = static_cast<std::uint32_t>(frame.size());
    f.data = std::move(frame);
    frames_.push_back({ts, order_++, std::move(f)});
  }

  void queue(std::vector<SentSegment>& segs, bool reversed) {
    if (reversed) std::reverse(segs.begin(), segs.end());
    for (auto& s : segs) push(s.ts, std::move(s.frame));
  }

  // Stream bytes are numbered from ISN + 1; FIN consumes one more.
  void close_stream_offsets(std::uint64_t client_bytes, std::uint64_t server_bytes) {
    client_.next_seq += static_cast<std::uint32_t>(client_bytes);
    server_.next_seq += static_cast<std::uint32_t>(server_bytes);
  }

 private:
  const ConnectionSpec& spec_;
  LinkType link_;
  std::vector<PendingFrame>& frames_;
  std::uint64_t& order_;
  std::mt19937_64 rng_;
  Endpoint client_;
  Endpoint server_;
};

void validate(const ConnectionSpec& c) {
  if (c.boundary_ns[0] < 0) invalid("negative SYN time");
  for (std::size_t i = 1; i < 6; ++i) {
    if (c.boundary_ns[i] < c.boundary_ns[i - 1]) invalid("boundary times out of order");
  }
  if (!find_group(c.group)) invalid("unknown group " + group_name(c.group));
  if (c.response_body_bytes > (64u << 20)) invalid("response body too large");
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng() >> 56);
  return out;
}

Bytes handshake_message(std::uint8_t type, ByteView body) {
  ByteWriter w;
  w.u8(type);
  w.u24(static_cast<std::uint32_t>(body.size()));
  w.append(body);
  return std::move(w).take();
}

struct DirectionBuilder {
  Bytes bytes;
  std::vector<RecordLayout> layout;

  std::uint64_t append_record(const Bytes& record) {
    std::uint64_t offset = bytes.size();
    layout.push_back({offset, static_cast<ContentType>(record[0]),
                      static_cast<std::uint16_t>(record.size() - kRecordHeaderSize)});
    bytes.insert(bytes.end(), record.begin(), record.end());
    return offset;
  }
};

}  // namespace

SynthOutput generate(const ScenarioSpec& spec) {
  for (const auto& c : spec.connections) validate(c);

  SynthOutput out;
  std::vector<PendingFrame> frames;
  std::uint64_t order = 0;
  std::ostringstream keylog;

  for (std::size_t index = 0; index < spec.connections.size(); ++index) {
    const ConnectionSpec& c = spec.connections[index];
    const auto& t = c.boundary_ns;
    const bool drop_keylog = c.anomalies & anomaly::kDropKeylog;
    const bool truncate = c.anomalies & anomaly::kTruncate;
    const bool non200 = c.anomalies & anomaly::kNon200;
    const bool reorder = c.anomalies & anomaly::kReorder;
    const bool retransmit = c.anomalies & anomaly::kRetransmit;

    ConnectionWriter conn(c, index, spec.link_type, frames, order);
    auto& rng = conn.rng();
    ExpectedConnection truth;

    ClientHelloInfo ch;
    std::copy_n(random_bytes(rng, 32).begin(), 32, ch.client_random.begin());
    truth.client_random = ch.client_random;
    ch.cipher_suites = {0x1301, 0x1302, 0x1303};
    ch.offered_groups = {c.group, group_id::kX25519};
    if (c.group == group_id::kX25519) ch.offered_groups.pop_back();
    ch.key_shares = {{c.group, expected_key_share_size(c.group)}};
    const Bytes ch_bytes = render_client_hello(ch);

    ServerHelloInfo sh;
    std::copy_n(random_bytes(rng, 32).begin(), 32, sh.server_random.begin());
    sh.selected_group = c.group;
    sh.cipher_suite = c.cipher_suite;
    sh.key_share_length = expected_server_share_size(c.group);
    const Bytes sh_bytes = render_server_hello(sh);

    const std::size_t hash_len = hash_length(suite_hash(c.cipher_suite));
    const std::array<std::pair<SecretLabel, Bytes>, 4> secrets{{
        {SecretLabel::ClientHandshakeTraffic, random_bytes(rng, hash_len)},
        {SecretLabel::ServerHandshakeTraffic, random_bytes(rng, hash_len)},
        {SecretLabel::ClientTraffic0, random_bytes(rng, hash_len)},
        {SecretLabel::ServerTraffic0, random_bytes(rng, hash_len)},
    }};
    if (!drop_keylog) {
      for (const auto& [label, secret] : secrets) {
        keylog << label_name(label) << ' ' << to_hex(ch.client_random) << ' ' << to_hex(secret) << '\n';
      }
    }
    TrafficKeys client_hs = derive_traffic_keys(secrets[0].second, c.cipher_suite);
    TrafficKeys server_hs = derive_traffic_keys(secrets[1].second, c.cipher_suite);
    TrafficKeys client_app = derive_traffic_keys(secrets[2].second, c.cipher_suite);
    TrafficKeys server_app = derive_traffic_keys(secrets[3].second, c.cipher_suite);

    DirectionBuilder client_dir;
    DirectionBuilder server_dir;
    auto protect = [&](bool from_client, SecretLabel label, TrafficKeys& keys, ContentType inner,
                       const Bytes& plain) {
      std::size_t padding = rng() % 4;
      std::uint64_t seq = keys.sequence;
      Bytes rec = protect_record(inner, plain, padding, keys);
      auto& dir = from_client ? client_dir : server_dir;
      std::uint64_t off = dir.append_record(rec);
      truth.protected_records.push_back({from_client, off, seq, label, inner, plain});
    };
    const Bytes ccs = render_record(ContentType::ChangeCipherSpec, Bytes{1});

    // Client flight 1: ClientHello.
    client_dir.append_record(render_record(ContentType::Handshake, ch_bytes, 0x0301));
    const std::uint64_t c1_end = client_dir.bytes.size();

    // Server flight 1: ServerHello and the encrypted handshake.
    server_dir.append_record(render_record(ContentType::Handshake, sh_bytes));
    server_dir.append_record(ccs);
    protect(false, SecretLabel::ServerHandshakeTraffic, server_hs, ContentType::Handshake,
            handshake_message(handshake_type::kEncryptedExtensions, Bytes{0, 0}));
    {
      ByteWriter cert;
      cert.u8(0);
      auto list = cert.open_length(3);
      auto entry = cert.open_length(3);
      cert.fill(kCertificateBytes, 0x30);
      cert.close_length(entry, 3);
      cert.u16(0);
      cert.close_length(list, 3);
      protect(false, SecretLabel::ServerHandshakeTraffic, server_hs, ContentType::Handshake,
              handshake_message(handshake_type::kCertificate, cert.bytes()));
    }
    {
      ByteWriter cv;
      cv.u16(0x0804);
      cv.u16(256);
      cv.append(random_bytes(rng, 256));
      protect(false, SecretLabel::ServerHandshakeTraffic, server_hs, ContentType::Handshake,
              handshake_message(handshake_type::kCertificateVerify, cv.bytes()));
    }
    protect(false, SecretLabel::ServerHandshakeTraffic, server_hs, ContentType::Handshake,
            handshake_message(handshake_type::kFinished, random_bytes(rng, hash_len)));
    const std::uint64_t s1_end = server_dir.bytes.size();

    // Client flight 2: CCS and Finished.
    client_dir.append_record(ccs);
    protect(true, SecretLabel::ClientHandshakeTraffic, client_hs, ContentType::Handshake,
            handshake_message(handshake_type::kFinished, random_bytes(rng, hash_len)));
    const std::uint64_t c2_end = client_dir.bytes.size();

    // Client flight 3: the request.
    const std::string request =
        "GET /customers HTTP/1.1\r\nHost: backend.local\r\nUser-Agent: tlslayer-synth\r\n"
        "Accept: */*\r\n\r\n";
    protect(true, SecretLabel::ClientTraffic0, client_app, ContentType::ApplicationData,
            Bytes(request.begin(), request.end()));
    const std::uint64_t c3_end = client_dir.bytes.size();

    // Server flight 2: NewSessionTicket after the client Finished.
    {
      ByteWriter nst;
      nst.u32(7200);
      nst.u32(static_cast<std::uint32_t>(rng()));
      nst.u8(8);
      nst.append(random_bytes(rng, 8));
      nst.u16(64);
      nst.append(random_bytes(rng, 64));
      nst.u16(0);
      protect(false, SecretLabel::ServerTraffic0, server_app, ContentType::Handshake,
              handshake_message(handshake_type::kNewSessionTicket, nst.bytes()));
    }
    const std::uint64_t s2_end = server_dir.bytes.size();

    // Server flight 3: the response.
    const int status = non200 ? 503 : 200;
    std::string head = non200 ? "HTTP/1.1 503 Service Unavailable\r\n" : "HTTP/1.1 200 OK\r\n";
    head += "Server: tlslayer-synth\r\nContent-Type: application/octet-stream\r\nContent-Length: " +
            std::to_string(c.response_body_bytes) + "\r\n\r\n";
    Bytes response(head.begin(), head.end());
    for (std::uint32_t i = 0; i < c.response_body_bytes; ++i) {
      response.push_back(static_cast<std::uint8_t>('a' + i % 26));
    }
    for (std::size_t pos = 0; pos < response.size(); pos += kResponseChunk) {
      std::size_t n = std::min(kResponseChunk, response.size() - pos);
      protect(false, SecretLabel::ServerTraffic0, server_app, ContentType::ApplicationData,
              Bytes(response.begin() + static_cast<std::ptrdiff_t>(pos),
                    response.begin() + static_cast<std::ptrdiff_t>(pos + n)));
    }
    const std::uint64_t s3_end = server_dir.bytes.size();

    // TCP handshake.
    conn.control(true, t[kSyn], tcp_flag::kSyn);
    conn.control(false, t[kSynAck], tcp_flag::kSyn | tcp_flag::kAck);
    conn.control(true, t[kSynAck], tcp_flag::kAck);

    auto view = [](const Bytes& b, std::uint64_t begin, std::uint64_t end) {
      return ByteView(b).subspan(begin, end - begin);
    };
    const std::int64_t t_server_flight = t[kClientHello] + (t[kClientFinished] - t[kClientHello]) / 2;
    const std::int64_t t_ticket = t[kClientFinished] + (t[kHttpGet] - t[kClientFinished]) / 2;

    auto c1 = conn.segment(true, view(client_dir.bytes, 0, c1_end), 0, t[kClientHello], 0);
    if (retransmit) conn.push(c1.front().ts + kRetransmitDelayNs, c1.front().frame);
    conn.queue(c1, reorder);
    auto s1 = conn.segment(false, view(server_dir.bytes, 0, s1_end), 0, t_server_flight, 0);
    conn.queue(s1, reorder);
    if (t[kHttpGet] == t[kClientFinished]) {
      // Finished and request leave in one flight.
      auto c23 = conn.segment(true, view(client_dir.bytes, c1_end, c3_end), c1_end, t[kClientFinished], 0);
      conn.queue(c23, reorder);
    } else {
      auto c2 = conn.segment(true, view(client_dir.bytes, c1_end, c2_end), c1_end, t[kClientFinished], 0);
      conn.queue(c2, reorder);
      auto c3 = conn.segment(true, view(client_dir.bytes, c2_end, c3_end), c2_end, t[kHttpGet], 0);
      conn.queue(c3, reorder);
    }

    std::int64_t t_last = t[kHttpGet];
    std::optional<std::int64_t> t_last_byte;
    if (!truncate) {
      auto s2 = conn.segment(false, view(server_dir.bytes, s1_end, s2_end), s1_end, t_ticket, 0);
      conn.queue(s2, reorder);
      auto s3 = conn.segment(false, view(server_dir.bytes, s2_end, s3_end), s2_end, t[kHttp200],
                             kResponseSpacingNs);
      t_last_byte = s3.back().ts;
      t_last = s3.back().ts;
      if (retransmit) {
        const auto& again = s3[std::min<std::size_t>(1, s3.size() - 1)];
        conn.push(again.ts + kRetransmitDelayNs, again.frame);
      }
      conn.queue(s3, reorder);
      conn.close_stream_offsets(c3_end, s3_end);
      conn.control(true, t_last + 40'000, tcp_flag::kFin | tcp_flag::kAck);
      conn.control(false, t_last + 50'000, tcp_flag::kFin | tcp_flag::kAck);
      conn.control(true, t_last + 60'000, tcp_flag::kAck);
    }

    // Expected timeline.
    ConnectionTimeline& tl = truth.timeline;
    for (std::size_t i = 0; i < kBoundaryCount; ++i) tl.t[i] = t[i];
    tl.group = c.group;
    tl.client_hello_len = static_cast<std::uint32_t>(ch_bytes.size());
    tl.server_hello_len = static_cast<std::uint32_t>(sh_bytes.size());
    tl.key_share_len = expected_key_share_size(c.group);
    tl.cipher_suite = c.cipher_suite;
    if (drop_keylog) {
      tl.t[kClientFinished] = tl.t[kHttpGet] = tl.t[kHttp200] = std::nullopt;
      tl.validity = Validity::Partial;
      tl.issue = TimelineIssue::NoKeys;
    } else if (truncate) {
      tl.t[kHttp200] = std::nullopt;
      tl.validity = Validity::Partial;
      tl.issue = TimelineIssue::NoResponse;
    } else {
      tl.http_status = status;
      tl.t_last_byte = t_last_byte;
      if (non200) {
        tl.validity = Validity::Excluded;
        tl.issue = TimelineIssue::NonOkStatus;
      } else {
        tl.validity = Validity::Valid;
        tl.issue = TimelineIssue::None;
        LayerDeltas d;
        for (std::size_t i = 0; i < 5; ++i) d.layer_ns[i] = t[i + 1] - t[i];
        d.e2e_ns = t[kHttp200] - t[kSyn];
        truth.deltas = d;
      }
    }
    truth.client_records = std::move(client_dir.layout);
    truth.server_records = std::move(server_dir.layout);
    out.truth.connections.push_back(std::move(truth));
  }

  std::stable_sort(frames.begin(), frames.end(), [](const PendingFrame& a, const PendingFrame& b) {
    return a.ts != b.ts ? a.ts < b.ts : a.order < b.order;
  });
  out.frames.reserve(frames.size());
  for (auto& f : frames) out.frames.push_back(std::move(f.frame));
  out.keylog = keylog.str();
  return out;
}

void emit_capture(std::span<const CapturedFrame> frames, const std::filesystem::path& path,
                  CaptureFormat format) {
  write_capture(frames, path, format);
}

std::string ground_truth_json(const GroundTruth& truth) {
  json doc = json::object();
  json conns = json::array();
  for (const auto& c : truth.connections) {
    json j;
    j["client_random"] = to_hex(c.client_random);
    json b = json::array();
    for (const auto& t : c.timeline.t) b.push_back(t ? json(*t) : json(nullptr));
    j["boundaries_ns"] = b;
    j["validity"] = c.timeline.validity == Validity::Valid     ? "valid"
                    : c.timeline.validity == Validity::Partial ? "partial"
                                                               : "excluded";
    j["issue"] = std::string(issue_name(c.timeline.issue));
    j["group"] = group_name(c.timeline.group);
    j["key_share_len"] = c.timeline.key_share_len;
    if (c.deltas) {
      json d;
      for (auto layer : kLayers) d[std::string(layer_name(layer))] = c.deltas->layer_ns[static_cast<std::size_t>(layer)];
      d["e2e"] = c.deltas->e2e_ns;
      j["deltas_ns"] = d;
    }
    conns.push_back(j);
  }
  doc["connections"] = conns;
  return doc.dump(2) + "\n";
}

}  // namespace tlslayer::synth
