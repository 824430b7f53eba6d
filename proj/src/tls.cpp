#include "tlslayer/tls.hpp"

#include <algorithm>

#include "tlslayer/error.hpp"

namespace tlslayer {

const std::array<std::uint8_t, 32> kHelloRetryRandom = {
    0xCF, 0x21, 0xAD, 0x74, 0xE5, 0x9A, 0x61, 0x11, 0xBE, 0x1D, 0x8C, 0x02, 0x1E, 0x65, 0xB8, 0x91,
    0xC2, 0xA2, 0x11, 0x16, 0x7A, 0xBB, 0x8C, 0x5E, 0x07, 0x9E, 0x09, 0xE2, 0xC8, 0xA8, 0x33, 0x9C};

std::array<std::uint8_t, kRecordHeaderSize> TlsRecord::header() const noexcept {
  auto len = static_cast<std::uint16_t>(body.size());
  return {static_cast<std::uint8_t>(content_type), static_cast<std::uint8_t>(legacy_version >> 8),
          static_cast<std::uint8_t>(legacy_version), static_cast<std::uint8_t>(len >> 8),
          static_cast<std::uint8_t>(len)};
}

RecordParse parse_records(const DirectionalStream& stream) {
  RecordParse out;
  const std::uint64_t usable = stream.contiguous_prefix();
  std::uint64_t pos = 0;
  auto stop = [&](RecordStop why) {
    out.stop = why;
    out.stop_offset = pos;
    return out;
  };

  while (pos < stream.size()) {
    if (pos + kRecordHeaderSize > stream.size()) return stop(RecordStop::TrailingPartial);
    if (pos + kRecordHeaderSize > usable) return stop(RecordStop::Gap);
    const std::uint8_t* h = stream.bytes.data() + pos;
    std::uint8_t type = h[0];
    if (type < 20 || type > 23 || h[1] != 3 || h[2] > 4) return stop(RecordStop::BadRecordHeader);
    std::size_t len = (std::size_t{h[3]} << 8) | h[4];
    if (len > kMaxRecordBody) return stop(RecordStop::OversizeRecord);
    std::uint64_t end = pos + kRecordHeaderSize + len;
    if (end > stream.size()) return stop(RecordStop::TrailingPartial);
    if (end > usable) return stop(RecordStop::Gap);

    TlsRecord rec;
    rec.content_type = static_cast<ContentType>(type);
    rec.legacy_version = static_cast<std::uint16_t>((h[1] << 8) | h[2]);
    rec.body.assign(h + kRecordHeaderSize, h + kRecordHeaderSize + len);
    rec.stream_offset = pos;
    rec.timestamp_ns = timestamp_at(stream, pos);
    out.records.push_back(std::move(rec));
    pos = end;
  }
  return stop(RecordStop::EndOfStream);
}

std::optional<CipherSuite> cipher_suite_from_id(std::uint16_t id) noexcept {
  switch (id) {
    case 0x1301: return CipherSuite::Aes128GcmSha256;
    case 0x1302: return CipherSuite::Aes256GcmSha384;
    case 0x1303: return CipherSuite::Chacha20Poly1305Sha256;
  }
  return std::nullopt;
}

std::string_view cipher_suite_name(CipherSuite suite) noexcept {
  switch (suite) {
    case CipherSuite::Aes128GcmSha256: return "TLS_AES_128_GCM_SHA256";
    case CipherSuite::Aes256GcmSha384: return "TLS_AES_256_GCM_SHA384";
    case CipherSuite::Chacha20Poly1305Sha256: return "TLS_CHACHA20_POLY1305_SHA256";
  }
  return "";
}

std::optional<CipherSuite> cipher_suite_from_name(std::string_view name) noexcept {
  for (auto s : {CipherSuite::Aes128GcmSha256, CipherSuite::Aes256GcmSha384,
                 CipherSuite::Chacha20Poly1305Sha256}) {
    if (cipher_suite_name(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<std::vector<HandshakeMessage>> split_handshake(ByteView data) {
  std::vector<HandshakeMessage> out;
  ByteReader r(data);
  while (!r.empty()) {
    auto type = r.u8();
    auto len = r.u24();
    if (!type || !len) return std::nullopt;
    auto body = r.take(*len);
    if (!body) return std::nullopt;
    out.push_back({*type, *body});
  }
  return out;
}

namespace {

[[noreturn]] void malformed(const char* what) { throw Error(Errc::MalformedHello, what); }

// Returns the handshake body after checking the header against the record.
ByteView hello_body(const TlsRecord& record, std::uint8_t expected_type, std::uint32_t& total) {
  if (record.content_type != ContentType::Handshake) malformed("not a handshake record");
  ByteReader r(record.body);
  auto type = r.u8();
  auto len = r.u24();
  if (!type || !len) malformed("short handshake header");
  if (*type != expected_type) malformed("unexpected handshake type");
  auto body = r.take(*len);
  if (!body) malformed("handshake length exceeds record");
  total = 4 + *len;
  return *body;
}

template <typename Fn>
void walk_extensions(ByteReader& r, Fn&& on_extension) {
  if (r.empty()) return;
  auto ext_len = r.u16();
  if (!ext_len) malformed("extensions length");
  auto block = r.take(*ext_len);
  if (!block || !r.empty()) malformed("extensions block");
  ByteReader ext(*block);
  while (!ext.empty()) {
    auto type = ext.u16();
    auto len = ext.u16();
    if (!type || !len) malformed("extension header");
    auto data = ext.take(*len);
    if (!data) malformed("extension body");
    on_extension(*type, *data);
  }
}

}  // namespace

ClientHelloInfo parse_client_hello(const TlsRecord& record) {
  ClientHelloInfo info;
  ByteReader r(hello_body(record, handshake_type::kClientHello, info.total_length));
  if (!r.u16()) malformed("legacy_version");
  auto random = r.take(32);
  if (!random) malformed("random");
  std::copy(random->begin(), random->end(), info.client_random.begin());
  auto sid_len = r.u8();
  if (!sid_len || !r.skip(*sid_len)) malformed("session id");
  auto cs_len = r.u16();
  if (!cs_len || *cs_len % 2 != 0) malformed("cipher suites");
  auto cs = r.take(*cs_len);
  if (!cs) malformed("cipher suites");
  ByteReader csr(*cs);
  while (!csr.empty()) info.cipher_suites.push_back(*csr.u16());
  auto comp_len = r.u8();
  if (!comp_len || !r.skip(*comp_len)) malformed("compression methods");

  walk_extensions(r, [&](std::uint16_t type, ByteView data) {
    ByteReader e(data);
    if (type == extension_type::kSupportedGroups) {
      auto len = e.u16();
      if (!len || *len % 2 != 0 || *len != e.remaining()) malformed("supported_groups");
      while (!e.empty()) info.offered_groups.push_back(*e.u16());
    } else if (type == extension_type::kKeyShare) {
      auto len = e.u16();
      if (!len || *len != e.remaining()) malformed("key_share");
      while (!e.empty()) {
        auto group = e.u16();
        auto klen = e.u16();
        if (!group || !klen || !e.skip(*klen)) malformed("key_share entry");
        info.key_shares.push_back({*group, *klen});
      }
    }
  });
  return info;
}

ServerHelloInfo parse_server_hello(const TlsRecord& record) {
  ServerHelloInfo info;
  ByteReader r(hello_body(record, handshake_type::kServerHello, info.total_length));
  if (!r.u16()) malformed("legacy_version");
  auto random = r.take(32);
  if (!random) malformed("random");
  std::copy(random->begin(), random->end(), info.server_random.begin());
  info.hello_retry_request = info.server_random == kHelloRetryRandom;
  auto sid_len = r.u8();
  if (!sid_len || !r.skip(*sid_len)) malformed("session id");
  auto suite_id = r.u16();
  if (!suite_id) malformed("cipher suite");
  if (!r.u8()) malformed("compression method");

  walk_extensions(r, [&](std::uint16_t type, ByteView data) {
    if (type != extension_type::kKeyShare) return;
    ByteReader e(data);
    auto group = e.u16();
    if (!group) malformed("key_share");
    info.selected_group = *group;
    // HelloRetryRequest carries only the group.
    if (info.hello_retry_request) return;
    auto klen = e.u16();
    if (!klen || *klen != e.remaining()) malformed("key_share entry");
    info.key_share_length = *klen;
  });

  auto suite = cipher_suite_from_id(*suite_id);
  if (!suite) throw Error(Errc::UnsupportedCipherSuite, std::to_string(*suite_id));
  info.cipher_suite = *suite;
  return info;
}

}  // namespace tlslayer
