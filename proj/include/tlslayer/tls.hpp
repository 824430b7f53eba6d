#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tlslayer/bytes.hpp"
#include "tlslayer/keylog.hpp"
#include "tlslayer/reassembly.hpp"

namespace tlslayer {

enum class ContentType : std::uint8_t {
  ChangeCipherSpec = 20,
  Alert = 21,
  Handshake = 22,
  ApplicationData = 23,
};

namespace handshake_type {
inline constexpr std::uint8_t kClientHello = 1;
inline constexpr std::uint8_t kServerHello = 2;
inline constexpr std::uint8_t kNewSessionTicket = 4;
inline constexpr std::uint8_t kEncryptedExtensions = 8;
inline constexpr std::uint8_t kCertificate = 11;
inline constexpr std::uint8_t kCertificateVerify = 15;
inline constexpr std::uint8_t kFinished = 20;
inline constexpr std::uint8_t kKeyUpdate = 24;
}  // namespace handshake_type

namespace extension_type {
inline constexpr std::uint16_t kSupportedGroups = 10;
inline constexpr std::uint16_t kSupportedVersions = 43;
inline constexpr std::uint16_t kKeyShare = 51;
}  // namespace extension_type

inline constexpr std::size_t kRecordHeaderSize = 5;
inline constexpr std::size_t kMaxRecordBody = (1u << 14) + 256;

struct TlsRecord {
  ContentType content_type = ContentType::Handshake;
  std::uint16_t legacy_version = 0x0303;
  Bytes body;
  std::uint64_t stream_offset = 0;
  std::int64_t timestamp_ns = 0;

  std::array<std::uint8_t, kRecordHeaderSize> header() const noexcept;
};

enum class RecordStop : std::uint8_t {
  EndOfStream,
  TrailingPartial,
  Gap,
  BadRecordHeader,
  OversizeRecord,
};

struct RecordParse {
  std::vector<TlsRecord> records;
  RecordStop stop = RecordStop::EndOfStream;
  // Offset where parsing stopped.
  std::uint64_t stop_offset = 0;
};

// Splits a directional stream into records. Parsing halts at the first
// problem; everything before it is returned.
RecordParse parse_records(const DirectionalStream& stream);

enum class CipherSuite : std::uint16_t {
  Aes128GcmSha256 = 0x1301,
  Aes256GcmSha384 = 0x1302,
  Chacha20Poly1305Sha256 = 0x1303,
};

std::optional<CipherSuite> cipher_suite_from_id(std::uint16_t id) noexcept;
std::string_view cipher_suite_name(CipherSuite suite) noexcept;
std::optional<CipherSuite> cipher_suite_from_name(std::string_view name) noexcept;

struct KeyShareEntry {
  std::uint16_t group = 0;
  std::uint16_t length = 0;
  bool operator==(const KeyShareEntry&) const = default;
};

struct ClientHelloInfo {
  ClientRandom client_random{};
  // Handshake header plus body.
  std::uint32_t total_length = 0;
  std::vector<std::uint16_t> cipher_suites;
  std::vector<KeyShareEntry> key_shares;
  std::vector<std::uint16_t> offered_groups;

  bool operator==(const ClientHelloInfo&) const = default;
};

struct ServerHelloInfo {
  std::array<std::uint8_t, 32> server_random{};
  std::uint16_t selected_group = 0;
  CipherSuite cipher_suite = CipherSuite::Aes128GcmSha256;
  std::uint32_t total_length = 0;
  std::uint16_t key_share_length = 0;
  bool hello_retry_request = false;

  bool operator==(const ServerHelloInfo&) const = default;
};

// The fixed random value that marks a HelloRetryRequest.
extern const std::array<std::uint8_t, 32> kHelloRetryRandom;

// Throws Error{MalformedHello}. A ClientHello without key_share yields an
// empty key_shares list.
ClientHelloInfo parse_client_hello(const TlsRecord& record);
// Throws Error{MalformedHello} or Error{UnsupportedCipherSuite}.
ServerHelloInfo parse_server_hello(const TlsRecord& record);

struct HandshakeMessage {
  std::uint8_t type = 0;
  ByteView body;
};

// Splits concatenated handshake messages. Returns nullopt if the framing
// does not cover the buffer exactly.
std::optional<std::vector<HandshakeMessage>> split_handshake(ByteView data);

}  // namespace tlslayer
