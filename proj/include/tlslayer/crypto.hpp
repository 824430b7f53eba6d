#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "tlslayer/bytes.hpp"
#include "tlslayer/tls.hpp"

namespace tlslayer {

enum class HashAlg : std::uint8_t { Sha256, Sha384 };

HashAlg suite_hash(CipherSuite suite) noexcept;
std::size_t hash_length(HashAlg hash) noexcept;
std::size_t suite_key_length(CipherSuite suite) noexcept;

Bytes hmac(HashAlg hash, ByteView key, ByteView data);
// RFC 5869 expand step.
Bytes hkdf_expand(HashAlg hash, ByteView prk, ByteView info, std::size_t length);
// TLS 1.3 HkdfLabel with the "tls13 " prefix.
Bytes hkdf_expand_label(HashAlg hash, ByteView secret, std::string_view label, ByteView context,
                        std::size_t length);

struct TrafficKeys {
  CipherSuite suite = CipherSuite::Aes128GcmSha256;
  Bytes key;
  std::array<std::uint8_t, 12> iv{};
  std::uint64_t sequence = 0;
};

// Throws Error{LengthMismatch} when the secret does not match the suite hash.
TrafficKeys derive_traffic_keys(ByteView secret, CipherSuite suite);

// iv XOR big-endian sequence number, left-padded to 12 bytes.
std::array<std::uint8_t, 12> record_nonce(const std::array<std::uint8_t, 12>& iv,
                                          std::uint64_t sequence) noexcept;

struct DecryptedMessage {
  ContentType inner_type = ContentType::ApplicationData;
  Bytes plaintext;
  std::int64_t record_timestamp_ns = 0;
  std::uint64_t stream_offset = 0;
};

// Opens one protected record with the next sequence number of `keys`.
// The counter advances only on success. Throws Error{AuthFailure} or
// Error{EmptyInnerPlaintext}.
DecryptedMessage decrypt_record(const TlsRecord& record, TrafficKeys& keys);

// Timestamp of the first decrypted handshake message of type finished.
// Throws Error{FinishedNotFound}.
std::int64_t find_client_finished(std::span<const DecryptedMessage> messages);

}  // namespace tlslayer
