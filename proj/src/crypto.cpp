#include "tlslayer/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <memory>

#include "tlslayer/error.hpp"

namespace tlslayer {

HashAlg suite_hash(CipherSuite suite) noexcept {
  return suite == CipherSuite::Aes256GcmSha384 ? HashAlg::Sha384 : HashAlg::Sha256;
}

std::size_t hash_length(HashAlg hash) noexcept { return hash == HashAlg::Sha384 ? 48 : 32; }

std::size_t suite_key_length(CipherSuite suite) noexcept {
  return suite == CipherSuite::Aes128GcmSha256 ? 16 : 32;
}

namespace {

const EVP_MD* evp_md(HashAlg hash) { return hash == HashAlg::Sha384 ? EVP_sha384() : EVP_sha256(); }

const EVP_CIPHER* evp_cipher(CipherSuite suite) {
  switch (suite) {
    case CipherSuite::Aes128GcmSha256: return EVP_aes_128_gcm();
    case CipherSuite::Aes256GcmSha384: return EVP_aes_256_gcm();
    case CipherSuite::Chacha20Poly1305Sha256: return EVP_chacha20_poly1305();
  }
  return nullptr;
}

constexpr std::size_t kTagSize = 16;

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};

}  // namespace

Bytes hmac(HashAlg hash, ByteView key, ByteView data) {
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  if (!HMAC(evp_md(hash), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
            out.data(), &len)) {
    throw Error(Errc::CryptoBackend, "HMAC");
  }
  out.resize(len);
  return out;
}

Bytes hkdf_expand(HashAlg hash, ByteView prk, ByteView info, std::size_t length) {
  const std::size_t hlen = hash_length(hash);
  if (length > 255 * hlen) throw Error(Errc::LengthMismatch, "HKDF output too long");
  Bytes out;
  Bytes block;
  for (std::uint8_t counter = 1; out.size() < length; ++counter) {
    Bytes input = block;
    input.insert(input.end(), info.begin(), info.end());
    input.push_back(counter);
    block = hmac(hash, prk, input);
    out.insert(out.end(), block.begin(), block.end());
  }
  out.resize(length);
  return out;
}

Bytes hkdf_expand_label(HashAlg hash, ByteView secret, std::string_view label, ByteView context,
                        std::size_t length) {
  ByteWriter info;
  info.u16(static_cast<std::uint16_t>(length));
  info.u8(static_cast<std::uint8_t>(6 + label.size()));
  info.append(as_bytes("tls13 "));
  info.append(as_bytes(label));
  info.u8(static_cast<std::uint8_t>(context.size()));
  info.append(context);
  return hkdf_expand(hash, secret, info.bytes(), length);
}

TrafficKeys derive_traffic_keys(ByteView secret, CipherSuite suite) {
  HashAlg hash = suite_hash(suite);
  if (secret.size() != hash_length(hash)) {
    throw Error(Errc::LengthMismatch, "secret of " + std::to_string(secret.size()) +
                                          " bytes for " + std::string(cipher_suite_name(suite)));
  }
  TrafficKeys keys;
  keys.suite = suite;
  keys.key = hkdf_expand_label(hash, secret, "key", {}, suite_key_length(suite));
  Bytes iv = hkdf_expand_label(hash, secret, "iv", {}, 12);
  std::copy(iv.begin(), iv.end(), keys.iv.begin());
  return keys;
}

std::array<std::uint8_t, 12> record_nonce(const std::array<std::uint8_t, 12>& iv,
                                          std::uint64_t sequence) noexcept {
  auto nonce = iv;
  for (int i = 0; i < 8; ++i) {
    nonce[11 - i] ^= static_cast<std::uint8_t>(sequence >> (8 * i));
  }
  return nonce;
}

DecryptedMessage decrypt_record(const TlsRecord& record, TrafficKeys& keys) {
  if (record.content_type != ContentType::ApplicationData || record.body.size() < kTagSize) {
    throw Error(Errc::AuthFailure, "not a protected record");
  }
  const auto nonce = record_nonce(keys.iv, keys.sequence);
  const auto aad = record.header();
  const std::size_t ct_len = record.body.size() - kTagSize;

  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw Error(Errc::CryptoBackend, "cipher context");
  Bytes plain(ct_len + 16);
  int len = 0;
  int total = 0;
  bool ok = EVP_DecryptInit_ex(ctx.get(), evp_cipher(keys.suite), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_IVLEN, 12, nullptr) == 1 &&
            EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, keys.key.data(), nonce.data()) == 1 &&
            EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1 &&
            EVP_DecryptUpdate(ctx.get(), plain.data(), &len, record.body.data(),
                              static_cast<int>(ct_len)) == 1;
  total = len;
  if (ok) {
    Bytes tag(record.body.end() - kTagSize, record.body.end());
    ok = EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, kTagSize, tag.data()) == 1 &&
         EVP_DecryptFinal_ex(ctx.get(), plain.data() + total, &len) == 1;
    total += len;
  }
  if (!ok) {
    throw Error(Errc::AuthFailure, "record at stream offset " + std::to_string(record.stream_offset));
  }
  plain.resize(static_cast<std::size_t>(total));
  ++keys.sequence;

  while (!plain.empty() && plain.back() == 0) plain.pop_back();
  if (plain.empty()) throw Error(Errc::EmptyInnerPlaintext, "all-zero inner plaintext");
  DecryptedMessage msg;
  msg.inner_type = static_cast<ContentType>(plain.back());
  plain.pop_back();
  msg.plaintext = std::move(plain);
  msg.record_timestamp_ns = record.timestamp_ns;
  msg.stream_offset = record.stream_offset;
  return msg;
}

std::int64_t find_client_finished(std::span<const DecryptedMessage> messages) {
  for (const auto& msg : messages) {
    if (msg.inner_type != ContentType::Handshake) continue;
    auto parts = split_handshake(msg.plaintext);
    if (!parts) continue;
    for (const auto& part : *parts) {
      if (part.type == handshake_type::kFinished) return msg.record_timestamp_ns;
    }
  }
  throw Error(Errc::FinishedNotFound, "no client Finished");
}

}  // namespace tlslayer
