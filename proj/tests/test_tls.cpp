#include <random>

#include "doctest.h"
#include "tlslayer/error.hpp"
#include "tlslayer/groups.hpp"
#include "tlslayer/synth.hpp"
#include "tlslayer/tls.hpp"

using namespace tlslayer;

namespace {

DirectionalStream stream_of(const Bytes& bytes, std::int64_t ts = 0) {
  DirectionalStream s;
  s.bytes = bytes;
  if (!bytes.empty()) s.first_seen[0] = ts;
  return s;
}

TlsRecord handshake_record(const Bytes& body) {
  TlsRecord r;
  r.content_type = ContentType::Handshake;
  r.body = body;
  return r;
}

ClientHelloInfo random_hello(std::mt19937_64& rng) {
  ClientHelloInfo info;
  for (auto& b : info.client_random) b = static_cast<std::uint8_t>(rng());
  info.cipher_suites = {0x1301, 0x1303};
  auto groups = known_groups();
  std::size_t n = rng() % 3;
  for (std::size_t i = 0; i < n; ++i) {
    auto g = groups[rng() % groups.size()].id;
    info.key_shares.push_back({g, expected_key_share_size(g)});
    info.offered_groups.push_back(g);
  }
  if (rng() % 2) info.offered_groups.push_back(group_id::kX25519);
  return info;
}

}  // namespace

TEST_CASE("empty stream has no records") {
  auto p = parse_records(stream_of({}));
  CHECK(p.records.empty());
  CHECK(p.stop == RecordStop::EndOfStream);
}

TEST_CASE("single handshake record of 512 bytes") {
  auto rec = synth::render_record(ContentType::Handshake, Bytes(512, 7));
  auto p = parse_records(stream_of(rec, 42));
  REQUIRE(p.records.size() == 1);
  CHECK(p.records[0].content_type == ContentType::Handshake);
  CHECK(p.records[0].stream_offset == 0);
  CHECK(p.records[0].body.size() == 512);
  CHECK(p.records[0].timestamp_ns == 42);
}

TEST_CASE("trailing partial, bad header and oversize stop parsing") {
  Bytes two = synth::render_record(ContentType::Handshake, Bytes(10, 1));
  Bytes second = synth::render_record(ContentType::ApplicationData, Bytes(20, 2));
  two.insert(two.end(), second.begin(), second.end() - 5);
  auto p = parse_records(stream_of(two));
  CHECK(p.records.size() == 1);
  CHECK(p.stop == RecordStop::TrailingPartial);
  CHECK(p.stop_offset == 15);

  Bytes bad = synth::render_record(ContentType::Handshake, Bytes(4, 1));
  bad[0] = 99;
  CHECK(parse_records(stream_of(bad)).stop == RecordStop::BadRecordHeader);

  Bytes big{23, 3, 3, 0x48, 0x01};
  big.resize(5 + 0x4801);
  CHECK(parse_records(stream_of(big)).stop == RecordStop::OversizeRecord);
}

TEST_CASE("key_share extraction for the measured groups") {
  const std::pair<std::uint16_t, std::uint16_t> expected[] = {{group_id::kX25519, 32},
                                                              {group_id::kX25519Mlkem512, 832},
                                                              {group_id::kX25519Mlkem768, 1216},
                                                              {group_id::kMlkem512, 800},
                                                              {group_id::kMlkem1024, 1568}};
  for (auto [group, size] : expected) {
    CHECK(expected_key_share_size(group) == size);
    ClientHelloInfo info;
    info.cipher_suites = {0x1301};
    info.key_shares = {{group, size}};
    info.offered_groups = {group};
    auto parsed = parse_client_hello(handshake_record(synth::render_client_hello(info)));
    REQUIRE(parsed.key_shares.size() == 1);
    CHECK(parsed.key_shares[0].group == group);
    CHECK(parsed.key_shares[0].length == size);
  }
}

TEST_CASE("hybrid shares are the classical share plus the ML-KEM encapsulation key") {
  for (const auto& g : known_groups()) {
    if (g.classical_share == 0 || g.mlkem_level == 0) continue;
    CHECK(expected_key_share_size(g.id) ==
          expected_key_share_size(group_id::kX25519) + mlkem_encapsulation_key_size(g.mlkem_level));
  }
  CHECK_THROWS_AS(expected_key_share_size(0x9999), Error);
}

TEST_CASE("ClientHello without extensions") {
  ClientHelloInfo info;
  info.cipher_suites = {0x1302};
  auto bytes = synth::render_client_hello(info);
  auto parsed = parse_client_hello(handshake_record(bytes));
  CHECK(parsed.key_shares.empty());
  CHECK(parsed.offered_groups.empty());
  CHECK(parsed.total_length == bytes.size());
}

TEST_CASE("render then parse ClientHello is the identity") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto info = random_hello(rng);
    auto bytes = synth::render_client_hello(info);
    info.total_length = static_cast<std::uint32_t>(bytes.size());
    CHECK(parse_client_hello(handshake_record(bytes)) == info);
  }
}

TEST_CASE("truncated ClientHello is malformed") {
  ClientHelloInfo info;
  info.cipher_suites = {0x1301};
  info.key_shares = {{group_id::kX25519, 32}};
  auto bytes = synth::render_client_hello(info);
  bytes.resize(bytes.size() - 3);
  try {
    parse_client_hello(handshake_record(bytes));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedHello);
  }
}

TEST_CASE("ServerHello fields and HelloRetryRequest") {
  ServerHelloInfo info;
  info.server_random.fill(3);
  info.selected_group = group_id::kMlkem1024;
  info.cipher_suite = CipherSuite::Aes256GcmSha384;
  info.key_share_length = expected_server_share_size(group_id::kMlkem1024);
  auto bytes = synth::render_server_hello(info);
  auto parsed = parse_server_hello(handshake_record(bytes));
  CHECK(parsed.selected_group == group_id::kMlkem1024);
  CHECK(parsed.cipher_suite == CipherSuite::Aes256GcmSha384);
  CHECK(parsed.total_length == bytes.size());
  CHECK_FALSE(parsed.hello_retry_request);

  info.hello_retry_request = true;
  auto hrr = parse_server_hello(handshake_record(synth::render_server_hello(info)));
  CHECK(hrr.hello_retry_request);
  CHECK(hrr.selected_group == group_id::kMlkem1024);
}

TEST_CASE("unsupported cipher suite in ServerHello") {
  ServerHelloInfo info;
  info.selected_group = group_id::kX25519;
  info.key_share_length = 32;
  auto bytes = synth::render_server_hello(info);
  // suite sits after type(1) len(3) version(2) random(32) sid(33)
  bytes[4 + 2 + 32 + 33] = 0x13;
  bytes[4 + 2 + 32 + 34] = 0x05;
  try {
    parse_server_hello(handshake_record(bytes));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnsupportedCipherSuite);
  }
}

TEST_CASE("cipher suite names") {
  CHECK(cipher_suite_name(CipherSuite::Chacha20Poly1305Sha256) == "TLS_CHACHA20_POLY1305_SHA256");
  CHECK(cipher_suite_from_name("TLS_AES_256_GCM_SHA384") == CipherSuite::Aes256GcmSha384);
  CHECK_FALSE(cipher_suite_from_id(0x00FF).has_value());
}

TEST_CASE("split_handshake") {
  Bytes data{20, 0, 0, 2, 9, 9, 8, 0, 0, 0};
  auto msgs = split_handshake(data);
  REQUIRE(msgs.has_value());
  REQUIRE(msgs->size() == 2);
  CHECK((*msgs)[0].type == 20);
  CHECK((*msgs)[0].body.size() == 2);
  data.pop_back();
  CHECK_FALSE(split_handshake(data).has_value());
}
