#include <algorithm>
#include <random>

#include "doctest.h"
#include "tlslayer/error.hpp"
#include "tlslayer/reassembly.hpp"

using namespace tlslayer;

namespace {

const IpAddress kClient = IpAddress::v4(10, 0, 0, 1);
const IpAddress kServer = IpAddress::v4(10, 0, 0, 2);

DecodedPacket pkt(bool from_client, std::int64_t ts, std::uint8_t flags, std::uint32_t seq, Bytes payload = {},
                  std::uint16_t client_port = 5000) {
  DecodedPacket p;
  p.timestamp_ns = ts;
  p.src_ip = from_client ? kClient : kServer;
  p.dst_ip = from_client ? kServer : kClient;
  p.src_port = from_client ? client_port : 443;
  p.dst_port = from_client ? 443 : client_port;
  p.tcp_flags = flags;
  p.seq = seq;
  p.payload = std::move(payload);
  return p;
}

constexpr std::uint32_t kIsn = 0xFFFFFF00;  // forces sequence wrap
constexpr std::uint32_t kServerIsn = 5000;

std::vector<DecodedPacket> handshake() {
  return {pkt(true, 0, tcp_flag::kSyn, kIsn), pkt(false, 360'000, tcp_flag::kSyn | tcp_flag::kAck, kServerIsn)};
}

struct Planned {
  std::uint64_t offset;
  std::size_t len;
  std::int64_t ts;
};

}  // namespace

TEST_CASE("SYN and SYN-ACK timestamps, empty streams") {
  auto packets = handshake();
  auto result = assemble_connections(packets);
  REQUIRE(result.connections.size() == 1);
  const auto& c = result.connections[0];
  CHECK(c.t_syn == 0);
  CHECK(c.t_synack == 360'000);
  CHECK(c.client_to_server.size() == 0);
  CHECK(c.key.client_ip == kClient);
  CHECK(c.key.server_port == 443);
}

TEST_CASE("timestamp_at picks the largest key not above the offset") {
  DirectionalStream s;
  s.bytes.assign(2000, 0);
  s.first_seen = {{0, 10}, {1000, 20}};
  CHECK(timestamp_at(s, 0) == 10);
  CHECK(timestamp_at(s, 999) == 10);
  CHECK(timestamp_at(s, 1000) == 20);
  CHECK_THROWS_AS(timestamp_at(s, 2000), Error);
  s.gaps = {{1500, 1600}};
  try {
    timestamp_at(s, 1550);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GapAtOffset);
  }
}

TEST_CASE("retransmission keeps the first-arrival timestamp") {
  auto packets = handshake();
  Bytes a(100, 'a'), b(100, 'b');
  packets.push_back(pkt(true, 1'000'000, tcp_flag::kAck, kIsn + 1, a));
  packets.push_back(pkt(true, 2'000'000, tcp_flag::kAck, kIsn + 101, b));
  packets.push_back(pkt(true, 7'000'000, tcp_flag::kAck, kIsn + 101, b));
  packets.push_back(pkt(false, 8'000'000, tcp_flag::kAck, kServerIsn + 1, Bytes(20, 's')));
  auto c = assemble_connections(packets).connections.at(0);
  CHECK(timestamp_at(c.client_to_server, 100) == 2'000'000);
  CHECK(c.client_to_server.size() == 200);
  CHECK_FALSE(c.has(conn_flag::kPartial));
}

TEST_CASE("first arrival is by timestamp even when file order is reversed") {
  auto packets = handshake();
  Bytes a(50, 'x');
  packets.push_back(pkt(true, 9'000'000, tcp_flag::kAck, kIsn + 1, a));
  packets.push_back(pkt(true, 4'000'000, tcp_flag::kAck, kIsn + 1, a));
  auto c = assemble_connections(packets).connections.at(0);
  CHECK(timestamp_at(c.client_to_server, 0) == 4'000'000);
}

TEST_CASE("a gap is recorded and the prefix stays usable") {
  auto packets = handshake();
  packets.push_back(pkt(true, 1'000'000, tcp_flag::kAck, kIsn + 1, Bytes(10, 1)));
  packets.push_back(pkt(true, 1'000'100, tcp_flag::kAck, kIsn + 21, Bytes(10, 2)));
  auto c = assemble_connections(packets).connections.at(0);
  CHECK(c.client_to_server.has_gaps());
  CHECK(c.client_to_server.contiguous_prefix() == 10);
  CHECK(c.client_to_server.covers(0, 10));
  CHECK_FALSE(c.client_to_server.covers(0, 21));
}

TEST_CASE("inconsistent overlap flags the connection partial") {
  auto packets = handshake();
  packets.push_back(pkt(true, 1'000'000, tcp_flag::kAck, kIsn + 1, Bytes(10, 1)));
  packets.push_back(pkt(true, 1'000'100, tcp_flag::kAck, kIsn + 1, Bytes(10, 2)));
  auto c = assemble_connections(packets).connections.at(0);
  CHECK(c.has(conn_flag::kPartial));
  CHECK(c.client_to_server.bytes == Bytes(10, 1));
}

TEST_CASE("four-tuple reused after FIN starts a new connection") {
  auto packets = handshake();
  packets.push_back(pkt(true, 1'000'000, tcp_flag::kFin | tcp_flag::kAck, kIsn + 1));
  packets.push_back(pkt(false, 1'100'000, tcp_flag::kFin | tcp_flag::kAck, kServerIsn + 1));
  packets.push_back(pkt(true, 5'000'000, tcp_flag::kSyn, 777));
  packets.push_back(pkt(false, 5'300'000, tcp_flag::kSyn | tcp_flag::kAck, 999));
  auto result = assemble_connections(packets);
  REQUIRE(result.connections.size() == 2);
  CHECK(result.connections[1].t_syn == 5'000'000);
  CHECK(result.connections[1].t_synack == 5'300'000);
}

TEST_CASE("SYN retransmission with the same ISN keeps the first SYN time") {
  auto packets = handshake();
  packets.insert(packets.begin() + 1, pkt(true, 100, tcp_flag::kSyn, kIsn));
  packets.push_back(pkt(true, 1'000'000, tcp_flag::kAck, kIsn + 1, Bytes(5, 'c')));
  packets.push_back(pkt(false, 2'000'000, tcp_flag::kAck, kServerIsn + 1, Bytes(5, 's')));
  auto result = assemble_connections(packets);
  REQUIRE(result.connections.size() == 1);
  CHECK(result.connections[0].t_syn == 0);
  CHECK_FALSE(result.connections[0].has(conn_flag::kPartial));
}

TEST_CASE("SYN with a different ISN on an open connection is an anomaly") {
  auto packets = handshake();
  packets.push_back(pkt(true, 200'000'000, tcp_flag::kSyn, kIsn + 5000));
  auto result = assemble_connections(packets);
  REQUIRE_FALSE(result.connections.empty());
  CHECK(result.connections[0].has(conn_flag::kPartial));
}

TEST_CASE("packets without a SYN are orphans") {
  std::vector<DecodedPacket> packets{pkt(true, 10, tcp_flag::kAck, 1, Bytes(5, 1))};
  auto result = assemble_connections(packets);
  CHECK(result.connections.empty());
  CHECK(result.orphan_packets == 1);
}

TEST_CASE("random segmentation: timestamp_at agrees with a per-byte scan") {
  std::mt19937_64 rng(11);
  const std::size_t total = 40 * 1024;
  Bytes data(total);
  for (auto& b : data) b = static_cast<std::uint8_t>(rng());

  // 28 segments at random cut points, random timestamps, random duplicates
  std::vector<std::uint64_t> cuts{0, total};
  while (cuts.size() < 29) cuts.push_back(1 + rng() % (total - 1));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Planned> plan;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    plan.push_back({cuts[i], static_cast<std::size_t>(cuts[i + 1] - cuts[i]),
                    1'000'000 + static_cast<std::int64_t>(rng() % 5'000'000)});
    if (rng() % 4 == 0) {
      plan.push_back({cuts[i], static_cast<std::size_t>(cuts[i + 1] - cuts[i]),
                      1'000'000 + static_cast<std::int64_t>(rng() % 5'000'000)});
    }
  }
  std::vector<std::int64_t> oracle(total, INT64_MAX);
  for (const auto& s : plan) {
    for (std::size_t k = 0; k < s.len; ++k) oracle[s.offset + k] = std::min(oracle[s.offset + k], s.ts);
  }

  auto build = [&](std::vector<Planned> order) {
    auto packets = handshake();
    for (const auto& s : order) {
      packets.push_back(pkt(true, s.ts, tcp_flag::kAck, static_cast<std::uint32_t>(kIsn + 1 + s.offset),
                            Bytes(data.begin() + static_cast<std::ptrdiff_t>(s.offset),
                                  data.begin() + static_cast<std::ptrdiff_t>(s.offset + s.len))));
    }
    return assemble_connections(packets).connections.at(0).client_to_server;
  };

  auto stream = build(plan);
  REQUIRE(stream.bytes == data);
  for (int i = 0; i < 10'000; ++i) {
    auto off = rng() % total;
    REQUIRE(timestamp_at(stream, off) == oracle[off]);
  }

  SUBCASE("permutation of segments yields the identical stream") {
    for (int round = 0; round < 5; ++round) {
      auto shuffled = plan;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(build(shuffled) == stream);
    }
  }
}
