#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tlslayer/packet.hpp"

namespace tlslayer {

// Orientation is fixed by the SYN: the initiator is the client.
struct FlowKey {
  IpAddress client_ip;
  IpAddress server_ip;
  std::uint16_t client_port = 0;
  std::uint16_t server_port = 0;

  auto operator<=>(const FlowKey&) const = default;
};

// Bytes of one direction, starting at ISN + 1. `first_seen` maps the start
// of every run of bytes to the timestamp of the segment that first carried
// them; adjacent runs with equal timestamps are merged.
struct DirectionalStream {
  Bytes bytes;
  std::map<std::uint64_t, std::int64_t> first_seen;
  // Half-open [begin, end) ranges never observed on the wire.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> gaps;

  std::uint64_t size() const noexcept { return bytes.size(); }
  bool has_gaps() const noexcept { return !gaps.empty(); }
  // Length of the gap-free prefix.
  std::uint64_t contiguous_prefix() const noexcept {
    return gaps.empty() ? bytes.size() : gaps.front().first;
  }
  bool covers(std::uint64_t begin, std::uint64_t end) const noexcept;

  bool operator==(const DirectionalStream&) const = default;
};

// Arrival time of the segment that first carried `offset`.
// Throws Error{GapAtOffset} for offsets in a hole or past the end.
std::int64_t timestamp_at(const DirectionalStream& stream, std::uint64_t offset);

namespace conn_flag {
inline constexpr std::uint8_t kComplete = 0x01;
inline constexpr std::uint8_t kPartial = 0x02;
inline constexpr std::uint8_t kReset = 0x04;
}  // namespace conn_flag

struct TcpConnection {
  FlowKey key;
  std::int64_t t_syn = 0;
  std::optional<std::int64_t> t_synack;
  DirectionalStream client_to_server;
  DirectionalStream server_to_client;
  std::uint8_t flags = 0;

  bool has(std::uint8_t flag) const noexcept { return (flags & flag) != 0; }
};

struct AssemblyResult {
  std::vector<TcpConnection> connections;
  // Packets that matched no SYN-initiated connection.
  std::size_t orphan_packets = 0;
};

// Connections are returned in order of their SYN timestamp. Packets are
// processed in timestamp order (file order breaks ties), so reordering in
// the file does not change the result.
AssemblyResult assemble_connections(std::span<const DecodedPacket> packets);

}  // namespace tlslayer
