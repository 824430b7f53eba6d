#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include "tlslayer/bytes.hpp"
#include "tlslayer/capture.hpp"

namespace tlslayer {

struct IpAddress {
  // IPv4 addresses occupy the first four bytes; the rest stay zero.
  std::array<std::uint8_t, 16> octets{};
  bool v6 = false;

  static IpAddress v4(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    IpAddress ip;
    ip.octets[0] = a;
    ip.octets[1] = b;
    ip.octets[2] = c;
    ip.octets[3] = d;
    return ip;
  }

  std::string to_string() const;
  auto operator<=>(const IpAddress&) const = default;
};

namespace tcp_flag {
inline constexpr std::uint8_t kFin = 0x01;
inline constexpr std::uint8_t kSyn = 0x02;
inline constexpr std::uint8_t kRst = 0x04;
inline constexpr std::uint8_t kPsh = 0x08;
inline constexpr std::uint8_t kAck = 0x10;
}  // namespace tcp_flag

struct DecodedPacket {
  std::int64_t timestamp_ns = 0;
  IpAddress src_ip;
  IpAddress dst_ip;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint8_t tcp_flags = 0;
  std::uint32_t seq = 0;
  Bytes payload;
  // Set when the capture snap length cut this packet's payload short.
  bool snap_truncated = false;

  bool has(std::uint8_t flag) const noexcept { return (tcp_flags & flag) != 0; }
};

// Returns nullopt for anything that is not TCP over IPv4/IPv6 (ARP, UDP,
// VLAN-tagged, fragments). Throws Error{MalformedHeader} when length fields
// disagree with the frame.
std::optional<DecodedPacket> decode_frame(const CapturedFrame& frame);

}  // namespace tlslayer
