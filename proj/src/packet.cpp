#include "tlslayer/packet.hpp"

#include <cstdio>

#include "tlslayer/error.hpp"

namespace tlslayer {

std::string IpAddress::to_string() const {
  char buf[64];
  if (!v6) {
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", octets[0], octets[1], octets[2], octets[3]);
    return buf;
  }
  std::string out;
  for (int i = 0; i < 16; i += 2) {
    std::snprintf(buf, sizeof buf, "%x", (octets[i] << 8) | octets[i + 1]);
    if (i) out.push_back(':');
    out += buf;
  }
  return out;
}

namespace {

constexpr std::uint16_t kEtherIpv4 = 0x0800;
constexpr std::uint16_t kEtherIpv6 = 0x86DD;
constexpr std::uint8_t kProtoTcp = 6;

std::uint16_t be16(const std::uint8_t* p) { return static_cast<std::uint16_t>((p[0] << 8) | p[1]); }
std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

std::optional<DecodedPacket> decode_tcp(ByteView seg, bool truncated, DecodedPacket pkt) {
  if (seg.size() < 20) {
    if (truncated) return std::nullopt;
    throw Error(Errc::MalformedHeader, "TCP header shorter than 20 bytes");
  }
  std::size_t header_len = static_cast<std::size_t>(seg[12] >> 4) * 4;
  if (header_len < 20 || header_len > seg.size()) {
    if (truncated && header_len >= 20) return std::nullopt;
    throw Error(Errc::MalformedHeader, "TCP data offset out of range");
  }
  pkt.src_port = be16(seg.data());
  pkt.dst_port = be16(seg.data() + 2);
  pkt.seq = be32(seg.data() + 4);
  pkt.tcp_flags = seg[13] & 0x1f;
  pkt.payload.assign(seg.begin() + static_cast<std::ptrdiff_t>(header_len), seg.end());
  pkt.snap_truncated = truncated;
  return pkt;
}

std::optional<DecodedPacket> decode_ipv4(ByteView ip, bool truncated, DecodedPacket pkt) {
  if (ip.size() < 20) {
    if (truncated) return std::nullopt;
    throw Error(Errc::MalformedHeader, "IPv4 header shorter than 20 bytes");
  }
  std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
  std::size_t total = be16(ip.data() + 2);
  if (ihl < 20 || total < ihl) throw Error(Errc::MalformedHeader, "IPv4 length fields");
  if (total > ip.size()) {
    if (!truncated) throw Error(Errc::MalformedHeader, "IPv4 total length exceeds frame");
    total = ip.size();
  }
  if (ihl > total) return std::nullopt;
  std::uint16_t frag = be16(ip.data() + 6);
  if ((frag & 0x2000) || (frag & 0x1fff)) return std::nullopt;
  if (ip[9] != kProtoTcp) return std::nullopt;
  std::copy_n(ip.data() + 12, 4, pkt.src_ip.octets.begin());
  std::copy_n(ip.data() + 16, 4, pkt.dst_ip.octets.begin());
  return decode_tcp(ip.subspan(ihl, total - ihl), truncated, std::move(pkt));
}

std::optional<DecodedPacket> decode_ipv6(ByteView ip, bool truncated, DecodedPacket pkt) {
  if (ip.size() < 40) {
    if (truncated) return std::nullopt;
    throw Error(Errc::MalformedHeader, "IPv6 header shorter than 40 bytes");
  }
  std::size_t payload_len = be16(ip.data() + 4);
  if (40 + payload_len > ip.size()) {
    if (!truncated) throw Error(Errc::MalformedHeader, "IPv6 payload length exceeds frame");
    payload_len = ip.size() - 40;
  }
  pkt.src_ip.v6 = pkt.dst_ip.v6 = true;
  std::copy_n(ip.data() + 8, 16, pkt.src_ip.octets.begin());
  std::copy_n(ip.data() + 24, 16, pkt.dst_ip.octets.begin());

  std::uint8_t next = ip[6];
  ByteView rest = ip.subspan(40, payload_len);
  // Hop-by-hop, routing and destination options are walked; a fragment
  // header (44) or anything else ends decoding.
  while (next == 0 || next == 43 || next == 60) {
    if (rest.size() < 8) return std::nullopt;
    std::size_t len = (std::size_t{rest[1]} + 1) * 8;
    if (len > rest.size()) return std::nullopt;
    next = rest[0];
    rest = rest.subspan(len);
  }
  if (next != kProtoTcp) return std::nullopt;
  return decode_tcp(rest, truncated, std::move(pkt));
}

}  // namespace

std::optional<DecodedPacket> decode_frame(const CapturedFrame& frame) {
  ByteView data(frame.data);
  bool truncated = frame.snap_truncated();
  DecodedPacket pkt;
  pkt.timestamp_ns = frame.timestamp_ns;

  std::uint16_t ethertype = 0;
  ByteView ip;
  switch (frame.link_type) {
    case LinkType::Ethernet:
      if (data.size() < 14) return std::nullopt;
      ethertype = be16(data.data() + 12);
      ip = data.subspan(14);
      break;
    case LinkType::LinuxSLL:
      if (data.size() < 16) return std::nullopt;
      ethertype = be16(data.data() + 14);
      ip = data.subspan(16);
      break;
    case LinkType::RawIP:
      if (data.empty()) return std::nullopt;
      ethertype = (data[0] >> 4) == 6 ? kEtherIpv6 : (data[0] >> 4) == 4 ? kEtherIpv4 : 0;
      ip = data;
      break;
  }
  if (ethertype == kEtherIpv4) return decode_ipv4(ip, truncated, std::move(pkt));
  if (ethertype == kEtherIpv6) return decode_ipv6(ip, truncated, std::move(pkt));
  return std::nullopt;
}

}  // namespace tlslayer
