#include "tlslayer/reassembly.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "tlslayer/error.hpp"

namespace tlslayer {

bool DirectionalStream::covers(std::uint64_t begin, std::uint64_t end) const noexcept {
  if (end > bytes.size() || begin > end) return false;
  for (const auto& [gb, ge] : gaps) {
    if (gb < end && begin < ge) return false;
  }
  return true;
}

std::int64_t timestamp_at(const DirectionalStream& stream, std::uint64_t offset) {
  if (!stream.covers(offset, offset + 1)) {
    throw Error(Errc::GapAtOffset, "offset " + std::to_string(offset));
  }
  auto it = stream.first_seen.upper_bound(offset);
  if (it == stream.first_seen.begin()) {
    throw Error(Errc::GapAtOffset, "offset " + std::to_string(offset));
  }
  return std::prev(it)->second;
}

namespace {

// Largest stream offset accepted; anything beyond is treated as garbage.
constexpr std::int64_t kMaxStreamBytes = std::int64_t{256} << 20;

struct Segment {
  std::uint32_t seq;
  std::int64_t ts;
  std::size_t order;
  const Bytes* payload;
};

struct Direction {
  std::optional<std::uint32_t> isn;
  std::vector<Segment> segments;
  bool fin = false;
};

struct Builder {
  FlowKey key;
  std::int64_t t_syn = 0;
  std::optional<std::int64_t> t_synack;
  Direction c2s;
  Direction s2c;
  bool reset = false;
  bool anomaly = false;

  bool closed() const noexcept { return reset || (c2s.fin && s2c.fin); }
};

DirectionalStream build_stream(Direction& dir, bool& anomaly) {
  DirectionalStream out;
  if (dir.segments.empty()) return out;

  std::uint32_t base;
  if (dir.isn) {
    base = *dir.isn + 1;
  } else {
    // No handshake seen for this side: start at the earliest sequence number.
    base = dir.segments.front().seq;
    for (const auto& s : dir.segments) {
      if (static_cast<std::int32_t>(s.seq - base) < 0) base = s.seq;
    }
  }

  std::sort(dir.segments.begin(), dir.segments.end(), [](const Segment& a, const Segment& b) {
    return std::tie(a.ts, a.order) < std::tie(b.ts, b.order);
  });

  std::int64_t extent = 0;
  for (const auto& s : dir.segments) {
    std::int64_t rel = static_cast<std::int32_t>(s.seq - base);
    std::int64_t end = rel + static_cast<std::int64_t>(s.payload->size());
    if (end > kMaxStreamBytes) {
      anomaly = true;
      continue;
    }
    extent = std::max(extent, end);
  }

  constexpr std::int64_t kUnseen = std::numeric_limits<std::int64_t>::min();
  auto len = static_cast<std::size_t>(extent);
  out.bytes.assign(len, 0);
  std::vector<std::int64_t> seen(len, kUnseen);
  for (const auto& s : dir.segments) {
    std::int64_t rel = static_cast<std::int32_t>(s.seq - base);
    const Bytes& p = *s.payload;
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::int64_t off = rel + static_cast<std::int64_t>(i);
      // Bytes before the base are keep-alive probes or pre-SYN data.
      if (off < 0 || off >= extent) continue;
      auto u = static_cast<std::size_t>(off);
      if (seen[u] == kUnseen) {
        seen[u] = s.ts;
        out.bytes[u] = p[i];
      } else if (out.bytes[u] != p[i]) {
        anomaly = true;
      }
    }
  }

  for (std::size_t i = 0; i < len;) {
    std::size_t j = i;
    while (j < len && seen[j] == seen[i]) ++j;
    if (seen[i] == kUnseen) {
      out.gaps.emplace_back(i, j);
    } else {
      out.first_seen.emplace(i, seen[i]);
    }
    i = j;
  }
  return out;
}

}  // namespace

AssemblyResult assemble_connections(std::span<const DecodedPacket> packets) {
  std::vector<std::size_t> order(packets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return packets[a].timestamp_ns < packets[b].timestamp_ns;
  });

  using Endpoint = std::pair<IpAddress, std::uint16_t>;
  std::map<std::pair<Endpoint, Endpoint>, std::size_t> active;
  std::vector<Builder> builders;
  AssemblyResult result;

  auto tuple_of = [](const DecodedPacket& p) {
    Endpoint a{p.src_ip, p.src_port};
    Endpoint b{p.dst_ip, p.dst_port};
    return a < b ? std::pair{a, b} : std::pair{b, a};
  };

  for (std::size_t idx : order) {
    const DecodedPacket& p = packets[idx];
    auto tuple = tuple_of(p);
    auto found = active.find(tuple);
    Builder* b = found == active.end() ? nullptr : &builders[found->second];

    bool syn = p.has(tcp_flag::kSyn);
    bool ack = p.has(tcp_flag::kAck);

    if (syn && !ack) {
      if (b && !b->closed()) {
        bool same_side = b->key.client_ip == p.src_ip && b->key.client_port == p.src_port;
        if (!same_side || b->c2s.isn != p.seq) b->anomaly = true;
        continue;
      }
      Builder nb;
      nb.key = {p.src_ip, p.dst_ip, p.src_port, p.dst_port};
      nb.t_syn = p.timestamp_ns;
      nb.c2s.isn = p.seq;
      active[tuple] = builders.size();
      builders.push_back(std::move(nb));
      continue;
    }

    if (!b) {
      ++result.orphan_packets;
      continue;
    }
    bool from_client = b->key.client_ip == p.src_ip && b->key.client_port == p.src_port;
    Direction& dir = from_client ? b->c2s : b->s2c;

    if (syn && ack) {
      if (from_client) {
        b->anomaly = true;
        continue;
      }
      if (!b->t_synack) {
        b->t_synack = p.timestamp_ns;
        b->s2c.isn = p.seq;
      } else if (b->s2c.isn != p.seq) {
        b->anomaly = true;
      }
      continue;
    }

    if (p.has(tcp_flag::kRst)) b->reset = true;
    if (p.has(tcp_flag::kFin)) dir.fin = true;
    if (p.snap_truncated) b->anomaly = true;
    if (!p.payload.empty()) dir.segments.push_back({p.seq, p.timestamp_ns, idx, &p.payload});
  }

  result.connections.reserve(builders.size());
  for (auto& b : builders) {
    TcpConnection conn;
    conn.key = b.key;
    conn.t_syn = b.t_syn;
    conn.t_synack = b.t_synack;
    bool anomaly = b.anomaly;
    conn.client_to_server = build_stream(b.c2s, anomaly);
    conn.server_to_client = build_stream(b.s2c, anomaly);
    bool complete = !anomaly && conn.t_synack && conn.client_to_server.size() > 0 &&
                    conn.server_to_client.size() > 0 && !conn.client_to_server.has_gaps() &&
                    !conn.server_to_client.has_gaps();
    conn.flags = complete ? conn_flag::kComplete : conn_flag::kPartial;
    if (b.reset) conn.flags |= conn_flag::kReset;
    result.connections.push_back(std::move(conn));
  }
  return result;
}

}  // namespace tlslayer
