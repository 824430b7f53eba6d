#include "tlslayer/capture.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include "tlslayer/error.hpp"

namespace tlslayer {

namespace {

constexpr std::uint32_t kPcapMicroMagic = 0xA1B2C3D4;
constexpr std::uint32_t kPcapNanoMagic = 0xA1B23C4D;
constexpr std::uint32_t kBlockSectionHeader = 0x0A0D0D0A;
constexpr std::uint32_t kBlockInterface = 0x00000001;
constexpr std::uint32_t kBlockEnhancedPacket = 0x00000006;
constexpr std::uint32_t kByteOrderMagic = 0x1A2B3C4D;

constexpr std::uint32_t kDltEthernet = 1;
constexpr std::uint32_t kDltRaw = 101;
constexpr std::uint32_t kDltLinuxSll = 113;
constexpr std::uint32_t kDltIpv4 = 228;
constexpr std::uint32_t kDltIpv6 = 229;
// Some platforms write DLT_RAW as 12 or 14.
constexpr std::uint32_t kDltRawAlt12 = 12;
constexpr std::uint32_t kDltRawAlt14 = 14;

constexpr std::uint32_t kMaxBlock = 64u << 20;

std::uint32_t load32(const std::uint8_t* p, bool swapped) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return swapped ? __builtin_bswap32(v) : v;
}

std::uint16_t load16(const std::uint8_t* p, bool swapped) {
  std::uint16_t v;
  std::memcpy(&v, p, 2);
  return swapped ? __builtin_bswap16(v) : v;
}

std::int64_t ticks_to_ns(std::uint64_t ticks, std::uint64_t per_second) {
  if (per_second == 1'000'000'000) return static_cast<std::int64_t>(ticks);
  std::uint64_t secs = ticks / per_second;
  std::uint64_t rem = ticks % per_second;
  auto frac = static_cast<std::uint64_t>((static_cast<unsigned __int128>(rem) * 1'000'000'000u) /
                                         per_second);
  return static_cast<std::int64_t>(secs * 1'000'000'000u + frac);
}

}  // namespace

std::optional<LinkType> link_type_from_dlt(std::uint32_t dlt) {
  switch (dlt) {
    case kDltEthernet: return LinkType::Ethernet;
    case kDltRaw:
    case kDltIpv4:
    case kDltIpv6:
    case kDltRawAlt12:
    case kDltRawAlt14: return LinkType::RawIP;
    case kDltLinuxSll: return LinkType::LinuxSLL;
    default: return std::nullopt;
  }
}

std::uint32_t dlt_from_link_type(LinkType type) {
  switch (type) {
    case LinkType::Ethernet: return kDltEthernet;
    case LinkType::RawIP: return kDltRaw;
    case LinkType::LinuxSLL: return kDltLinuxSll;
  }
  return kDltEthernet;
}

CaptureReader::CaptureReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
  if (!in_) throw Error(Errc::UnreadableFile, path.string());

  std::uint8_t magic_bytes[4];
  if (!read_exact(magic_bytes, 4)) throw Error(Errc::UnknownMagic, "file shorter than magic");
  std::uint32_t magic = load32(magic_bytes, false);

  if (magic == kPcapMicroMagic || magic == kPcapNanoMagic ||
      __builtin_bswap32(magic) == kPcapMicroMagic || __builtin_bswap32(magic) == kPcapNanoMagic) {
    swapped_ = !(magic == kPcapMicroMagic || magic == kPcapNanoMagic);
    std::uint32_t native = swapped_ ? __builtin_bswap32(magic) : magic;
    format_ = native == kPcapNanoMagic ? CaptureFormat::PcapNano : CaptureFormat::PcapMicro;
    std::uint8_t rest[20];
    if (!read_exact(rest, sizeof rest)) throw Error(Errc::UnknownMagic, "truncated pcap header");
    std::uint32_t dlt = load32(rest + 16, swapped_) & 0x0FFFFFFF;
    auto link = link_type_from_dlt(dlt);
    if (!link) throw Error(Errc::UnknownLinkType, "DLT " + std::to_string(dlt));
    interfaces_.push_back(
        {*link, format_ == CaptureFormat::PcapNano ? 1'000'000'000ull : 1'000'000ull});
    return;
  }

  if (magic == kBlockSectionHeader) {
    format_ = CaptureFormat::Pcapng;
    std::uint8_t head[8];
    if (!read_exact(head, 8)) throw Error(Errc::UnknownMagic, "truncated section header");
    std::uint32_t bom = load32(head + 4, false);
    if (bom == kByteOrderMagic) {
      swapped_ = false;
    } else if (__builtin_bswap32(bom) == kByteOrderMagic) {
      swapped_ = true;
    } else {
      throw Error(Errc::UnknownMagic, "bad pcapng byte-order magic");
    }
    std::uint32_t total = load32(head, swapped_);
    if (total < 28 || total % 4 != 0 || total > kMaxBlock) {
      throw Error(Errc::UnknownMagic, "bad section header length");
    }
    std::vector<std::uint8_t> rest(total - 12);
    if (!read_exact(rest.data(), rest.size())) throw Error(Errc::UnknownMagic, "truncated SHB");
    return;
  }

  throw Error(Errc::UnknownMagic, path.string());
}

bool CaptureReader::read_exact(void* dst, std::size_t n) {
  in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in_.gcount()) == n;
}

std::uint16_t CaptureReader::fix16(std::uint16_t v) const noexcept {
  return swapped_ ? __builtin_bswap16(v) : v;
}

std::uint32_t CaptureReader::fix32(std::uint32_t v) const noexcept {
  return swapped_ ? __builtin_bswap32(v) : v;
}

std::optional<CapturedFrame> CaptureReader::next() {
  return format_ == CaptureFormat::Pcapng ? next_pcapng() : next_pcap();
}

std::optional<CapturedFrame> CaptureReader::next_pcap() {
  std::uint8_t rec[16];
  in_.read(reinterpret_cast<char*>(rec), sizeof rec);
  auto got = static_cast<std::size_t>(in_.gcount());
  if (got == 0) return std::nullopt;
  if (got < sizeof rec) {
    ++warnings_;
    return std::nullopt;
  }
  std::uint32_t sec = load32(rec, swapped_);
  std::uint32_t frac = load32(rec + 4, swapped_);
  std::uint32_t caplen = load32(rec + 8, swapped_);
  std::uint32_t wirelen = load32(rec + 12, swapped_);
  if (caplen > kMaxBlock) {
    ++warnings_;
    return std::nullopt;
  }
  CapturedFrame frame;
  frame.data.resize(caplen);
  if (!read_exact(frame.data.data(), caplen)) {
    ++warnings_;
    return std::nullopt;
  }
  const auto& iface = interfaces_.front();
  frame.link_type = iface.link;
  frame.timestamp_ns = static_cast<std::int64_t>(sec) * 1'000'000'000 +
                       (format_ == CaptureFormat::PcapNano ? frac : std::int64_t{frac} * 1000);
  frame.original_length = std::max(wirelen, caplen);
  if (frame.data.empty()) return next_pcap();
  return frame;
}

void CaptureReader::parse_interface(std::span<const std::uint8_t> body) {
  if (body.size() < 8) throw Error(Errc::MalformedHeader, "short interface description");
  std::uint16_t dlt = load16(body.data(), swapped_);
  auto link = link_type_from_dlt(dlt);
  if (!link) throw Error(Errc::UnknownLinkType, "DLT " + std::to_string(dlt));
  Interface iface{*link, 1'000'000};
  std::size_t pos = 8;
  while (pos + 4 <= body.size()) {
    std::uint16_t code = load16(body.data() + pos, swapped_);
    std::uint16_t len = load16(body.data() + pos + 2, swapped_);
    pos += 4;
    if (code == 0 || pos + len > body.size()) break;
    if (code == 9 && len >= 1) {
      std::uint8_t res = body[pos];
      std::uint64_t per_second = 1;
      if (res & 0x80) {
        per_second = std::uint64_t{1} << (res & 0x7f);
      } else {
        for (int i = 0; i < (res & 0x7f); ++i) per_second *= 10;
      }
      iface.ticks_per_second = per_second;
    }
    pos += (len + 3u) & ~3u;
  }
  interfaces_.push_back(iface);
}

void CaptureReader::parse_section_header(std::span<const std::uint8_t> body) {
  if (body.size() < 4) throw Error(Errc::MalformedHeader, "short section header");
  std::uint32_t bom;
  std::memcpy(&bom, body.data(), 4);
  if (bom == kByteOrderMagic) {
    swapped_ = false;
  } else if (__builtin_bswap32(bom) == kByteOrderMagic) {
    swapped_ = true;
  } else {
    throw Error(Errc::UnknownMagic, "bad pcapng byte-order magic");
  }
  interfaces_.clear();
}

std::optional<CapturedFrame> CaptureReader::next_pcapng() {
  while (true) {
    std::uint8_t head[8];
    in_.read(reinterpret_cast<char*>(head), sizeof head);
    auto got = static_cast<std::size_t>(in_.gcount());
    if (got == 0) return std::nullopt;
    if (got < sizeof head) {
      ++warnings_;
      return std::nullopt;
    }
    std::uint32_t type = load32(head, false);
    // A new section may switch byte order, so the length is read after the
    // byte-order magic for SHBs.
    std::vector<std::uint8_t> body;
    if (type == kBlockSectionHeader) {
      std::uint8_t bom[4];
      if (!read_exact(bom, 4)) {
        ++warnings_;
        return std::nullopt;
      }
      std::uint32_t raw = load32(bom, false);
      bool sw = raw != kByteOrderMagic;
      std::uint32_t total = load32(head + 4, sw);
      if (total < 28 || total > kMaxBlock) {
        ++warnings_;
        return std::nullopt;
      }
      body.resize(total - 12);
      std::memcpy(body.data(), bom, 4);
      if (!read_exact(body.data() + 4, total - 16)) {
        ++warnings_;
        return std::nullopt;
      }
      std::uint8_t trailer[4];
      if (!read_exact(trailer, 4)) {
        ++warnings_;
        return std::nullopt;
      }
      parse_section_header(body);
      continue;
    }

    type = fix32(type);
    std::uint32_t total = load32(head + 4, swapped_);
    if (total < 12 || total > kMaxBlock) {
      ++warnings_;
      return std::nullopt;
    }
    body.resize(total - 12);
    std::uint8_t trailer[4];
    if (!read_exact(body.data(), body.size()) || !read_exact(trailer, 4)) {
      ++warnings_;
      return std::nullopt;
    }

    if (type == kBlockInterface) {
      parse_interface(body);
      continue;
    }
    if (type != kBlockEnhancedPacket) continue;
    if (body.size() < 20) {
      ++warnings_;
      continue;
    }
    std::uint32_t iface_id = load32(body.data(), swapped_);
    std::uint64_t ts_high = load32(body.data() + 4, swapped_);
    std::uint64_t ts_low = load32(body.data() + 8, swapped_);
    std::uint32_t caplen = load32(body.data() + 12, swapped_);
    std::uint32_t wirelen = load32(body.data() + 16, swapped_);
    if (iface_id >= interfaces_.size() || 20 + std::size_t{caplen} > body.size()) {
      ++warnings_;
      continue;
    }
    if (caplen == 0) continue;
    const auto& iface = interfaces_[iface_id];
    CapturedFrame frame;
    frame.link_type = iface.link;
    frame.timestamp_ns = ticks_to_ns((ts_high << 32) | ts_low, iface.ticks_per_second);
    frame.data.assign(body.begin() + 20, body.begin() + 20 + caplen);
    frame.original_length = std::max(wirelen, caplen);
    return frame;
  }
}

std::vector<CapturedFrame> read_capture(const std::filesystem::path& path, std::size_t* warnings) {
  CaptureReader reader(path);
  std::vector<CapturedFrame> frames;
  while (auto frame = reader.next()) frames.push_back(std::move(*frame));
  if (warnings) *warnings = reader.warnings();
  return frames;
}

namespace {

void put32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

void put16(std::ofstream& out, std::uint16_t v) {
  out.write(reinterpret_cast<const char*>(&v), 2);
}

void pad4(std::ofstream& out, std::size_t n) {
  static constexpr char kZero[4] = {0, 0, 0, 0};
  out.write(kZero, static_cast<std::streamsize>((4 - n % 4) % 4));
}

}  // namespace

void write_capture(std::span<const CapturedFrame> frames, const std::filesystem::path& path,
                   CaptureFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::WriteFailure, path.string());

  LinkType link = frames.empty() ? LinkType::Ethernet : frames.front().link_type;
  for (const auto& f : frames) {
    if (f.timestamp_ns < 0) throw Error(Errc::WriteFailure, "negative timestamp");
    if (f.link_type != link) throw Error(Errc::WriteFailure, "mixed link types");
  }

  if (format == CaptureFormat::Pcapng) {
    // Section header, native byte order.
    put32(out, kBlockSectionHeader);
    put32(out, 28);
    put32(out, kByteOrderMagic);
    put16(out, 1);
    put16(out, 0);
    std::uint64_t section_len = std::numeric_limits<std::uint64_t>::max();
    out.write(reinterpret_cast<const char*>(&section_len), 8);
    put32(out, 28);
    // Interface with nanosecond resolution (if_tsresol = 9).
    put32(out, kBlockInterface);
    put32(out, 32);
    put16(out, static_cast<std::uint16_t>(dlt_from_link_type(link)));
    put16(out, 0);
    put32(out, 262144);
    put16(out, 9);
    put16(out, 1);
    out.put(9);
    pad4(out, 1);
    put16(out, 0);
    put16(out, 0);
    put32(out, 32);
    for (const auto& f : frames) {
      auto caplen = static_cast<std::uint32_t>(f.data.size());
      std::uint32_t padded = (caplen + 3u) & ~3u;
      std::uint32_t total = 32 + padded;
      put32(out, kBlockEnhancedPacket);
      put32(out, total);
      put32(out, 0);
      auto ts = static_cast<std::uint64_t>(f.timestamp_ns);
      put32(out, static_cast<std::uint32_t>(ts >> 32));
      put32(out, static_cast<std::uint32_t>(ts));
      put32(out, caplen);
      put32(out, std::max(f.original_length, caplen));
      out.write(reinterpret_cast<const char*>(f.data.data()), caplen);
      pad4(out, caplen);
      put32(out, total);
    }
  } else {
    bool nano = format == CaptureFormat::PcapNano;
    put32(out, nano ? kPcapNanoMagic : kPcapMicroMagic);
    put16(out, 2);
    put16(out, 4);
    put32(out, 0);
    put32(out, 0);
    put32(out, 262144);
    put32(out, dlt_from_link_type(link));
    for (const auto& f : frames) {
      auto sec = static_cast<std::uint32_t>(f.timestamp_ns / 1'000'000'000);
      auto sub = f.timestamp_ns % 1'000'000'000;
      auto caplen = static_cast<std::uint32_t>(f.data.size());
      put32(out, sec);
      put32(out, static_cast<std::uint32_t>(nano ? sub : sub / 1000));
      put32(out, caplen);
      put32(out, std::max(f.original_length, caplen));
      out.write(reinterpret_cast<const char*>(f.data.data()), caplen);
    }
  }
  if (!out.flush()) throw Error(Errc::WriteFailure, path.string());
}

}  // namespace tlslayer
