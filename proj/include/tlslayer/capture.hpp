#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>

#include "tlslayer/bytes.hpp"

namespace tlslayer {

enum class LinkType : std::uint8_t { Ethernet, RawIP, LinuxSLL };

struct CapturedFrame {
  std::int64_t timestamp_ns = 0;
  LinkType link_type = LinkType::Ethernet;
  Bytes data;
  // Wire length; larger than data.size() when the snap length cut the packet.
  std::uint32_t original_length = 0;

  bool snap_truncated() const noexcept { return original_length > data.size(); }
};

enum class CaptureFormat { PcapMicro, PcapNano, Pcapng };

std::optional<LinkType> link_type_from_dlt(std::uint32_t dlt);
std::uint32_t dlt_from_link_type(LinkType type);

// Streaming reader over a classic pcap or pcapng file. Frames are yielded in
// file order. A truncated trailing record is skipped and counted in
// warnings(); it never throws.
class CaptureReader {
 public:
  explicit CaptureReader(const std::filesystem::path& path);

  std::optional<CapturedFrame> next();

  CaptureFormat format() const noexcept { return format_; }
  std::size_t warnings() const noexcept { return warnings_; }

 private:
  struct Interface {
    LinkType link = LinkType::Ethernet;
    // Ticks per second of this interface's timestamps.
    std::uint64_t ticks_per_second = 1'000'000;
  };

  bool read_exact(void* dst, std::size_t n);
  std::uint16_t fix16(std::uint16_t v) const noexcept;
  std::uint32_t fix32(std::uint32_t v) const noexcept;
  std::optional<CapturedFrame> next_pcap();
  std::optional<CapturedFrame> next_pcapng();
  void parse_section_header(std::span<const std::uint8_t> body);
  void parse_interface(std::span<const std::uint8_t> body);

  std::ifstream in_;
  CaptureFormat format_ = CaptureFormat::PcapMicro;
  bool swapped_ = false;
  std::vector<Interface> interfaces_;
  std::size_t warnings_ = 0;
};

std::vector<CapturedFrame> read_capture(const std::filesystem::path& path,
                                        std::size_t* warnings = nullptr);

// Frames are written in the given order. Every frame must share one link
// type for the classic formats.
void write_capture(std::span<const CapturedFrame> frames, const std::filesystem::path& path,
                   CaptureFormat format);

}  // namespace tlslayer
