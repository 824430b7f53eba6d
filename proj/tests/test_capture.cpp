#include <fstream>

#include "doctest.h"
#include "support.hpp"
#include "tlslayer/bytes.hpp"
#include "tlslayer/capture.hpp"
#include "tlslayer/error.hpp"

using namespace tlslayer;
using testsupport::TempDir;

namespace {

std::vector<CapturedFrame> sample_frames(LinkType link = LinkType::Ethernet) {
  std::vector<CapturedFrame> frames;
  for (int i = 0; i < 5; ++i) {
    CapturedFrame f;
    f.timestamp_ns = 1'700'000'000'000'000'000 + i * 1'234'567;
    f.link_type = link;
    f.data.assign(60 + i * 7, static_cast<std::uint8_t>(i));
    f.original_length = static_cast<std::uint32_t>(f.data.size());
    frames.push_back(f);
  }
  return frames;
}

void write_bytes(const std::filesystem::path& p, const Bytes& b) {
  std::ofstream f(p, std::ios::binary);
  f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

// Classic pcap written big-endian by hand.
Bytes big_endian_pcap(bool nano, std::uint32_t sec, std::uint32_t frac, const Bytes& payload) {
  ByteWriter w;
  w.u32(nano ? 0xA1B23C4D : 0xA1B2C3D4);
  w.u16(2);
  w.u16(4);
  w.u32(0);
  w.u32(0);
  w.u32(65535);
  w.u32(1);
  w.u32(sec);
  w.u32(frac);
  w.u32(static_cast<std::uint32_t>(payload.size()));
  w.u32(static_cast<std::uint32_t>(payload.size()));
  w.append(payload);
  return std::move(w).take();
}

bool same_frames(const std::vector<CapturedFrame>& a, const std::vector<CapturedFrame>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].timestamp_ns != b[i].timestamp_ns || a[i].data != b[i].data || a[i].link_type != b[i].link_type) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("pcap nanosecond and pcapng round-trip frames exactly") {
  TempDir dir;
  auto frames = sample_frames();
  for (auto fmt : {CaptureFormat::PcapNano, CaptureFormat::Pcapng}) {
    auto path = dir / "c.bin";
    write_capture(frames, path, fmt);
    CaptureReader reader(path);
    CHECK(reader.format() == fmt);
    CHECK(same_frames(read_capture(path), frames));
  }
}

TEST_CASE("pcap microsecond truncates to microseconds") {
  TempDir dir;
  auto frames = sample_frames(LinkType::RawIP);
  write_capture(frames, dir / "us.pcap", CaptureFormat::PcapMicro);
  auto back = read_capture(dir / "us.pcap");
  REQUIRE(back.size() == frames.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].timestamp_ns == frames[i].timestamp_ns / 1000 * 1000);
    CHECK(back[i].link_type == LinkType::RawIP);
  }
}

TEST_CASE("empty frame list gives a header-only readable file") {
  TempDir dir;
  for (auto fmt : {CaptureFormat::PcapMicro, CaptureFormat::PcapNano, CaptureFormat::Pcapng}) {
    write_capture({}, dir / "empty", fmt);
    CHECK(read_capture(dir / "empty").empty());
  }
}

TEST_CASE("big-endian pcap in both resolutions") {
  TempDir dir;
  Bytes payload(42, 0xEE);
  write_bytes(dir / "be_us.pcap", big_endian_pcap(false, 10, 250, payload));
  write_bytes(dir / "be_ns.pcap", big_endian_pcap(true, 10, 250, payload));
  auto us = read_capture(dir / "be_us.pcap");
  auto ns = read_capture(dir / "be_ns.pcap");
  REQUIRE(us.size() == 1);
  REQUIRE(ns.size() == 1);
  CHECK(us[0].timestamp_ns == 10'000'250'000);
  CHECK(ns[0].timestamp_ns == 10'000'000'250);
  CHECK(us[0].data == payload);
}

TEST_CASE("unknown magic and unreadable file") {
  TempDir dir;
  write_bytes(dir / "junk", Bytes(64, 0x11));
  try {
    read_capture(dir / "junk");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownMagic);
  }
  try {
    read_capture(dir / "missing");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnreadableFile);
  }
}

TEST_CASE("unknown link type is rejected") {
  TempDir dir;
  Bytes b = big_endian_pcap(false, 1, 0, Bytes(20, 0));
  b[23] = 200;  // DLT 200
  write_bytes(dir / "dlt.pcap", b);
  try {
    read_capture(dir / "dlt.pcap");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownLinkType);
  }
}

TEST_CASE("truncated trailing record is skipped with a warning") {
  TempDir dir;
  Bytes b = big_endian_pcap(false, 1, 0, Bytes(40, 1));
  Bytes second = big_endian_pcap(false, 2, 0, Bytes(40, 2));
  b.insert(b.end(), second.begin() + 24, second.end() - 10);
  write_bytes(dir / "t.pcap", b);
  std::size_t warnings = 0;
  auto frames = read_capture(dir / "t.pcap", &warnings);
  CHECK(frames.size() == 1);
  CHECK(warnings == 1);
}

TEST_CASE("pcapng interface resolution in microseconds") {
  TempDir dir;
  ByteWriter w;
  // little-endian blocks written via a byte-swapping helper
  auto le32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) w.u8(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto le16 = [&](std::uint16_t v) {
    w.u8(static_cast<std::uint8_t>(v));
    w.u8(static_cast<std::uint8_t>(v >> 8));
  };
  le32(0x0A0D0D0A);
  le32(28);
  le32(0x1A2B3C4D);
  le16(1);
  le16(0);
  le32(0xFFFFFFFF);
  le32(0xFFFFFFFF);
  le32(28);
  // IDB without options: default 10^-6 resolution
  le32(1);
  le32(20);
  le16(101);
  le16(0);
  le32(0);
  le32(20);
  // unrelated block type, skipped
  le32(0x00000BAD);
  le32(16);
  le32(0);
  le32(16);
  // EPB
  le32(6);
  le32(32 + 20);
  le32(0);
  std::uint64_t ts = 5'000'001;
  le32(static_cast<std::uint32_t>(ts >> 32));
  le32(static_cast<std::uint32_t>(ts));
  le32(20);
  le32(20);
  w.fill(20, 0x45);
  le32(32 + 20);
  write_bytes(dir / "u.pcapng", w.bytes());
  auto frames = read_capture(dir / "u.pcapng");
  REQUIRE(frames.size() == 1);
  CHECK(frames[0].timestamp_ns == 5'000'001'000);
  CHECK(frames[0].link_type == LinkType::RawIP);
}
