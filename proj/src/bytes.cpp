#include "tlslayer/bytes.hpp"

#include <stdexcept>

namespace tlslayer {

std::optional<ByteView> ByteReader::take(std::size_t n) {
  if (failed_ || data_.size() - pos_ < n) {
    failed_ = true;
    return std::nullopt;
  }
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::optional<std::uint8_t> ByteReader::u8() {
  auto b = take(1);
  if (!b) return std::nullopt;
  return (*b)[0];
}

std::optional<std::uint16_t> ByteReader::u16() {
  auto b = take(2);
  if (!b) return std::nullopt;
  return static_cast<std::uint16_t>(((*b)[0] << 8) | (*b)[1]);
}

std::optional<std::uint32_t> ByteReader::u24() {
  auto b = take(3);
  if (!b) return std::nullopt;
  return (std::uint32_t{(*b)[0]} << 16) | (std::uint32_t{(*b)[1]} << 8) | (*b)[2];
}

std::optional<std::uint32_t> ByteReader::u32() {
  auto b = take(4);
  if (!b) return std::nullopt;
  return (std::uint32_t{(*b)[0]} << 24) | (std::uint32_t{(*b)[1]} << 16) |
         (std::uint32_t{(*b)[2]} << 8) | (*b)[3];
}

void ByteWriter::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u24(std::uint32_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 16));
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::size_t ByteWriter::open_length(int width) {
  std::size_t mark = out_.size();
  out_.insert(out_.end(), static_cast<std::size_t>(width), 0);
  return mark;
}

void ByteWriter::close_length(std::size_t mark, int width) {
  std::size_t len = out_.size() - mark - static_cast<std::size_t>(width);
  if (width < 4 && len >> (8 * width)) throw std::length_error("length prefix overflow");
  for (int i = 0; i < width; ++i) {
    out_[mark + static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(len >> (8 * (width - 1 - i)));
  }
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {
int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

std::optional<Bytes> from_hex(std::string_view text) {
  if (text.size() % 2 != 0) return std::nullopt;
  Bytes out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    int hi = hex_value(text[i]);
    int lo = hex_value(text[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace tlslayer
