#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tlslayer {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// Big-endian cursor over a byte view. Reads past the end return nullopt
// and leave the cursor in a failed state.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  std::size_t remaining() const noexcept { return failed_ ? 0 : data_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }
  bool ok() const noexcept { return !failed_; }
  bool empty() const noexcept { return remaining() == 0; }

  std::optional<std::uint8_t> u8();
  std::optional<std::uint16_t> u16();
  std::optional<std::uint32_t> u24();
  std::optional<std::uint32_t> u32();
  std::optional<ByteView> take(std::size_t n);
  bool skip(std::size_t n) { return take(n).has_value(); }

 private:
  ByteView data_;
  std::size_t pos_ = 0;
  bool failed_ = false;
};

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v);
  void u24(std::uint32_t v);
  void u32(std::uint32_t v);
  void append(ByteView v) { out_.insert(out_.end(), v.begin(), v.end()); }
  void fill(std::size_t n, std::uint8_t value) { out_.insert(out_.end(), n, value); }

  // Reserve a big-endian length prefix of `width` bytes; patch it later.
  std::size_t open_length(int width);
  void close_length(std::size_t mark, int width);

  std::size_t size() const noexcept { return out_.size(); }
  const Bytes& bytes() const& noexcept { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

std::string to_hex(ByteView data);
// Case-insensitive. Returns nullopt on odd length or non-hex characters.
std::optional<Bytes> from_hex(std::string_view text);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace tlslayer
