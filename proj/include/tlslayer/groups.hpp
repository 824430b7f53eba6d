#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace tlslayer {

namespace group_id {
inline constexpr std::uint16_t kX25519 = 0x001D;
inline constexpr std::uint16_t kMlkem512 = 0x0200;
inline constexpr std::uint16_t kMlkem768 = 0x0201;
inline constexpr std::uint16_t kMlkem1024 = 0x0202;
inline constexpr std::uint16_t kX25519Mlkem768 = 0x11EC;
// oqs-provider code point; not IANA registered.
inline constexpr std::uint16_t kX25519Mlkem512 = 0x2F39;
}  // namespace group_id

struct GroupInfo {
  std::uint16_t id;
  std::string_view name;
  // Bytes of classical ECDH public value (0 for pure ML-KEM).
  std::uint16_t classical_share;
  // ML-KEM parameter set (512/768/1024), 0 for pure classical.
  std::uint16_t mlkem_level;
};

std::span<const GroupInfo> known_groups() noexcept;
std::optional<GroupInfo> find_group(std::uint16_t id) noexcept;
std::optional<GroupInfo> find_group(std::string_view name) noexcept;
std::string group_name(std::uint16_t id);

// ML-KEM encapsulation key and ciphertext sizes (FIPS 203).
std::uint16_t mlkem_encapsulation_key_size(std::uint16_t level);
std::uint16_t mlkem_ciphertext_size(std::uint16_t level);

// Client key_share payload for a group. Throws Error{UnknownGroup}.
std::uint16_t expected_key_share_size(std::uint16_t group);
// Server key_share payload (ECDH value plus ML-KEM ciphertext).
std::uint16_t expected_server_share_size(std::uint16_t group);

}  // namespace tlslayer
