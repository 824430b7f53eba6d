#include "tlslayer/groups.hpp"

#include <array>
#include <cstdio>

#include "tlslayer/error.hpp"

namespace tlslayer {

namespace {
constexpr std::array kGroups{
    GroupInfo{group_id::kX25519, "x25519", 32, 0},
    GroupInfo{group_id::kX25519Mlkem512, "x25519_MLKEM512", 32, 512},
    GroupInfo{group_id::kX25519Mlkem768, "x25519_MLKEM768", 32, 768},
    GroupInfo{group_id::kMlkem512, "MLKEM512", 0, 512},
    GroupInfo{group_id::kMlkem768, "MLKEM768", 0, 768},
    GroupInfo{group_id::kMlkem1024, "MLKEM1024", 0, 1024},
};
}  // namespace

std::span<const GroupInfo> known_groups() noexcept { return kGroups; }

std::optional<GroupInfo> find_group(std::uint16_t id) noexcept {
  for (const auto& g : kGroups) {
    if (g.id == id) return g;
  }
  return std::nullopt;
}

std::optional<GroupInfo> find_group(std::string_view name) noexcept {
  auto lower = [](char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; };
  for (const auto& g : kGroups) {
    if (g.name.size() != name.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < name.size() && same; ++i) same = lower(g.name[i]) == lower(name[i]);
    if (same) return g;
  }
  return std::nullopt;
}

std::string group_name(std::uint16_t id) {
  if (auto g = find_group(id)) return std::string(g->name);
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%04X", id);
  return buf;
}

std::uint16_t mlkem_encapsulation_key_size(std::uint16_t level) {
  switch (level) {
    case 0: return 0;
    case 512: return 800;
    case 768: return 1184;
    case 1024: return 1568;
  }
  throw Error(Errc::UnknownGroup, "ML-KEM level " + std::to_string(level));
}

std::uint16_t mlkem_ciphertext_size(std::uint16_t level) {
  switch (level) {
    case 0: return 0;
    case 512: return 768;
    case 768: return 1088;
    case 1024: return 1568;
  }
  throw Error(Errc::UnknownGroup, "ML-KEM level " + std::to_string(level));
}

std::uint16_t expected_key_share_size(std::uint16_t group) {
  auto g = find_group(group);
  if (!g) throw Error(Errc::UnknownGroup, group_name(group));
  return static_cast<std::uint16_t>(g->classical_share + mlkem_encapsulation_key_size(g->mlkem_level));
}

std::uint16_t expected_server_share_size(std::uint16_t group) {
  auto g = find_group(group);
  if (!g) throw Error(Errc::UnknownGroup, group_name(group));
  return static_cast<std::uint16_t>(g->classical_share + mlkem_ciphertext_size(g->mlkem_level));
}

}  // namespace tlslayer
