#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "tlslayer/bytes.hpp"

namespace tlslayer {

using ClientRandom = std::array<std::uint8_t, 32>;

enum class SecretLabel : std::uint8_t {
  ClientHandshakeTraffic,
  ServerHandshakeTraffic,
  ClientTraffic0,
  ServerTraffic0,
};

std::string_view label_name(SecretLabel label) noexcept;
std::optional<SecretLabel> parse_label(std::string_view text) noexcept;

// Secrets from an NSS key log, keyed by client_random. Immutable once built.
class KeyLogStore {
 public:
  struct Diagnostics {
    std::size_t malformed_lines = 0;
    std::size_t unknown_labels = 0;
    std::size_t duplicates = 0;
  };

  // Last write wins; returns true when an existing entry was replaced.
  bool insert(const ClientRandom& random, SecretLabel label, Bytes secret);
  const Bytes* find(const ClientRandom& random, SecretLabel label) const;

  std::size_t size() const noexcept { return secrets_.size(); }
  bool empty() const noexcept { return secrets_.empty(); }
  const Diagnostics& diagnostics() const noexcept { return diag_; }
  Diagnostics& diagnostics() noexcept { return diag_; }

  const auto& entries() const noexcept { return secrets_; }
  bool operator==(const KeyLogStore& other) const { return secrets_ == other.secrets_; }

 private:
  std::map<std::pair<ClientRandom, SecretLabel>, Bytes> secrets_;
  Diagnostics diag_;
};

KeyLogStore parse_keylog(std::istream& in);
KeyLogStore parse_keylog(std::string_view text);
// One line per entry, ordered by (client_random, label), lowercase hex.
std::string render_keylog(const KeyLogStore& store);

}  // namespace tlslayer
