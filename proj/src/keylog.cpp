#include "tlslayer/keylog.hpp"

#include <algorithm>
#include <sstream>

namespace tlslayer {

std::string_view label_name(SecretLabel label) noexcept {
  switch (label) {
    case SecretLabel::ClientHandshakeTraffic: return "CLIENT_HANDSHAKE_TRAFFIC_SECRET";
    case SecretLabel::ServerHandshakeTraffic: return "SERVER_HANDSHAKE_TRAFFIC_SECRET";
    case SecretLabel::ClientTraffic0: return "CLIENT_TRAFFIC_SECRET_0";
    case SecretLabel::ServerTraffic0: return "SERVER_TRAFFIC_SECRET_0";
  }
  return "";
}

std::optional<SecretLabel> parse_label(std::string_view text) noexcept {
  for (auto label : {SecretLabel::ClientHandshakeTraffic, SecretLabel::ServerHandshakeTraffic,
                     SecretLabel::ClientTraffic0, SecretLabel::ServerTraffic0}) {
    if (label_name(label) == text) return label;
  }
  return std::nullopt;
}

bool KeyLogStore::insert(const ClientRandom& random, SecretLabel label, Bytes secret) {
  auto [it, inserted] = secrets_.insert_or_assign({random, label}, std::move(secret));
  if (!inserted) ++diag_.duplicates;
  return !inserted;
}

const Bytes* KeyLogStore::find(const ClientRandom& random, SecretLabel label) const {
  auto it = secrets_.find({random, label});
  return it == secrets_.end() ? nullptr : &it->second;
}

namespace {

void parse_line(std::string_view line, KeyLogStore& store) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
  while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
  if (line.empty() || line.front() == '#') return;

  std::string_view fields[4];
  std::size_t count = 0;
  while (!line.empty()) {
    auto end = std::find_if(line.begin(), line.end(), is_space);
    auto len = static_cast<std::size_t>(end - line.begin());
    if (count < 4) fields[count] = line.substr(0, len);
    ++count;
    line.remove_prefix(len);
    while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
  }
  if (count != 3) {
    ++store.diagnostics().malformed_lines;
    return;
  }
  auto label = parse_label(fields[0]);
  if (!label) {
    ++store.diagnostics().unknown_labels;
    return;
  }
  auto random = from_hex(fields[1]);
  auto secret = from_hex(fields[2]);
  if (!random || random->size() != 32 || !secret ||
      (secret->size() != 32 && secret->size() != 48)) {
    ++store.diagnostics().malformed_lines;
    return;
  }
  ClientRandom cr;
  std::copy(random->begin(), random->end(), cr.begin());
  store.insert(cr, *label, std::move(*secret));
}

}  // namespace

KeyLogStore parse_keylog(std::istream& in) {
  KeyLogStore store;
  std::string line;
  while (std::getline(in, line)) parse_line(line, store);
  return store;
}

KeyLogStore parse_keylog(std::string_view text) {
  KeyLogStore store;
  while (!text.empty()) {
    auto nl = text.find('\n');
    parse_line(text.substr(0, nl), store);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return store;
}

std::string render_keylog(const KeyLogStore& store) {
  std::string out;
  for (const auto& [key, secret] : store.entries()) {
    out += label_name(key.second);
    out += ' ';
    out += to_hex(key.first);
    out += ' ';
    out += to_hex(secret);
    out += '\n';
  }
  return out;
}

}  // namespace tlslayer
