#include "doctest.h"
#include "tlslayer/bytes.hpp"
#include "tlslayer/keylog.hpp"

using namespace tlslayer;

namespace {
const std::string kRandom = std::string(64, 'a');
const std::string kSecret32 = std::string(64, '1');
}  // namespace

TEST_CASE("parses the four TLS 1.3 traffic labels") {
  std::string text = "# comment\n\n"
                     "CLIENT_HANDSHAKE_TRAFFIC_SECRET " + kRandom + " " + kSecret32 + "\n"
                     "SERVER_HANDSHAKE_TRAFFIC_SECRET " + kRandom + " " + kSecret32 + "\r\n"
                     "CLIENT_TRAFFIC_SECRET_0 " + kRandom + " " + std::string(96, 'F') + "\n"
                     "SERVER_TRAFFIC_SECRET_0 " + kRandom + " " + kSecret32 + "\n";
  auto store = parse_keylog(std::string_view(text));
  CHECK(store.size() == 4);
  ClientRandom r{};
  r.fill(0xAA);
  REQUIRE(store.find(r, SecretLabel::ClientTraffic0) != nullptr);
  CHECK(store.find(r, SecretLabel::ClientTraffic0)->size() == 48);
  CHECK(store.diagnostics().malformed_lines == 0);
}

TEST_CASE("malformed and unknown lines are counted, not fatal") {
  std::string text = "CLIENT_RANDOM " + kRandom + " " + std::string(96, '0') + "\n"
                     "CLIENT_HANDSHAKE_TRAFFIC_SECRET " + kRandom + "\n"
                     "CLIENT_HANDSHAKE_TRAFFIC_SECRET zz " + kSecret32 + "\n"
                     "CLIENT_HANDSHAKE_TRAFFIC_SECRET " + kRandom + " " + std::string(10, '1') + "\n";
  auto store = parse_keylog(std::string_view(text));
  CHECK(store.empty());
  CHECK(store.diagnostics().unknown_labels == 1);
  CHECK(store.diagnostics().malformed_lines == 3);
}

TEST_CASE("duplicate entries: last one wins") {
  std::string text = "SERVER_TRAFFIC_SECRET_0 " + kRandom + " " + kSecret32 + "\n"
                     "SERVER_TRAFFIC_SECRET_0 " + kRandom + " " + std::string(64, '2') + "\n";
  auto store = parse_keylog(std::string_view(text));
  ClientRandom r{};
  r.fill(0xAA);
  CHECK(to_hex(*store.find(r, SecretLabel::ServerTraffic0)) == std::string(64, '2'));
  CHECK(store.diagnostics().duplicates == 1);
}

TEST_CASE("render then parse is the identity, bit-exact lines") {
  std::string text = "SERVER_TRAFFIC_SECRET_0 " + kRandom + " " + kSecret32 + "\n"
                     "CLIENT_HANDSHAKE_TRAFFIC_SECRET " + std::string(64, 'B') + " " + kSecret32 + "\n";
  auto store = parse_keylog(std::string_view(text));
  std::string rendered = render_keylog(store);
  CHECK(parse_keylog(std::string_view(rendered)) == store);
  CHECK(rendered.find("CLIENT_HANDSHAKE_TRAFFIC_SECRET " + std::string(64, 'b') + " " + kSecret32 + "\n") !=
        std::string::npos);
}
