#include <random>

#include "doctest.h"
#include "tlslayer/bytes.hpp"
#include "tlslayer/error.hpp"
#include "tlslayer/timeline.hpp"

using namespace tlslayer;

namespace {

DecryptedMessage app(std::string_view text, std::int64_t ts) {
  return {ContentType::ApplicationData, Bytes(text.begin(), text.end()), ts, 0};
}

ConnectionTimeline timeline_of(std::array<std::int64_t, 6> t) {
  ConnectionTimeline tl;
  for (std::size_t i = 0; i < 6; ++i) tl.t[i] = t[i];
  tl.validity = Validity::Valid;
  return tl;
}

TcpConnection conn_with(std::int64_t syn, std::optional<std::int64_t> synack) {
  TcpConnection c;
  c.t_syn = syn;
  c.t_synack = synack;
  return c;
}

}  // namespace

TEST_CASE("request detection by method token") {
  std::vector<DecryptedMessage> msgs{app("continuation of a body", 5), app("GET /customers HTTP/1.1\r\n", 9)};
  CHECK(detect_http_request(msgs) == 9);
  std::vector<DecryptedMessage> h2{app("PRI * HTTP/2.0\r\n\r\nSM\r\n\r\n", 4)};
  CHECK(detect_http_request(h2) == 4);
  std::vector<DecryptedMessage> none;
  try {
    detect_http_request(none);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoRequestFound);
  }
  std::vector<DecryptedMessage> no_space{app("GETX /", 1)};
  CHECK_THROWS_AS(detect_http_request(no_space), Error);
}

TEST_CASE("response detection takes the status-line record") {
  std::vector<DecryptedMessage> msgs{app("HTTP/1.1 200 OK\r\n", 3), app("HTTP/1.1 200 OK\r\nContent-Length: 0\r\n\r\n", 50),
                                     app("body", 60)};
  auto r = detect_http_response(msgs, 10);
  CHECK(r.status == 200);
  CHECK(r.timestamp_ns == 50);
  std::vector<DecryptedMessage> err{app("HTTP/1.1 503 Service Unavailable\r\n", 70)};
  CHECK(detect_http_response(err, 0).status == 503);
  std::vector<DecryptedMessage> none{app("hello", 70)};
  CHECK_THROWS_AS(detect_http_response(none, 0), Error);
}

TEST_CASE("deltas of the x25519 median row") {
  auto tl = timeline_of({0, 360'000, 654'000, 6'201'000, 6'727'000, 15'798'000});
  auto d = compute_deltas(tl);
  CHECK(d.layer_ns == std::array<std::int64_t, 5>{360'000, 294'000, 5'547'000, 526'000, 9'071'000});
  CHECK(d.layer_ms(Layer::TlsHandshake) == 5.547);
  CHECK(d.layer_ms(Layer::AppResponse) == 9.071);
  CHECK(d.e2e_ns == 15'798'000);
}

TEST_CASE("all boundaries equal gives zeros") {
  auto d = compute_deltas(timeline_of({7, 7, 7, 7, 7, 7}));
  CHECK(d.e2e_ns == 0);
  for (auto v : d.layer_ns) CHECK(v == 0);
}

TEST_CASE("compute_deltas rejects non-valid timelines") {
  auto tl = timeline_of({0, 1, 2, 3, 4, 5});
  tl.validity = Validity::Partial;
  try {
    compute_deltas(tl);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidTimeline);
  }
}

TEST_CASE("additivity and translation invariance over random timelines") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10'000; ++i) {
    std::array<std::int64_t, 6> t{};
    t[0] = static_cast<std::int64_t>(rng() % 4'000'000'000'000'000);
    for (std::size_t k = 1; k < 6; ++k) t[k] = t[k - 1] + static_cast<std::int64_t>(rng() % 50'000'000);
    auto d = compute_deltas(timeline_of(t));
    std::int64_t sum = 0;
    for (auto v : d.layer_ns) {
      REQUIRE(v >= 0);
      sum += v;
    }
    REQUIRE(sum == d.e2e_ns);
    auto shift = static_cast<std::int64_t>(rng() % 1'000'000'000'000) - 500'000'000'000;
    auto shifted = t;
    for (auto& v : shifted) v += shift;
    REQUIRE(compute_deltas(timeline_of(shifted)) == d);
  }
}

TEST_CASE("build_timeline validity rules") {
  ClientHelloInfo hello;
  hello.total_length = 512;
  hello.key_shares = {{0x001D, 32}};
  ServerHelloInfo sh;
  sh.total_length = 122;
  sh.selected_group = 0x001D;

  ObservedBoundaries b;
  b.t_clienthello = 30;
  b.t_client_finished = 40;
  b.t_http_get = 50;
  b.t_http_200 = 60;
  b.http_status = 200;

  SUBCASE("complete") {
    auto tl = build_timeline(conn_with(10, 20), &hello, &sh, b);
    CHECK(tl.validity == Validity::Valid);
    CHECK(tl.boundary_prefix() == 6);
    CHECK(tl.key_share_len == 32);
    CHECK(tl.client_hello_len == 512);
  }
  SUBCASE("missing keys leaves the TCP prefix") {
    ObservedBoundaries partial;
    partial.t_clienthello = 30;
    partial.stopped_by = TimelineIssue::NoKeys;
    auto tl = build_timeline(conn_with(10, 20), &hello, &sh, partial);
    CHECK(tl.validity == Validity::Partial);
    CHECK(tl.issue == TimelineIssue::NoKeys);
    CHECK(tl.boundary_prefix() == 3);
    CHECK(layer_duration_ns(tl, Layer::TcpToTls) == 10);
    CHECK_FALSE(layer_duration_ns(tl, Layer::TlsHandshake).has_value());
  }
  SUBCASE("GET before Finished is an ordering exclusion") {
    b.t_http_get = 35;
    auto tl = build_timeline(conn_with(10, 20), &hello, &sh, b);
    CHECK(tl.validity == Validity::Excluded);
    CHECK(tl.issue == TimelineIssue::Ordering);
    CHECK_FALSE(layer_duration_ns(tl, Layer::TcpHandshake).has_value());
  }
  SUBCASE("non-200 is excluded") {
    b.http_status = 404;
    auto tl = build_timeline(conn_with(10, 20), &hello, &sh, b);
    CHECK(tl.validity == Validity::Excluded);
    CHECK(tl.issue == TimelineIssue::NonOkStatus);
  }
  SUBCASE("HelloRetryRequest is excluded") {
    sh.hello_retry_request = true;
    auto tl = build_timeline(conn_with(10, 20), &hello, &sh, b);
    CHECK(tl.validity == Validity::Excluded);
    CHECK(tl.issue == TimelineIssue::HelloRetry);
  }
  SUBCASE("no SYN-ACK") {
    auto tl = build_timeline(conn_with(10, std::nullopt), &hello, &sh, b);
    CHECK(tl.validity == Validity::Excluded);
    CHECK(tl.issue == TimelineIssue::NoSynAck);
  }
}
