#include <sstream>

#include "doctest.h"
#include "reference_data.hpp"
#include "support.hpp"
#include "tlslayer/document.hpp"
#include "tlslayer/error.hpp"

using namespace tlslayer;

namespace {

AnalysisDocument synthetic_document() {
  auto out = synth::generate(testsupport::mixed_scenario(30, 2));
  auto r = testsupport::run_pipeline(out);
  auto doc = make_analysis_document(summarize_run("mixed", r.timelines, true));
  doc.inputs["capture"] = {"capture.pcap", std::string(64, 'a')};
  return doc;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("analysis document JSON round-trip") {
  auto doc = synthetic_document();
  auto text = render_json(doc);
  auto back = parse_analysis_document(text);
  CHECK(back == doc);
  CHECK(render_json(back) == text);
}

TEST_CASE("hand-encoded documents round-trip") {
  for (const auto& c : refdata::kFourKb) {
    auto doc = refdata::document_for(c);
    CHECK(parse_analysis_document(render_json(doc)) == doc);
  }
}

TEST_CASE("canonical JSON precision") {
  AnalysisDocument doc;
  doc.label = "x";
  DocStats s;
  s.p50 = 1.23456;
  s.count = 3;
  doc.layers[0] = s;
  auto text = render_json(doc);
  CHECK(text.find("\"p50\": 1.235") != std::string::npos);
  CHECK(text.find("\"count\": 3") != std::string::npos);
  // keys sorted
  CHECK(text.find("\"counts\"") < text.find("\"label\""));

  auto base = refdata::document_for(refdata::kFourKb[0]);
  auto cand = refdata::document_for(refdata::kFourKb[2]);
  auto cmp = quantized(compare_documents(base, cand, {}));
  auto ctext = render_json(cmp);
  CHECK(ctext.find("\"of_combined\": 1.44") != std::string::npos);
  CHECK(ctext.find("\"cos_percent\": 14.1") != std::string::npos);
  CHECK(ctext.find("\"tcp_to_tls\": 6.47") != std::string::npos);
  CHECK(parse_comparison_document(ctext) == cmp);
}

TEST_CASE("baseline against itself gives identity metrics") {
  for (const auto& doc : {synthetic_document(), refdata::document_for(refdata::kFourKb[1])}) {
    for (const char* mode : {"layersum", "e2e"}) {
      CompareSettings settings;
      settings.cos_denominator = mode;
      settings.percentiles = {"p50", "p95", "p99"};
      auto cmp = compare_documents(doc, doc, settings);
      for (const auto& r : cmp.reports) {
        for (auto of : r.of) CHECK(of == 1.0);
        CHECK(r.of_combined == 1.0);
        CHECK(r.cos_percent == 0.0);
        CHECK(r.relative_e2e_overhead_percent == 0.0);
      }
      for (const auto& e : cmp.effect_sizes) {
        REQUIRE(e.has_value());
        CHECK(e->delta == 0.0);
      }
    }
  }
}

TEST_CASE("incompatible documents") {
  auto base = refdata::document_for(refdata::kFourKb[0]);
  auto cand = refdata::document_for(refdata::kFourKb[1]);
  auto no_decrypt = cand;
  no_decrypt.decrypted = false;
  no_decrypt.layers[2].reset();
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::WriteFailure;
  };
  CHECK(code([&] { compare_documents(base, no_decrypt, {}); }) == Errc::IncompatibleDocuments);
  CompareSettings p90;
  p90.percentiles = {"p90"};
  CHECK(code([&] { compare_documents(base, cand, p90); }) == Errc::IncompatibleDocuments);
  CompareSettings bad;
  bad.percentiles = {"p75"};
  CHECK(code([&] { compare_documents(base, cand, bad); }) == Errc::InvalidSpec);
  CHECK(code([] { parse_analysis_document("{\"schema\": \"other\"}"); }) == Errc::InvalidDocument);
  CHECK(code([] { parse_analysis_document("[1,2"); }) == Errc::InvalidDocument);
}

TEST_CASE("CSV has one row per layer and statistic") {
  auto doc = synthetic_document();
  auto csv = render_csv(doc);
  CHECK(lines(csv) == 1 + 5 * kStatisticNames.size() + kStatisticNames.size());
  auto partial = doc;
  partial.decrypted = false;
  for (std::size_t l = 2; l < 5; ++l) partial.layers[l].reset();
  partial.e2e.reset();
  CHECK(lines(render_csv(partial)) == 1 + 2 * kStatisticNames.size());
}

TEST_CASE("comparison table shows two-decimal OF and one-decimal COS") {
  auto base = refdata::document_for(refdata::kFourKb[0]);
  auto cand = refdata::document_for(refdata::kFourKb[4]);
  auto table = render_table(quantized(compare_documents(base, cand, {})));
  CHECK(table.find("6.03") != std::string::npos);
  CHECK(table.find("0.98") != std::string::npos);
  CHECK(table.find("1.24") != std::string::npos);
  CHECK(table.find("7.9") != std::string::npos);
  CHECK(table.find("5.68") != std::string::npos);
}
