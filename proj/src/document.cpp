#include "tlslayer/document.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tlslayer/bytes.hpp"
#include "tlslayer/error.hpp"
#include "tlslayer/groups.hpp"
#include "tlslayer/version.hpp"

namespace tlslayer {

using nlohmann::json;

namespace {

constexpr int kMsDecimals = 3;
constexpr int kRatioDecimals = 2;
constexpr int kPercentDecimals = 1;

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  // "-0.00" renders as "0.00"
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

double round_to(double v, int decimals) {
  double r = std::strtod(fixed(v, decimals).c_str(), nullptr);
  return r == 0 ? 0.0 : r;
}

std::optional<double> round_to(std::optional<double> v, int decimals) {
  if (!v) return v;
  return round_to(*v, decimals);
}

int decimals_for_key(std::string_view key, int inherited) {
  if (key == "of" || key == "of_combined" || key == "delta") return kRatioDecimals;
  if (key.size() > 8 && key.substr(key.size() - 8) == "_percent") return kPercentDecimals;
  return inherited;
}

void write_canonical(std::ostream& out, const json& j, int decimals, int depth) {
  auto indent = [&](int d) { out << std::string(static_cast<std::size_t>(d) * 2, ' '); };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        indent(depth + 1);
        out << json(it.key()).dump() << ": ";
        write_canonical(out, it.value(), decimals_for_key(it.key(), decimals), depth + 1);
      }
      out << "\n";
      indent(depth);
      out << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out << ", ";
        first = false;
        write_canonical(out, v, decimals, depth + 1);
      }
      out << "]";
      return;
    }
    case json::value_t::number_float: out << fixed(j.get<double>(), decimals); return;
    default: out << j.dump(); return;
  }
}

std::string canonical(const json& j) {
  std::ostringstream out;
  write_canonical(out, j, kMsDecimals, 0);
  out << "\n";
  return out.str();
}

json optional_number(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

[[noreturn]] void bad_document(const std::string& what) { throw Error(Errc::InvalidDocument, what); }

std::optional<double> read_number(const json& obj, const char* key) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  if (!obj[key].is_number()) bad_document(std::string(key) + " is not a number");
  return obj[key].get<double>();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::ostringstream out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::string pad(width[i] - r[i].size(), ' ');
      if (i == 0) {
        line += r[i] + pad;
      } else {
        line += "  " + pad + r[i];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << "\n";
  }
  return out.str();
}

std::string cell(std::optional<double> v, int decimals) { return v ? fixed(*v, decimals) : "-"; }

std::optional<EffectClass> effect_class_from_name(std::string_view name) {
  for (auto c : {EffectClass::Negligible, EffectClass::SmallToMedium, EffectClass::Large}) {
    if (effect_class_name(c) == name) return c;
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------

DocStats DocStats::from(const LayerStatistics& s) {
  DocStats d;
  d.count = s.count;
  d.mean = round_to(s.mean, kMsDecimals);
  d.p50 = round_to(s.p50, kMsDecimals);
  d.p90 = round_to(s.p90, kMsDecimals);
  d.p95 = round_to(s.p95, kMsDecimals);
  d.p99 = round_to(s.p99, kMsDecimals);
  d.min = round_to(s.min, kMsDecimals);
  d.max = round_to(s.max, kMsDecimals);
  d.sd = round_to(s.sd, kMsDecimals);
  return d;
}

std::optional<double> DocStats::get(std::string_view stat) const {
  if (stat == "count") return count ? std::optional<double>(static_cast<double>(*count)) : std::nullopt;
  if (stat == "mean") return mean;
  if (stat == "p50") return p50;
  if (stat == "p90") return p90;
  if (stat == "p95") return p95;
  if (stat == "p99") return p99;
  if (stat == "min") return min;
  if (stat == "max") return max;
  if (stat == "sd") return sd;
  return std::nullopt;
}

void DocStats::set(std::string_view stat, double value) {
  if (stat == "count") {
    count = static_cast<std::size_t>(value);
  } else if (stat == "mean") {
    mean = value;
  } else if (stat == "p50") {
    p50 = value;
  } else if (stat == "p90") {
    p90 = value;
  } else if (stat == "p95") {
    p95 = value;
  } else if (stat == "p99") {
    p99 = value;
  } else if (stat == "min") {
    min = value;
  } else if (stat == "max") {
    max = value;
  } else if (stat == "sd") {
    sd = value;
  }
}

AnalysisDocument make_analysis_document(const RunSummary& summary) {
  AnalysisDocument doc;
  doc.tool_version = kToolVersion;
  doc.label = summary.label;
  doc.decrypted = summary.decrypted;
  for (std::size_t i = 0; i < 5; ++i) {
    if (summary.layers[i]) doc.layers[i] = DocStats::from(*summary.layers[i]);
  }
  if (summary.e2e) doc.e2e = DocStats::from(*summary.e2e);
  if (summary.ttlb) doc.ttlb = DocStats::from(*summary.ttlb);
  doc.counts = summary.counts;
  const auto& m = summary.metadata;
  if (m.group) doc.metadata.group = group_name(*m.group);
  doc.metadata.key_share_len = m.key_share_len;
  doc.metadata.client_hello_len = m.client_hello_len;
  doc.metadata.server_hello_len = m.server_hello_len;
  if (m.cipher_suite) doc.metadata.cipher_suite = std::string(cipher_suite_name(*m.cipher_suite));
  return doc;
}

// ---------------------------------------------------------------------------
// Comparison

ComparisonDocument compare_documents(const AnalysisDocument& baseline, const AnalysisDocument& candidate,
                                     const CompareSettings& settings) {
  if (settings.percentiles.empty()) throw Error(Errc::InvalidSpec, "no percentiles requested");
  for (const auto& p : settings.percentiles) {
    if (std::find(kPercentileNames.begin(), kPercentileNames.end(), p) == kPercentileNames.end()) {
      throw Error(Errc::InvalidSpec, "unsupported percentile " + p);
    }
    if (std::count(settings.percentiles.begin(), settings.percentiles.end(), p) > 1) {
      throw Error(Errc::InvalidSpec, "percentile listed twice: " + p);
    }
  }
  if (settings.cos_denominator != "layersum" && settings.cos_denominator != "e2e") {
    throw Error(Errc::InvalidSpec, "cos denominator must be layersum or e2e");
  }
  if (settings.delta_basis != "p50" && settings.delta_basis != "mean") {
    throw Error(Errc::InvalidSpec, "delta basis must be p50 or mean");
  }
  for (const auto* doc : {&baseline, &candidate}) {
    if (!doc->decrypted) throw Error(Errc::IncompatibleDocuments, doc->label + " has no decrypted layers");
    for (auto layer : kLayers) {
      if (!doc->layers[static_cast<std::size_t>(layer)]) {
        throw Error(Errc::IncompatibleDocuments,
                    doc->label + " lacks layer " + std::string(layer_name(layer)));
      }
    }
  }

  auto value = [](const AnalysisDocument& doc, std::size_t layer, const std::string& stat) {
    auto v = doc.layers[layer]->get(stat);
    if (!v) {
      throw Error(Errc::IncompatibleDocuments, doc.label + " lacks " + stat + " for " +
                                                   std::string(layer_name(kLayers[layer])));
    }
    return *v;
  };
  constexpr auto kT2t = static_cast<std::size_t>(Layer::TcpToTls);
  constexpr auto kTls = static_cast<std::size_t>(Layer::TlsHandshake);

  ComparisonDocument out;
  out.tool_version = kToolVersion;
  out.baseline_label = baseline.label;
  out.candidate_label = candidate.label;
  out.percentiles = settings.percentiles;
  out.cos_denominator = settings.cos_denominator;
  out.delta_basis = settings.delta_basis;

  auto e2e_ratio = [&](const std::string& p) -> std::optional<double> {
    if (!baseline.e2e || !candidate.e2e) return std::nullopt;
    auto b = baseline.e2e->get(p);
    auto c = candidate.e2e->get(p);
    if (!b || !c || *b <= 0) return std::nullopt;
    return relative_e2e_overhead(*c, *b);
  };

  for (const auto& p : settings.percentiles) {
    PercentileReport r;
    r.percentile = p;
    std::array<double, 5> base{}, cand{};
    for (std::size_t l = 0; l < 5; ++l) {
      base[l] = value(baseline, l, p);
      cand[l] = value(candidate, l, p);
      if (base[l] > 0) r.of[l] = overhead_factor(cand[l], base[l]);
    }
    if (base[kT2t] + base[kTls] > 0) {
      r.of_combined = combined_overhead_factor(cand[kT2t], cand[kTls], base[kT2t], base[kTls]);
    }
    double denom = 0;
    if (settings.cos_denominator == "layersum") {
      for (double v : cand) denom += v;
    } else {
      auto e = candidate.e2e ? candidate.e2e->get(p) : std::nullopt;
      if (!e) throw Error(Errc::IncompatibleDocuments, candidate.label + " lacks e2e " + p);
      denom = *e;
    }
    if (denom > 0) {
      r.cos_percent = cryptographic_overhead_share(cand[kT2t], cand[kTls], base[kT2t], base[kTls], denom);
    }
    r.relative_e2e_overhead_percent = e2e_ratio(p);
    out.reports.push_back(r);
  }

  for (std::size_t l = 0; l < 5; ++l) {
    auto b = baseline.layers[l]->get(settings.delta_basis);
    auto c = candidate.layers[l]->get(settings.delta_basis);
    auto sd = baseline.layers[l]->sd;
    if (!b || !c || !sd || *sd <= 0) continue;
    EffectSize e = glass_delta(*c, *b, *sd);
    out.effect_sizes[l] = DocEffect{e.delta, e.classification};
  }
  out.relative_e2e_overhead_percent = e2e_ratio("p50");
  return out;
}

ComparisonDocument quantized(ComparisonDocument doc) {
  for (auto& r : doc.reports) {
    for (auto& v : r.of) v = round_to(v, kRatioDecimals);
    r.of_combined = round_to(r.of_combined, kRatioDecimals);
    r.cos_percent = round_to(r.cos_percent, kPercentDecimals);
    r.relative_e2e_overhead_percent = round_to(r.relative_e2e_overhead_percent, kPercentDecimals);
  }
  // Classification stays with the unrounded delta.
  for (auto& e : doc.effect_sizes) {
    if (e) e->delta = round_to(e->delta, kRatioDecimals);
  }
  doc.relative_e2e_overhead_percent = round_to(doc.relative_e2e_overhead_percent, kPercentDecimals);
  return doc;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json stats_json(const DocStats& s) {
  json j = json::object();
  for (auto name : kStatisticNames) {
    auto v = s.get(name);
    if (!v) continue;
    if (name == "count") {
      j["count"] = *s.count;
    } else {
      j[std::string(name)] = *v;
    }
  }
  return j;
}

DocStats stats_from_json(const json& j) {
  if (!j.is_object()) bad_document("statistics block is not an object");
  DocStats s;
  for (auto name : kStatisticNames) {
    std::string key(name);
    if (!j.contains(key) || j[key].is_null()) continue;
    if (name == "count") {
      if (!j[key].is_number_unsigned()) bad_document("count is not a non-negative integer");
      s.count = j[key].get<std::size_t>();
    } else {
      s.set(name, *read_number(j, key.c_str()));
    }
  }
  return s;
}

json to_json(const AnalysisDocument& doc) {
  json j;
  j["schema"] = doc.schema;
  j["tool_version"] = doc.tool_version;
  json inputs = json::object();
  for (const auto& [key, digest] : doc.inputs) inputs[key] = {{"name", digest.name}, {"sha256", digest.sha256}};
  j["inputs"] = inputs;
  j["label"] = doc.label;
  j["mode"] = doc.decrypted ? "decrypted" : "no-decrypt";
  json layers = json::object();
  for (auto layer : kLayers) {
    const auto& s = doc.layers[static_cast<std::size_t>(layer)];
    if (s) layers[std::string(layer_name(layer))] = stats_json(*s);
  }
  j["layers"] = layers;
  if (doc.e2e) j["e2e"] = stats_json(*doc.e2e);
  if (doc.ttlb) j["ttlb"] = stats_json(*doc.ttlb);
  j["counts"] = {{"total_streams", doc.counts.total_streams},
                 {"valid", doc.counts.valid},
                 {"partial_by_reason", doc.counts.partial_by_reason},
                 {"excluded_by_reason", doc.counts.excluded_by_reason}};
  json meta = json::object();
  if (doc.metadata.group) meta["group"] = *doc.metadata.group;
  if (doc.metadata.key_share_len) meta["key_share_len"] = *doc.metadata.key_share_len;
  if (doc.metadata.client_hello_len) meta["client_hello_len"] = *doc.metadata.client_hello_len;
  if (doc.metadata.server_hello_len) meta["server_hello_len"] = *doc.metadata.server_hello_len;
  if (doc.metadata.cipher_suite) meta["cipher_suite"] = *doc.metadata.cipher_suite;
  j["metadata"] = meta;
  j["cos_denominator_mode"] = doc.cos_denominator_mode;
  return j;
}

json to_json(const ComparisonDocument& doc) {
  json j;
  j["schema"] = doc.schema;
  j["tool_version"] = doc.tool_version;
  j["baseline"] = doc.baseline_label;
  j["candidate"] = doc.candidate_label;
  j["percentiles"] = doc.percentiles;
  j["cos_denominator"] = doc.cos_denominator;
  j["delta_basis"] = doc.delta_basis;
  json reports = json::object();
  for (const auto& r : doc.reports) {
    json of = json::object();
    for (auto layer : kLayers) of[std::string(layer_name(layer))] = optional_number(r.of[static_cast<std::size_t>(layer)]);
    reports[r.percentile] = {{"of", of},
                             {"of_combined", optional_number(r.of_combined)},
                             {"cos_percent", optional_number(r.cos_percent)},
                             {"relative_e2e_overhead_percent", optional_number(r.relative_e2e_overhead_percent)}};
  }
  j["reports"] = reports;
  json effects = json::object();
  for (auto layer : kLayers) {
    const auto& e = doc.effect_sizes[static_cast<std::size_t>(layer)];
    effects[std::string(layer_name(layer))] =
        e ? json{{"delta", e->delta}, {"classification", std::string(effect_class_name(e->classification))}}
          : json(nullptr);
  }
  j["effect_sizes"] = effects;
  j["relative_e2e_overhead_percent"] = optional_number(doc.relative_e2e_overhead_percent);
  return j;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    bad_document(e.what());
  }
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) bad_document(std::string("missing ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad_document(std::string(key) + ": " + e.what());
  }
}

}  // namespace

std::string render_json(const AnalysisDocument& doc) { return canonical(to_json(doc)); }
std::string render_json(const ComparisonDocument& doc) { return canonical(to_json(doc)); }

AnalysisDocument parse_analysis_document(std::string_view text) {
  json j = parse_json(text);
  if (!j.is_object()) bad_document("document is not an object");
  AnalysisDocument doc;
  doc.schema = field<std::string>(j, "schema");
  if (doc.schema != kAnalysisSchema) bad_document("unexpected schema " + doc.schema);
  doc.tool_version = j.value("tool_version", "");
  if (j.contains("inputs")) {
    for (auto it = j["inputs"].begin(); it != j["inputs"].end(); ++it) {
      doc.inputs[it.key()] = {field<std::string>(*it, "name"), field<std::string>(*it, "sha256")};
    }
  }
  doc.label = field<std::string>(j, "label");
  auto mode = j.value("mode", "decrypted");
  if (mode != "decrypted" && mode != "no-decrypt") bad_document("unknown mode " + mode);
  doc.decrypted = mode == "decrypted";
  const json layers = j.value("layers", json::object());
  if (!layers.is_object()) bad_document("layers is not an object");
  for (auto it = layers.begin(); it != layers.end(); ++it) {
    auto layer = layer_from_name(it.key());
    if (!layer) bad_document("unknown layer " + it.key());
    doc.layers[static_cast<std::size_t>(*layer)] = stats_from_json(it.value());
  }
  if (j.contains("e2e") && !j["e2e"].is_null()) doc.e2e = stats_from_json(j["e2e"]);
  if (j.contains("ttlb") && !j["ttlb"].is_null()) doc.ttlb = stats_from_json(j["ttlb"]);
  if (j.contains("counts")) {
    const auto& c = j["counts"];
    doc.counts.total_streams = field<std::size_t>(c, "total_streams");
    doc.counts.valid = field<std::size_t>(c, "valid");
    doc.counts.partial_by_reason = c.value("partial_by_reason", std::map<std::string, std::size_t>{});
    doc.counts.excluded_by_reason = c.value("excluded_by_reason", std::map<std::string, std::size_t>{});
  }
  if (j.contains("metadata")) {
    const auto& m = j["metadata"];
    if (m.contains("group")) doc.metadata.group = field<std::string>(m, "group");
    if (m.contains("key_share_len")) doc.metadata.key_share_len = field<std::uint32_t>(m, "key_share_len");
    if (m.contains("client_hello_len")) doc.metadata.client_hello_len = field<std::uint32_t>(m, "client_hello_len");
    if (m.contains("server_hello_len")) doc.metadata.server_hello_len = field<std::uint32_t>(m, "server_hello_len");
    if (m.contains("cipher_suite")) doc.metadata.cipher_suite = field<std::string>(m, "cipher_suite");
  }
  doc.cos_denominator_mode = j.value("cos_denominator_mode", "layersum");
  return doc;
}

ComparisonDocument parse_comparison_document(std::string_view text) {
  json j = parse_json(text);
  if (!j.is_object()) bad_document("document is not an object");
  ComparisonDocument doc;
  doc.schema = field<std::string>(j, "schema");
  if (doc.schema != kComparisonSchema) bad_document("unexpected schema " + doc.schema);
  doc.tool_version = j.value("tool_version", "");
  doc.baseline_label = field<std::string>(j, "baseline");
  doc.candidate_label = field<std::string>(j, "candidate");
  doc.percentiles = field<std::vector<std::string>>(j, "percentiles");
  doc.cos_denominator = field<std::string>(j, "cos_denominator");
  doc.delta_basis = field<std::string>(j, "delta_basis");
  const json reports = j.value("reports", json::object());
  for (const auto& p : doc.percentiles) {
    if (!reports.contains(p)) bad_document("missing report for " + p);
    const json& r = reports[p];
    PercentileReport rep;
    rep.percentile = p;
    const json of = r.value("of", json::object());
    for (auto layer : kLayers) {
      rep.of[static_cast<std::size_t>(layer)] = read_number(of, std::string(layer_name(layer)).c_str());
    }
    rep.of_combined = read_number(r, "of_combined");
    rep.cos_percent = read_number(r, "cos_percent");
    rep.relative_e2e_overhead_percent = read_number(r, "relative_e2e_overhead_percent");
    doc.reports.push_back(rep);
  }
  const json effects = j.value("effect_sizes", json::object());
  for (auto layer : kLayers) {
    std::string key(layer_name(layer));
    if (!effects.contains(key) || effects[key].is_null()) continue;
    auto cls = effect_class_from_name(field<std::string>(effects[key], "classification"));
    if (!cls) bad_document("unknown effect classification");
    doc.effect_sizes[static_cast<std::size_t>(layer)] = DocEffect{*read_number(effects[key], "delta"), *cls};
  }
  doc.relative_e2e_overhead_percent = read_number(j, "relative_e2e_overhead_percent");
  return doc;
}

// ---------------------------------------------------------------------------
// CSV and tables

std::string render_csv(const AnalysisDocument& doc) {
  std::ostringstream out;
  out << "label,layer,statistic,value\n";
  auto block = [&](std::string_view name, const DocStats& s) {
    for (auto stat : kStatisticNames) {
      auto v = s.get(stat);
      std::string value;
      if (v) value = stat == "count" ? std::to_string(*s.count) : fixed(*v, kMsDecimals);
      out << csv_field(doc.label) << ',' << name << ',' << stat << ',' << value << '\n';
    }
  };
  for (auto layer : kLayers) {
    const auto& s = doc.layers[static_cast<std::size_t>(layer)];
    if (s) block(layer_name(layer), *s);
  }
  if (doc.e2e) block("e2e", *doc.e2e);
  return out.str();
}

std::string render_csv(const ComparisonDocument& doc) {
  std::ostringstream out;
  out << "percentile,metric,layer,value\n";
  auto opt = [](std::optional<double> v, int d) { return v ? fixed(*v, d) : std::string(); };
  for (const auto& r : doc.reports) {
    for (auto layer : kLayers) {
      out << r.percentile << ",of," << layer_name(layer) << ','
          << opt(r.of[static_cast<std::size_t>(layer)], kRatioDecimals) << '\n';
    }
    out << r.percentile << ",of_combined,," << opt(r.of_combined, kRatioDecimals) << '\n';
    out << r.percentile << ",cos_percent,," << opt(r.cos_percent, kPercentDecimals) << '\n';
    out << r.percentile << ",relative_e2e_overhead_percent,,"
        << opt(r.relative_e2e_overhead_percent, kPercentDecimals) << '\n';
  }
  for (auto layer : kLayers) {
    const auto& e = doc.effect_sizes[static_cast<std::size_t>(layer)];
    out << doc.delta_basis << ",delta," << layer_name(layer) << ','
        << (e ? fixed(e->delta, kRatioDecimals) : std::string()) << '\n';
  }
  return out.str();
}

std::string render_table(const AnalysisDocument& doc) {
  std::ostringstream out;
  out << doc.label << " (" << (doc.decrypted ? "decrypted" : "no-decrypt") << ")\n";
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"layer [ms]"};
  for (auto stat : kStatisticNames) header.emplace_back(stat);
  rows.push_back(header);
  auto block = [&](std::string_view name, const std::optional<DocStats>& s) {
    if (!s) return;
    std::vector<std::string> row{std::string(name)};
    for (auto stat : kStatisticNames) {
      auto v = s->get(stat);
      row.push_back(!v ? "-" : stat == "count" ? std::to_string(*s->count) : fixed(*v, kMsDecimals));
    }
    rows.push_back(row);
  };
  for (auto layer : kLayers) block(layer_name(layer), doc.layers[static_cast<std::size_t>(layer)]);
  block("e2e", doc.e2e);
  block("ttlb", doc.ttlb);
  out << aligned(rows);
  out << "streams " << doc.counts.total_streams << ", valid " << doc.counts.valid << "\n";
  for (const auto& [reason, n] : doc.counts.partial_by_reason) out << "  partial " << reason << ": " << n << "\n";
  for (const auto& [reason, n] : doc.counts.excluded_by_reason) out << "  excluded " << reason << ": " << n << "\n";
  const auto& m = doc.metadata;
  if (m.group) {
    out << "group " << *m.group;
    if (m.key_share_len) out << ", key_share " << *m.key_share_len << " B";
    if (m.client_hello_len) out << ", ClientHello " << *m.client_hello_len << " B";
    if (m.server_hello_len) out << ", ServerHello " << *m.server_hello_len << " B";
    if (m.cipher_suite) out << ", " << *m.cipher_suite;
    out << "\n";
  }
  return out.str();
}

std::string render_table(const ComparisonDocument& doc) {
  std::ostringstream out;
  out << doc.candidate_label << " vs " << doc.baseline_label << " (COS over " << doc.cos_denominator
      << ", delta on " << doc.delta_basis << ")\n";
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"pct"};
  for (auto layer : kLayers) header.push_back("OF " + std::string(layer_name(layer)));
  header.insert(header.end(), {"OF combined", "COS %", "e2e %"});
  rows.push_back(header);
  for (const auto& r : doc.reports) {
    std::vector<std::string> row{r.percentile};
    for (auto v : r.of) row.push_back(cell(v, kRatioDecimals));
    row.push_back(cell(r.of_combined, kRatioDecimals));
    row.push_back(cell(r.cos_percent, kPercentDecimals));
    row.push_back(cell(r.relative_e2e_overhead_percent, kPercentDecimals));
    rows.push_back(row);
  }
  out << aligned(rows);
  std::vector<std::vector<std::string>> effects{{"layer", "delta", "effect"}};
  for (auto layer : kLayers) {
    const auto& e = doc.effect_sizes[static_cast<std::size_t>(layer)];
    effects.push_back({std::string(layer_name(layer)), e ? fixed(e->delta, kRatioDecimals) : "-",
                       e ? std::string(effect_class_name(e->classification)) : "-"});
  }
  out << aligned(effects);
  return out.str();
}

// ---------------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::UnreadableFile, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::UnreadableFile, path.string());
  return ss.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::CryptoBackend, "sha256");
  }
  return to_hex(ByteView(md, len));
}

}  // namespace tlslayer
