#pragma once

#include <array>
#include <string>
#include <string_view>

#include "tlslayer/document.hpp"

// Reference latency measurements (ms) for the 4 KB backend: per layer
// p50, p95, p99 and SD, plus end-to-end percentiles.
namespace refdata {

struct LayerRow {
  double p50, p95, p99, sd;
};

struct Config {
  std::string_view name;
  std::array<LayerRow, 5> layers;  // tcp, tcp_to_tls, tls, tls_to_app, app
  LayerRow e2e;
};

inline constexpr std::array<Config, 5> kFourKb{{
    {"x25519",
     {{{0.360, 0.694, 0.957, 0.248},
       {0.294, 0.635, 0.800, 0.194},
       {5.547, 10.903, 12.697, 2.893},
       {0.526, 1.227, 1.912, 0.389},
       {9.071, 14.866, 17.424, 3.553}}},
     {16.54, 23.41, 26.15, 4.93}},
    {"x25519_MLKEM512",
     {{{0.390, 3.060, 4.147, 0.999},
       {1.866, 4.122, 5.664, 1.196},
       {5.879, 11.296, 13.256, 2.871},
       {0.991, 2.363, 3.479, 0.747},
       {8.880, 14.925, 17.510, 3.544}}},
     {20.26, 26.91, 29.70, 5.70}},
    {"x25519_MLKEM768",
     {{{0.402, 2.720, 4.139, 1.016},
       {1.903, 3.900, 5.534, 1.411},
       {6.495, 11.692, 13.650, 2.982},
       {1.004, 2.576, 3.730, 0.976},
       {8.334, 14.186, 16.868, 3.375}}},
     {19.63, 26.14, 28.30, 6.42}},
    {"MLKEM512",
     {{{0.381, 2.882, 3.892, 0.969},
       {1.726, 3.577, 5.043, 1.065},
       {5.253, 9.999, 12.010, 3.798},
       {0.897, 2.605, 3.647, 1.741},
       {9.087, 15.099, 17.802, 3.581}}},
     {18.92, 25.53, 28.08, 6.15}},
    {"MLKEM1024",
     {{{0.393, 2.397, 3.901, 0.915},
       {1.772, 3.608, 5.088, 1.044},
       {5.450, 10.578, 12.209, 2.701},
       {0.950, 2.536, 3.554, 0.635},
       {8.838, 14.442, 17.026, 3.451}}},
     {19.16, 25.58, 27.73, 5.40}},
}};

inline tlslayer::DocStats stats_of(const LayerRow& r) {
  tlslayer::DocStats s;
  s.p50 = r.p50;
  s.p95 = r.p95;
  s.p99 = r.p99;
  s.sd = r.sd;
  return s;
}

// Hand-encoded analysis document for one configuration.
inline tlslayer::AnalysisDocument document_for(const Config& c) {
  tlslayer::AnalysisDocument doc;
  doc.tool_version = "reference";
  doc.label = std::string(c.name) + " (4 KB)";
  for (std::size_t l = 0; l < 5; ++l) doc.layers[l] = stats_of(c.layers[l]);
  doc.e2e = stats_of(c.e2e);
  doc.metadata.group = std::string(c.name);
  return doc;
}

// Reference normalized overhead: OF TCP-to-TLS, OF TLS, OF combined, COS %.
struct OverheadRow {
  std::string_view name;
  std::array<double, 4> p50;
  std::array<double, 4> p95;
};

inline constexpr std::array<OverheadRow, 4> kOverhead{{
    {"x25519_MLKEM512", {6.35, 1.06, 1.33, 10.6}, {6.49, 1.04, 1.34, 10.8}},
    {"x25519_MLKEM768", {6.47, 1.17, 1.44, 14.1}, {6.14, 1.07, 1.35, 11.6}},
    {"MLKEM512", {5.87, 0.95, 1.19, 6.6}, {5.63, 0.92, 1.18, 6.0}},
    {"MLKEM1024", {6.03, 0.98, 1.24, 7.9}, {5.68, 0.97, 1.23, 7.9}},
}};

}  // namespace refdata
