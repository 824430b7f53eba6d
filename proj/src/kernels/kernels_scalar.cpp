#include "tlslayer/kernels.hpp"

namespace tlslayer::kernels {

namespace {

double sum(const double* values, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += values[i];
  return acc;
}

double sum_squared_deviation(const double* values, std::size_t n, double center) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = values[i] - center;
    acc += d * d;
  }
  return acc;
}

void difference(const std::int64_t* end, const std::int64_t* start, std::int64_t* out,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = end[i] - start[i];
}

void ns_to_ms(const std::int64_t* ns, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(ns[i]) / 1e6;
}

constexpr KernelTable kScalar{Isa::Scalar, "scalar", sum, sum_squared_deviation, difference,
                              ns_to_ms};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace tlslayer::kernels
