#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Data-parallel inner loops of the statistics stage. Every kernel has a
// scalar reference and, where the CPU allows it, a vector variant chosen at
// runtime. Element-wise kernels are bit-identical across variants;
// reductions differ only by summation order.
namespace tlslayer::kernels {

enum class Isa : std::uint8_t { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;
  double (*sum)(const double* values, std::size_t n);
  // Sum of (x - center)^2.
  double (*sum_squared_deviation)(const double* values, std::size_t n, double center);
  // out[i] = end[i] - start[i]
  void (*difference)(const std::int64_t* end, const std::int64_t* start, std::int64_t* out,
                     std::size_t n);
  // out[i] = ns[i] / 1e6, correctly rounded.
  void (*ns_to_ms)(const std::int64_t* ns, double* out, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* table_for(Isa isa) noexcept;
// Best available variant. TLSLAYER_ISA=scalar in the environment pins the
// scalar reference.
const KernelTable& active() noexcept;

namespace detail {
const KernelTable* avx2_table() noexcept;
}

}  // namespace tlslayer::kernels
