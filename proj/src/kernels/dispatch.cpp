#include <cstdlib>
#include <string_view>

#include "tlslayer/kernels.hpp"

namespace tlslayer::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& select() noexcept {
  if (const char* pin = std::getenv("TLSLAYER_ISA"); pin && std::string_view(pin) == "scalar") {
    return scalar_table();
  }
  if (const auto* t = table_for(Isa::Avx2)) return *t;
  return scalar_table();
}

}  // namespace

const KernelTable* table_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return &scalar_table();
    case Isa::Avx2: return cpu_has_avx2() ? detail::avx2_table() : nullptr;
  }
  return nullptr;
}

const KernelTable& active() noexcept {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace tlslayer::kernels
