#include <cstring>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tlslayer/kernels.hpp"

using namespace tlslayer;

namespace {

std::vector<const kernels::KernelTable*> vector_tables() {
  std::vector<const kernels::KernelTable*> out;
  if (const auto* t = kernels::table_for(kernels::Isa::Avx2)) out.push_back(t);
  return out;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar table is always available and active is one of the tables") {
  CHECK(kernels::table_for(kernels::Isa::Scalar) == &kernels::scalar_table());
  const auto& a = kernels::active();
  CHECK((a.isa == kernels::Isa::Scalar || kernels::table_for(a.isa) == &a));
}

TEST_CASE("element-wise kernels are bit-identical to the scalar reference") {
  const auto& ref = kernels::scalar_table();
  std::mt19937_64 rng(41);
  for (const auto* t : vector_tables()) {
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 17u, 1000u, 1023u}) {
      std::vector<std::int64_t> start(n), end(n);
      for (std::size_t i = 0; i < n; ++i) {
        start[i] = static_cast<std::int64_t>(rng() >> 2);
        end[i] = start[i] + static_cast<std::int64_t>(rng() % 100'000'000'000);
      }
      // a few values outside the fast conversion range
      if (n > 2) {
        end[1] = INT64_MAX / 2;
        start[1] = -(INT64_MAX / 2);
        end[2] = -(std::int64_t{1} << 60);
      }
      std::vector<std::int64_t> d_ref(n), d_vec(n);
      ref.difference(end.data(), start.data(), d_ref.data(), n);
      t->difference(end.data(), start.data(), d_vec.data(), n);
      CHECK(d_ref == d_vec);

      std::vector<double> m_ref(n), m_vec(n);
      ref.ns_to_ms(end.data(), m_ref.data(), n);
      t->ns_to_ms(end.data(), m_vec.data(), n);
      CHECK(same_bits(m_ref, m_vec));
      for (std::size_t i = 0; i < n; ++i) CHECK(m_ref[i] == static_cast<double>(end[i]) / 1e6);
    }
  }
}

TEST_CASE("reductions agree with the scalar reference to 1e-12 relative") {
  const auto& ref = kernels::scalar_table();
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> d(0, 50);
  for (const auto* t : vector_tables()) {
    for (std::size_t n : {1u, 5u, 16u, 333u, 30000u}) {
      std::vector<double> v(n);
      for (auto& x : v) x = d(rng);
      double center = ref.sum(v.data(), n) / static_cast<double>(n);
      CHECK(testsupport::close_rel(t->sum(v.data(), n), ref.sum(v.data(), n), 1e-12));
      CHECK(testsupport::close_rel(t->sum_squared_deviation(v.data(), n, center),
                                   ref.sum_squared_deviation(v.data(), n, center), 1e-12));
    }
  }
}
