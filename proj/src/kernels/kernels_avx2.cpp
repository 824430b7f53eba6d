#include "tlslayer/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace tlslayer::kernels::detail {

namespace {

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double sum(const double* values, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(values + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(values + i + 4));
  }
  for (; i + 4 <= n; i += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(values + i));
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += values[i];
  return acc;
}

double sum_squared_deviation(const double* values, std::size_t n, double center) {
  const __m256d c = _mm256_set1_pd(center);
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(values + i), c);
    __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(values + i + 4), c);
    a0 = _mm256_add_pd(a0, _mm256_mul_pd(d0, d0));
    a1 = _mm256_add_pd(a1, _mm256_mul_pd(d1, d1));
  }
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(values + i), c);
    a0 = _mm256_add_pd(a0, _mm256_mul_pd(d, d));
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) {
    double d = values[i] - center;
    acc += d * d;
  }
  return acc;
}

void difference(const std::int64_t* end, const std::int64_t* start, std::int64_t* out,
                std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i e = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(end + i));
    __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(start + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_sub_epi64(e, s));
  }
  for (; i < n; ++i) out[i] = end[i] - start[i];
}

// int64 -> double without AVX-512: adding 1.5 * 2^52 places the integer in
// the mantissa. Exact for |x| < 2^51; other blocks take the scalar path.
void ns_to_ms(const std::int64_t* ns, double* out, std::size_t n) {
  constexpr std::int64_t kLimit = std::int64_t{1} << 51;
  const __m256i magic_i = _mm256_castpd_si256(_mm256_set1_pd(6755399441055744.0));
  const __m256d magic_d = _mm256_set1_pd(6755399441055744.0);
  const __m256d scale = _mm256_set1_pd(1e6);
  const __m256i hi = _mm256_set1_epi64x(kLimit);
  const __m256i lo = _mm256_set1_epi64x(-kLimit);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(ns + i));
    __m256i out_of_range =
        _mm256_or_si256(_mm256_cmpgt_epi64(x, hi), _mm256_cmpgt_epi64(lo, x));
    if (!_mm256_testz_si256(out_of_range, out_of_range)) {
      for (std::size_t k = i; k < i + 4; ++k) out[k] = static_cast<double>(ns[k]) / 1e6;
      continue;
    }
    __m256d d = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(x, magic_i)), magic_d);
    _mm256_storeu_pd(out + i, _mm256_div_pd(d, scale));
  }
  for (; i < n; ++i) out[i] = static_cast<double>(ns[i]) / 1e6;
}

constexpr KernelTable kAvx2{Isa::Avx2, "avx2", sum, sum_squared_deviation, difference, ns_to_ms};

}  // namespace

const KernelTable* avx2_table() noexcept { return &kAvx2; }

}  // namespace tlslayer::kernels::detail

#else

namespace tlslayer::kernels::detail {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace tlslayer::kernels::detail

#endif
