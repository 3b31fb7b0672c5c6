// Compiled with -mavx2 (no -mfma). Only reached after a CPUID check.
#include <immintrin.h>

#include "pacsyn/kernels.hpp"

namespace pacsyn::kernels {
namespace {

inline __m256i tail_mask(std::size_t rem) {
  const __m256i lanes = _mm256_set_epi64x(3, 2, 1, 0);
  return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(rem)), lanes);
}

inline double reduce_add(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

inline double reduce_max(__m256d m) {
  const __m128d lo = _mm256_castpd256_pd128(m);
  const __m128d hi = _mm256_extractf128_pd(m, 1);
  const __m128d s = _mm_max_pd(lo, hi);
  const double a = _mm_cvtsd_f64(s);
  const double b = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
  return a > b ? a : b;
}

double gather_dot_avx2(const double* w, const std::uint32_t* idx, std::size_t n,
                       const double* values) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i ix = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    const __m256d v = _mm256_i32gather_pd(values, ix, 8);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), v));
  }
  if (i < n) {
    const std::size_t rem = n - i;
    alignas(16) std::int32_t tail_idx[4] = {0, 0, 0, 0};
    for (std::size_t j = 0; j < rem; ++j) tail_idx[j] = static_cast<std::int32_t>(idx[i + j]);
    const __m256i mask = tail_mask(rem);
    const __m256d wv = _mm256_maskload_pd(w + i, mask);
    const __m128i ix = _mm_load_si128(reinterpret_cast<const __m128i*>(tail_idx));
    const __m256d v = _mm256_mask_i32gather_pd(_mm256_setzero_pd(), values, ix,
                                               _mm256_castsi256_pd(mask), 8);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(wv, v));
  }
  return reduce_add(acc);
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  if (i < n) {
    const __m256i mask = tail_mask(n - i);
    const __m256d d = _mm256_sub_pd(_mm256_maskload_pd(a + i, mask), _mm256_maskload_pd(b + i, mask));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  return reduce_max(m);
}

inline __m256d load_counts(const std::uint32_t* counts, std::size_t n) {
  alignas(16) std::int32_t buf[4] = {0, 0, 0, 0};
  for (std::size_t j = 0; j < n; ++j) buf[j] = static_cast<std::int32_t>(counts[j]);
  return _mm256_cvtepi32_pd(_mm_load_si128(reinterpret_cast<const __m128i*>(buf)));
}

inline __m256d mle_var(__m256d c, __m256d t, __m256d den) {
  return _mm256_div_pd(_mm256_mul_pd(c, _mm256_sub_pd(t, c)), den);
}

double max_mle_variance_avx2(const std::uint32_t* counts, std::size_t n, std::uint64_t total) {
  const double td = static_cast<double>(total);
  const __m256d t = _mm256_set1_pd(td);
  const __m256d den = _mm256_set1_pd((td * td) * (td + 1.0));
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d c = _mm256_cvtepi32_pd(_mm_loadu_si128(reinterpret_cast<const __m128i*>(counts + i)));
    m = _mm256_max_pd(m, mle_var(c, t, den));
  }
  // Zero counts in the padding lanes give variance 0, which cannot raise the max.
  if (i < n) m = _mm256_max_pd(m, mle_var(load_counts(counts + i, n - i), t, den));
  return reduce_max(m);
}

void mle_moments_avx2(const std::uint32_t* counts, std::size_t n, std::uint64_t total,
                      double* mean, double* var) {
  const double td = static_cast<double>(total);
  const __m256d t = _mm256_set1_pd(td);
  const __m256d den = _mm256_set1_pd((td * td) * (td + 1.0));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d c = _mm256_cvtepi32_pd(_mm_loadu_si128(reinterpret_cast<const __m128i*>(counts + i)));
    _mm256_storeu_pd(mean + i, _mm256_div_pd(c, t));
    _mm256_storeu_pd(var + i, mle_var(c, t, den));
  }
  if (i < n) {
    const __m256i mask = tail_mask(n - i);
    const __m256d c = load_counts(counts + i, n - i);
    _mm256_maskstore_pd(mean + i, mask, _mm256_div_pd(c, t));
    _mm256_maskstore_pd(var + i, mask, mle_var(c, t, den));
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{gather_dot_avx2, max_abs_diff_avx2, max_mle_variance_avx2,
                                 mle_moments_avx2};
  return &table;
}

}  // namespace pacsyn::kernels
