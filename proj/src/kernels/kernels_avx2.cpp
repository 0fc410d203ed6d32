// Compiled with -mavx2. Only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cstddef>

#include "noveldetect/kernels.hpp"

namespace noveldetect::kernels::avx2 {

namespace {

inline double fold(__m256d acc) {
  __m128d lo = _mm256_castpd256_pd128(acc);   // l0 l1
  __m128d hi = _mm256_extractf128_pd(acc, 1);  // l2 l3
  __m128d pair = _mm_add_pd(lo, hi);          // l0+l2 l1+l3
  __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

}  // namespace

double sum(std::span<const double> values) {
  const std::size_t n = values.size();
  const std::size_t blocks = n / 4 * 4;
  const double* data = values.data();
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t j = 0; j < blocks; j += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(data + j));
  }
  double total = fold(acc);
  for (std::size_t j = blocks; j < n; ++j) total += data[j];
  return total;
}

double gather_min_sum(const double* dense, std::span<const TermId> ids, std::span<const double> weights) {
  const std::size_t n = ids.size();
  const std::size_t blocks = n / 4 * 4;
  const TermId* idx = ids.data();
  const double* w = weights.data();
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t j = 0; j < blocks; j += 4) {
    __m128i vindex = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + j));
    __m256d pooled = _mm256_i32gather_pd(dense, vindex, 8);
    __m256d own = _mm256_loadu_pd(w + j);
    acc = _mm256_add_pd(acc, _mm256_min_pd(pooled, own));
  }
  double total = fold(acc);
  for (std::size_t j = blocks; j < n; ++j) total += std::min(dense[idx[j]], w[j]);
  return total;
}

}  // namespace noveldetect::kernels::avx2
