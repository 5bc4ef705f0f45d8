#include <immintrin.h>

#include "tei/kernels.hpp"

namespace tei::kernels::avx2 {

namespace {

// Lane-wise running best; on equal values the lower index wins, which keeps the
// reduction identical to the left-to-right scalar scan.
struct Lanes {
  alignas(32) double v[4];
  alignas(32) double idx[4];
};

}  // namespace

MinArg min_diff_argmin(const double* c, const double* g, std::size_t n) {
  if (n < 8) return scalar::min_diff_argmin(c, g, n);
  __m256d best = _mm256_sub_pd(_mm256_loadu_pd(c), _mm256_loadu_pd(g));
  __m256d best_i = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  __m256d cur_i = best_i;
  const __m256d step = _mm256_set1_pd(4.0);
  std::size_t j = 4;
  for (; j + 4 <= n; j += 4) {
    cur_i = _mm256_add_pd(cur_i, step);
    const __m256d v = _mm256_sub_pd(_mm256_loadu_pd(c + j), _mm256_loadu_pd(g + j));
    const __m256d lt = _mm256_cmp_pd(v, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, v, lt);
    best_i = _mm256_blendv_pd(best_i, cur_i, lt);
  }
  Lanes l;
  _mm256_store_pd(l.v, best);
  _mm256_store_pd(l.idx, best_i);
  MinArg out{l.v[0], static_cast<std::size_t>(l.idx[0])};
  for (int k = 1; k < 4; ++k) {
    const auto ik = static_cast<std::size_t>(l.idx[k]);
    if (l.v[k] < out.value || (l.v[k] == out.value && ik < out.index)) {
      out.value = l.v[k];
      out.index = ik;
    }
  }
  for (; j < n; ++j) {
    const double v = c[j] - g[j];
    if (v < out.value) {
      out.value = v;
      out.index = j;
    }
  }
  return out;
}

MaxArg max_scaled_increment(const double* g, const double* w, double gi, std::size_t n) {
  if (n < 8) return scalar::max_scaled_increment(g, w, gi, n);
  const __m256d vgi = _mm256_set1_pd(gi);
  const double none = static_cast<double>(n);
  __m256d best = _mm256_setzero_pd();
  __m256d best_i = _mm256_set1_pd(none);
  __m256d cur_i = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const __m256d step = _mm256_set1_pd(4.0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d v = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(g + j), vgi), _mm256_loadu_pd(w + j));
    const __m256d gt = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
    best = _mm256_blendv_pd(best, v, gt);
    best_i = _mm256_blendv_pd(best_i, cur_i, gt);
    cur_i = _mm256_add_pd(cur_i, step);
  }
  Lanes l;
  _mm256_store_pd(l.v, best);
  _mm256_store_pd(l.idx, best_i);
  MaxArg out{0.0, n};
  for (int k = 0; k < 4; ++k) {
    const auto ik = static_cast<std::size_t>(l.idx[k]);
    if (l.v[k] > out.value || (l.v[k] == out.value && l.v[k] > 0.0 && ik < out.index)) {
      out.value = l.v[k];
      out.index = ik;
    }
  }
  for (; j < n; ++j) {
    const double v = (g[j] - gi) * w[j];
    if (v > out.value) {
      out.value = v;
      out.index = j;
    }
  }
  return out;
}

}  // namespace tei::kernels::avx2
