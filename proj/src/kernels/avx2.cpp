// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <limits>

#include "cascade/kernels.hpp"
#include "kernel_tables.hpp"

namespace cascade::kernels::detail {

namespace {

// Lanes 0..3 live in lo, 4..7 in hi; matches the scalar fold.
inline double fold(__m256d lo, __m256d hi) {
  const __m256d v = _mm256_add_pd(lo, hi);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d lo = _mm256_setzero_pd();
  __m256d hi = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    lo = _mm256_add_pd(lo, _mm256_loadu_pd(x + i));
    hi = _mm256_add_pd(hi, _mm256_loadu_pd(x + i + 4));
  }
  double total = fold(lo, hi);
  for (; i < n; ++i) total += x[i];
  return total;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d lo = _mm256_setzero_pd();
  __m256d hi = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    lo = _mm256_add_pd(lo, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    hi = _mm256_add_pd(hi, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  double total = fold(lo, hi);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double centered_sq_dot_avx2(const double* w, const double* x, double c, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  __m256d lo = _mm256_setzero_pd();
  __m256d hi = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), vc);
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), vc);
    lo = _mm256_add_pd(lo, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(d0, d0)));
    hi = _mm256_add_pd(hi, _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_mul_pd(d1, d1)));
  }
  double total = fold(lo, hi);
  for (; i < n; ++i) {
    const double dx = x[i] - c;
    total += w[i] * (dx * dx);
  }
  return total;
}

double max_avx2(const double* x, std::size_t n) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  __m256d lo = _mm256_set1_pd(neg_inf);
  __m256d hi = _mm256_set1_pd(neg_inf);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    lo = _mm256_max_pd(lo, _mm256_loadu_pd(x + i));
    hi = _mm256_max_pd(hi, _mm256_loadu_pd(x + i + 4));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_max_pd(lo, hi));
  double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void affine_avx2(const double* x, double scale, double offset, double* out, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(scale);
  const __m256d vo = _mm256_set1_pd(offset);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(x + i), vs), vo));
  }
  for (; i < n; ++i) out[i] = x[i] * scale + offset;
}

void add_inplace_avx2(double* acc, const double* inc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(inc + i)));
  }
  for (; i < n; ++i) acc[i] += inc[i];
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      "avx2",     sum_avx2,    dot_avx2,         centered_sq_dot_avx2,
      max_avx2,   affine_avx2, add_inplace_avx2,
  };
  return table;
}

}  // namespace cascade::kernels::detail
