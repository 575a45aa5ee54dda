// AArch64 Advanced SIMD variant. float64x2 registers: acc01, acc23, acc45,
// acc67 hold the eight reference lanes.

#include <arm_neon.h>

#include <algorithm>
#include <limits>

#include "cascade/kernels.hpp"
#include "kernel_tables.hpp"

namespace cascade::kernels::detail {

namespace {

struct Lanes {
  float64x2_t a01 = vdupq_n_f64(0.0);
  float64x2_t a23 = vdupq_n_f64(0.0);
  float64x2_t a45 = vdupq_n_f64(0.0);
  float64x2_t a67 = vdupq_n_f64(0.0);

  double fold() const {
    const float64x2_t v01 = vaddq_f64(a01, a45);
    const float64x2_t v23 = vaddq_f64(a23, a67);
    return (vgetq_lane_f64(v01, 0) + vgetq_lane_f64(v01, 1)) +
           (vgetq_lane_f64(v23, 0) + vgetq_lane_f64(v23, 1));
  }
};

double sum_neon(const double* x, std::size_t n) {
  Lanes acc;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    acc.a01 = vaddq_f64(acc.a01, vld1q_f64(x + i));
    acc.a23 = vaddq_f64(acc.a23, vld1q_f64(x + i + 2));
    acc.a45 = vaddq_f64(acc.a45, vld1q_f64(x + i + 4));
    acc.a67 = vaddq_f64(acc.a67, vld1q_f64(x + i + 6));
  }
  double total = acc.fold();
  for (; i < n; ++i) total += x[i];
  return total;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  Lanes acc;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    // vmulq then vaddq, never vfmaq: the reference rounds the product.
    acc.a01 = vaddq_f64(acc.a01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc.a23 = vaddq_f64(acc.a23, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    acc.a45 = vaddq_f64(acc.a45, vmulq_f64(vld1q_f64(a + i + 4), vld1q_f64(b + i + 4)));
    acc.a67 = vaddq_f64(acc.a67, vmulq_f64(vld1q_f64(a + i + 6), vld1q_f64(b + i + 6)));
  }
  double total = acc.fold();
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

inline float64x2_t weighted_sq(const double* w, const double* x, float64x2_t c) {
  const float64x2_t d = vsubq_f64(vld1q_f64(x), c);
  return vmulq_f64(vld1q_f64(w), vmulq_f64(d, d));
}

double centered_sq_dot_neon(const double* w, const double* x, double c, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  Lanes acc;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    acc.a01 = vaddq_f64(acc.a01, weighted_sq(w + i, x + i, vc));
    acc.a23 = vaddq_f64(acc.a23, weighted_sq(w + i + 2, x + i + 2, vc));
    acc.a45 = vaddq_f64(acc.a45, weighted_sq(w + i + 4, x + i + 4, vc));
    acc.a67 = vaddq_f64(acc.a67, weighted_sq(w + i + 6, x + i + 6, vc));
  }
  double total = acc.fold();
  for (; i < n; ++i) {
    const double dx = x[i] - c;
    total += w[i] * (dx * dx);
  }
  return total;
}

double max_neon(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 2) {
    float64x2_t acc = vdupq_n_f64(m);
    for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vld1q_f64(x + i));
    m = std::max(vgetq_lane_f64(acc, 0), vgetq_lane_f64(acc, 1));
  }
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void affine_neon(const double* x, double scale, double offset, double* out, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(scale);
  const float64x2_t vo = vdupq_n_f64(offset);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vaddq_f64(vmulq_f64(vld1q_f64(x + i), vs), vo));
  for (; i < n; ++i) out[i] = x[i] * scale + offset;
}

void add_inplace_neon(double* acc, const double* inc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vld1q_f64(inc + i)));
  for (; i < n; ++i) acc[i] += inc[i];
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{
      "neon",     sum_neon,    dot_neon,         centered_sq_dot_neon,
      max_neon,   affine_neon, add_inplace_neon,
  };
  return table;
}

}  // namespace cascade::kernels::detail
