#include <algorithm>
#include <limits>

#include "cascade/kernels.hpp"
#include "kernel_tables.hpp"

namespace cascade::kernels {

namespace {

double fold(const double (&acc)[kLanes]) {
  const double v0 = acc[0] + acc[4];
  const double v1 = acc[1] + acc[5];
  const double v2 = acc[2] + acc[6];
  const double v3 = acc[3] + acc[7];
  return (v0 + v1) + (v2 + v3);
}

double sum_scalar(const double* x, std::size_t n) {
  double acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t j = 0; j < kLanes; ++j) acc[j] += x[i + j];
  }
  double total = fold(acc);
  for (; i < n; ++i) total += x[i];
  return total;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t j = 0; j < kLanes; ++j) acc[j] += a[i + j] * b[i + j];
  }
  double total = fold(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double centered_sq_dot_scalar(const double* w, const double* x, double c, std::size_t n) {
  double acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t j = 0; j < kLanes; ++j) {
      const double dx = x[i + j] - c;
      acc[j] += w[i + j] * (dx * dx);
    }
  }
  double total = fold(acc);
  for (; i < n; ++i) {
    const double dx = x[i] - c;
    total += w[i] * (dx * dx);
  }
  return total;
}

double max_scalar(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void affine_scalar(const double* x, double scale, double offset, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * scale + offset;
}

void add_inplace_scalar(double* acc, const double* inc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += inc[i];
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{
      "scalar",      sum_scalar,    dot_scalar,        centered_sq_dot_scalar,
      max_scalar,    affine_scalar, add_inplace_scalar,
  };
  return table;
}

}  // namespace cascade::kernels
