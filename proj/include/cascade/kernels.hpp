#pragma once

// Data-parallel inner loops of the posterior filter.
//
// Every reduction uses one fixed order: eight interleaved partial
// accumulators (lane j takes elements i ≡ j mod 8 of the full blocks),
// folded as ((a0+a4)+(a1+a5)) + ((a2+a6)+(a3+a7)), then the tail added
// left to right. The scalar table is the reference; SIMD tables reproduce it
// bit for bit, so results never depend on which table was selected.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace cascade::kernels {

inline constexpr std::size_t kLanes = 8;

struct KernelTable {
  std::string_view name;
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i w[i] * ((x[i] - c) * (x[i] - c))
  double (*centered_sq_dot)(const double* w, const double* x, double c, std::size_t n);
  double (*max)(const double* x, std::size_t n);
  // out[i] = x[i] * scale + offset
  void (*affine)(const double* x, double scale, double offset, double* out, std::size_t n);
  // acc[i] += inc[i]
  void (*add_inplace)(double* acc, const double* inc, std::size_t n);
};

const KernelTable& scalar();

// nullptr when not compiled in or not supported by the running CPU.
const KernelTable* avx2();
const KernelTable* neon();

// Table used by the library. Chosen once: the CASCADE_SIMD environment
// variable ("scalar", "avx2", "neon", "auto") overrides the default of the
// best supported table.
const KernelTable& active();

// Every table usable on this machine, scalar first.
std::vector<const KernelTable*> available();

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double max(std::span<const double> x) { return active().max(x.data(), x.size()); }

}  // namespace cascade::kernels
