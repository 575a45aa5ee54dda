#include <cstdlib>
#include <iostream>
#include <string_view>

#include "cascade/kernels.hpp"
#include "kernel_tables.hpp"

namespace cascade::kernels {

const KernelTable* avx2() {
#if defined(CASCADE_HAVE_AVX2_KERNELS)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon() {
#if defined(CASCADE_HAVE_NEON_KERNELS)
  return &detail::neon_table();
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out{&scalar()};
  if (const KernelTable* t = avx2()) out.push_back(t);
  if (const KernelTable* t = neon()) out.push_back(t);
  return out;
}

namespace {

const KernelTable& select() {
  const char* env = std::getenv("CASCADE_SIMD");
  const std::string_view want = env ? env : "auto";
  if (want == "scalar") return scalar();
  for (const KernelTable* t : available()) {
    if (t->name == want) return *t;
  }
  if (want != "auto") {
    std::cerr << "CASCADE_SIMD=" << want << " is not available here; using best supported\n";
  }
  return *available().back();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace cascade::kernels
