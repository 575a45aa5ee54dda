#pragma once

#include "cascade/kernels.hpp"

namespace cascade::kernels::detail {

// Defined in the per-ISA translation units that are compiled in.
const KernelTable& avx2_table();
const KernelTable& neon_table();

}  // namespace cascade::kernels::detail
