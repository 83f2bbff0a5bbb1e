#pragma once

#include "qswitch/kernels.hpp"

namespace qswitch::kernels {

#if defined(QSWITCH_HAVE_AVX2)
// Defined in kernels_avx2.cpp; only called after a CPU capability check.
const KernelTable& avx2_table_unchecked();
#endif

}  // namespace qswitch::kernels
