#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace qswitch::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(QSWITCH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* forced = std::getenv("QSWITCH_KERNELS");
  if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_kernels();
  if (const KernelTable* simd = avx2_kernels()) return *simd;
  return scalar_kernels();
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(QSWITCH_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace qswitch::kernels
