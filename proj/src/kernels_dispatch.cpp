#include <cstdlib>
#include <string_view>

#include "ptspectra/kernels.hpp"

#if defined(PTSPECTRA_HAVE_AVX2)
namespace ptspectra::simd::avx2 {
const KernelTable& table();
}
#endif

namespace ptspectra::simd {

const KernelTable* avx2_kernels() {
#if defined(PTSPECTRA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2::table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* env = std::getenv("PT_SPECTRA_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar")
      return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace ptspectra::simd
