#include <cstdlib>
#include <cstring>

#include "scengame/kernels.hpp"

namespace scengame::simd {

#if !defined(SCENGAME_BUILD_AVX2)
const Kernels* avx2_kernels() { return nullptr; }
#endif

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(SCENGAME_BUILD_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const Kernels& kernels_for(Isa isa) {
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return *avx2_kernels();
  return scalar_kernels();
}

Isa active_isa() {
  static const Isa isa = [] {
    const char* env = std::getenv("SCENGAME_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
  }();
  return isa;
}

const Kernels& kernels() { return kernels_for(active_isa()); }

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace scengame::simd
