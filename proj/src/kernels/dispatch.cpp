#include <cstdlib>
#include <string>

#include "hpde/kernels.hpp"

namespace hpde::kernels {

bool cpu_has_avx2() {
#if defined(HPDE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const KernelTable& select() {
  const char* env = std::getenv("HPDE_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return scalar_table();
#if defined(HPDE_HAVE_AVX2)
  if (cpu_has_avx2()) return avx2_table();
#endif
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace hpde::kernels
