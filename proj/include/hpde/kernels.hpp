#pragma once

// Data-parallel inner loops shared by every module. Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2+FMA variant. The active
// table is chosen once at first use from CPUID; HPDE_SIMD=scalar in the
// environment forces the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace hpde::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // z[i] = alpha * x[i] + beta * y[i]
  void (*axpby)(double alpha, const double* x, double beta, const double* y,
                double* z, std::size_t n);
  // y = A x for a CSR matrix with n rows.
  void (*spmv_csr)(std::size_t n, const std::int64_t* row_offsets,
                   const std::int64_t* col_indices, const double* values,
                   const double* x, double* y);
};

const KernelTable& scalar_table();
#if defined(HPDE_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

// True when the running CPU can execute the AVX2 table.
bool cpu_has_avx2();

// Table selected for this process.
const KernelTable& active();

std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void axpby(double alpha, std::span<const double> x, double beta,
                  std::span<const double> y, std::span<double> z) {
  active().axpby(alpha, x.data(), beta, y.data(), z.data(), x.size());
}

}  // namespace hpde::kernels
