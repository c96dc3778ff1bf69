// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include "hpde/kernels.hpp"

namespace hpde::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpby_avx2(double alpha, const double* x, double beta, const double* y,
                double* z, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  const __m256d b = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(b, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(z + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) z[i] = alpha * x[i] + beta * y[i];
}

// Row-wise gather. Graph rows are short (degree + 1), so rows with fewer than
// four entries fall through to the scalar tail.
void spmv_avx2(std::size_t n, const std::int64_t* row_offsets,
               const std::int64_t* col_indices, const double* values,
               const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t p = row_offsets[i];
    const std::int64_t end = row_offsets[i + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; p + 4 <= end; p += 4) {
      const __m256i idx = _mm256_loadu_si256(
          reinterpret_cast<const __m256i*>(col_indices + p));
      const __m256d xv = _mm256_i64gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(values + p), xv, acc);
    }
    double s = hsum(acc);
    for (; p < end; ++p) s += values[p] * x[col_indices[p]];
    y[i] = s;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::kAvx2, dot_avx2, axpy_avx2, axpby_avx2,
                                 spmv_avx2};
  return table;
}

}  // namespace hpde::kernels
