#include "hpde/kernels.hpp"

namespace hpde::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpby_scalar(double alpha, const double* x, double beta, const double* y,
                  double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = alpha * x[i] + beta * y[i];
}

void spmv_scalar(std::size_t n, const std::int64_t* row_offsets,
                 const std::int64_t* col_indices, const double* values,
                 const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::int64_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
      acc += values[p] * x[col_indices[p]];
    }
    y[i] = acc;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::kScalar, dot_scalar, axpy_scalar,
                                 axpby_scalar, spmv_scalar};
  return table;
}

}  // namespace hpde::kernels
