#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hpde/dense.hpp"

namespace hpde {

// Eigenvalues ascending; column j of `vectors` pairs with values[j]. Each
// eigenvector is unit length and signed so its largest-magnitude component
// (first one, on ties) is positive.
struct EigenDecomposition {
  std::vector<double> values;
  DenseMatrix vectors;

  std::size_t dim() const { return values.size(); }
};

struct JacobiOptions {
  double off_tolerance = 1e-10;  // off-diagonal Frobenius norm
  int max_sweeps = 100;
};

// Cyclic Jacobi rotations on a dense copy of a symmetric matrix.
EigenDecomposition eigendecompose(const DenseMatrix& m, const JacobiOptions& opts = {});

struct ScalarFilter {
  std::string name;
  std::function<double(double)> gain;

  double operator()(double lambda) const { return gain(lambda); }
};

// The seven image-filtering targets: low-pass, high-pass, band-pass,
// band-rejection, comb, low-band-pass, runge.
const std::vector<std::string>& reference_filter_names();
ScalarFilter reference_filter(std::string_view name);

// U diag(g(lambda)) U^T
DenseMatrix spectral_matrix(const EigenDecomposition& ed,
                            const std::function<double(double)>& g);

// U diag(g(lambda)) U^T x, column by column.
DenseMatrix exact_filter(const EigenDecomposition& ed,
                         const std::function<double(double)>& g,
                         const DenseMatrix& x);
std::vector<double> exact_filter(const EigenDecomposition& ed,
                                 const std::function<double(double)>& g,
                                 std::span<const double> x);

// exp(m t) by scaling and squaring with a truncated Taylor series.
DenseMatrix matrix_exponential(const DenseMatrix& m, double t);

// max |exp(m t/2)^2 - exp(m t)|, the squaring self-consistency residual.
double matrix_exponential_residual(const DenseMatrix& m, double t);

}  // namespace hpde
