#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hpde/dense.hpp"
#include "hpde/graph.hpp"

namespace hpde {

enum class Basis { kMonomial, kChebyshev, kBernstein, kJacobi, kChebyshevInterp };

// Argument substituted for the Laplacian: L, L - I, I - L or L / 2.
enum class Shift { kIdentity, kLMinusI, kIMinusL, kHalf };

struct BasisKind {
  Basis basis = Basis::kChebyshev;
  Shift shift = Shift::kLMinusI;
  double jacobi_a = 1.0;
  double jacobi_b = 1.0;

  static BasisKind monomial(Shift s = Shift::kIdentity) { return {Basis::kMonomial, s}; }
  static BasisKind chebyshev() { return {Basis::kChebyshev, Shift::kLMinusI}; }
  static BasisKind bernstein() { return {Basis::kBernstein, Shift::kHalf}; }
  static BasisKind jacobi(double a, double b) {
    return {Basis::kJacobi, Shift::kIMinusL, a, b};
  }
  static BasisKind chebyshev_interp() {
    return {Basis::kChebyshevInterp, Shift::kLMinusI};
  }

  // Throws InputError on a shift the basis does not admit or a, b <= -1.
  void validate() const;

  friend bool operator==(const BasisKind&, const BasisKind&) = default;
};

// The shift each basis uses by default. Only the monomial basis accepts others.
Shift canonical_shift(Basis b);

std::string_view basis_name(Basis b);
Basis parse_basis(std::string_view name);
std::string_view shift_name(Shift s);
Shift parse_shift(std::string_view name);

double apply_shift(Shift s, double lambda);

// p_0(x) .. p_order(x) at x = shift(lambda). For kChebyshevInterp these are
// the Chebyshev polynomials T_k; the interpolation lives in the coefficients.
std::vector<double> basis_values(const BasisKind& kind, std::size_t order,
                                 double lambda);

// Coefficients multiplying basis_values / basis_apply. Identity except for
// kChebyshevInterp, where theta holds values at the Chebyshev nodes.
std::vector<double> effective_coefficients(const BasisKind& kind,
                                           std::span<const double> theta);
// Adjoint of effective_coefficients (a linear map).
std::vector<double> pullback_coefficients(const BasisKind& kind,
                                          std::span<const double> grad_effective);

// g(lambda) = sum_k theta_k p_k(shift(lambda)).
double eval_scalar(const BasisKind& kind, std::span<const double> theta, double lambda);

// p_k(shifted L) X for k = 0..order, via recurrences on sparse products only.
std::vector<DenseMatrix> basis_apply(const BasisKind& kind, std::size_t order,
                                     const SparseSymMatrix& lap, const DenseMatrix& x);

// sum_k theta_k p_k(shifted L) X.
DenseMatrix apply_poly(const BasisKind& kind, std::span<const double> theta,
                       const SparseSymMatrix& lap, const DenseMatrix& x);

// Chebyshev node x_j = cos((j + 1/2) pi / (order + 1)).
double chebyshev_node(std::size_t j, std::size_t order);

// Interpolation transform: values at the order + 1 Chebyshev nodes to
// Chebyshev series coefficients.
std::vector<double> chebII_coeffs(std::span<const double> node_values);

}  // namespace hpde
