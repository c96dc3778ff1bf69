#pragma once

#include <span>
#include <string>
#include <vector>

#include "hpde/dense.hpp"
#include "hpde/graph.hpp"
#include "hpde/spectral.hpp"

namespace hpde {

// First-order system dw/dt = C w with C = blockdiag(I_n, a^2 Lhat).
struct BlockSystem {
  DenseMatrix c;
  DenseMatrix lhat;  // combinatorial Laplacian, dense
  std::size_t n = 0;
  double a = 1.0;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  // length 2n, unit norm
};

// Columns phi_i(t) = exp(lambda'_i t) u'_i.
struct FundamentalMatrix {
  DenseMatrix phi;
  std::vector<EigenPair> pairs;
  double t = 0.0;
};

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  double phi0_determinant = 0.0;
  std::size_t n = 0;
  double a = 1.0;
  double t = 0.0;

  bool all_passed() const;
};

BlockSystem build_block_system(const SparseSymMatrix& lhat, double a);

// The predicted eigenstructure: n pairs (1, [e_i; 0]) followed by n pairs
// (a^2 lambda_i, [0; u_i]) from the eigendecomposition of Lhat.
std::vector<EigenPair> eigenstructure(const BlockSystem& bs);

FundamentalMatrix fundamental_matrix(std::span<const EigenPair> pairs, double t);

// Solves Phi(t) c = w. Throws NumericError when Phi(t) is singular or the
// reconstruction residual exceeds 1e-8 (relative to |w|).
std::vector<double> expand_in_basis(std::span<const double> w, const FundamentalMatrix& fm);
// Column-wise; each column of w is expanded independently.
DenseMatrix expand_in_basis(const DenseMatrix& w, const FundamentalMatrix& fm);

// Checks, in order:
//   eigenvalue_multiset  sorted spectrum of C vs {1 x n} U {a^2 lambda_i}
//   eigenvector_blocks   eigenspaces of C vs the predicted block vectors
//   ode_residual         central difference of Phi vs C Phi, relative
//   exp_identity         exp(Ct) vs Phi(t) Phi(0)^{-1}, relative
VerificationReport verify_theorems(const SparseSymMatrix& lhat, double a, double t,
                                   double tol);

}  // namespace hpde
