#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hpde/error.hpp"
#include "hpde/graph.hpp"
#include "hpde/poly.hpp"
#include "hpde/spectral.hpp"
#include "test_support.hpp"

namespace hpde {
namespace {

// Closed forms, independent of the library recurrences.
double gen_binom(double n, double k) {
  return std::tgamma(n + 1) / (std::tgamma(k + 1) * std::tgamma(n - k + 1));
}

double jacobi_closed(std::size_t n, double a, double b, double x) {
  double s = 0.0;
  for (std::size_t k = 0; k <= n; ++k)
    s += gen_binom(n + a, static_cast<double>(n - k)) * gen_binom(n + b, static_cast<double>(k)) *
         std::pow((x - 1) / 2, k) * std::pow((x + 1) / 2, n - k);
  return s;
}

double basis_closed(const BasisKind& kind, std::size_t k, std::size_t order, double lambda) {
  switch (kind.basis) {
    case Basis::kMonomial:
      return std::pow(apply_shift(kind.shift, lambda), static_cast<double>(k));
    case Basis::kChebyshev:
    case Basis::kChebyshevInterp:
      return std::cos(k * std::acos(std::clamp(lambda - 1.0, -1.0, 1.0)));
    case Basis::kBernstein: {
      const double x = lambda / 2;
      return std::tgamma(order + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(order - k + 1.0)) *
             std::pow(1 - x, static_cast<double>(order - k)) * std::pow(x, static_cast<double>(k));
    }
    case Basis::kJacobi:
      return jacobi_closed(k, kind.jacobi_a, kind.jacobi_b, 1.0 - lambda);
  }
  return 0.0;
}

std::vector<BasisKind> all_bases() {
  return {BasisKind::monomial(),           BasisKind::monomial(Shift::kIMinusL),
          BasisKind::chebyshev(),          BasisKind::bernstein(),
          BasisKind::jacobi(1.0, 1.0),     BasisKind::jacobi(0.0, 0.0),
          BasisKind::jacobi(-0.5, 0.3),    BasisKind::chebyshev_interp()};
}

std::vector<double> random_theta(std::size_t k, std::uint64_t seed) {
  return testing::random_vector(k + 1, seed, -1.0, 1.0);
}

TEST(EvalScalar, Examples) {
  const std::vector<double> gcn{1.0, -1.0};
  EXPECT_DOUBLE_EQ(eval_scalar(BasisKind::monomial(), gcn, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(eval_scalar(BasisKind::monomial(), gcn, 2.0), -1.0);
  EXPECT_DOUBLE_EQ(eval_scalar(BasisKind::monomial(), gcn, 0.7), 0.3);
  const std::vector<double> t2{0.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(eval_scalar(BasisKind::chebyshev(), t2, 1.0), -1.0);
  for (std::size_t k = 0; k <= 10; ++k) {
    const std::vector<double> ones(k + 1, 1.0);
    for (double l = 0.0; l <= 2.0; l += 0.125)
      EXPECT_NEAR(eval_scalar(BasisKind::bernstein(), ones, l), 1.0, 1e-12);
  }
}

TEST(BasisValues, MatchClosedForms) {
  for (const auto& kind : all_bases())
    for (std::size_t order : {0u, 1u, 4u, 8u, 10u})
      for (double l = 0.0; l <= 2.0; l += 0.0625) {
        const auto v = basis_values(kind, order, l);
        ASSERT_EQ(v.size(), order + 1);
        for (std::size_t k = 0; k <= order; ++k)
          EXPECT_NEAR(v[k], basis_closed(kind, k, order, l), 1e-10 * std::max(1.0, std::abs(v[k])))
              << basis_name(kind.basis) << " k=" << k << " l=" << l;
      }
}

TEST(BasisValues, ChebyshevCosineIdentity) {
  for (std::size_t k = 0; k <= 10; ++k)
    for (int i = 0; i <= 64; ++i) {
      const double phi = std::numbers::pi * i / 64.0;
      const auto v = basis_values(BasisKind::chebyshev(), 10, 1.0 + std::cos(phi));
      EXPECT_NEAR(v[k], std::cos(k * phi), 1e-10);
    }
}

TEST(BasisValues, BernsteinPartitionAndNonnegativity) {
  for (std::size_t order = 0; order <= 10; ++order)
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      const auto v = basis_values(BasisKind::bernstein(), order, 2 * x);
      double sum = 0.0;
      for (double b : v) {
        EXPECT_GE(b, 0.0);
        sum += b;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(BasisValues, JacobiZeroZeroIsLegendre) {
  for (double x = -1.0; x <= 1.0; x += 0.05) {
    const auto v = basis_values(BasisKind::jacobi(0.0, 0.0), 3, 1.0 - x);
    EXPECT_NEAR(v[0], 1.0, 1e-12);
    EXPECT_NEAR(v[1], x, 1e-12);
    EXPECT_NEAR(v[2], (3 * x * x - 1) / 2, 1e-10);
    EXPECT_NEAR(v[3], (5 * x * x * x - 3 * x) / 2, 1e-10);
  }
}

TEST(BasisKind, ShiftValidation) {
  EXPECT_NO_THROW(BasisKind::monomial(Shift::kHalf).validate());
  BasisKind bad = BasisKind::chebyshev();
  bad.shift = Shift::kIdentity;
  EXPECT_THROW(bad.validate(), InputError);
  EXPECT_THROW(BasisKind::jacobi(-1.0, 0.0).validate(), InputError);
  EXPECT_THROW(parse_basis("legendre"), InputError);
  EXPECT_THROW(parse_shift("2L"), InputError);
  for (const auto& k : all_bases()) EXPECT_EQ(parse_basis(basis_name(k.basis)), k.basis);
  for (Shift s : {Shift::kIdentity, Shift::kLMinusI, Shift::kIMinusL, Shift::kHalf})
    EXPECT_EQ(parse_shift(shift_name(s)), s);
}

TEST(ApplyPoly, OrderZeroTermReturnsX) {
  const SparseSymMatrix l = normalized_laplacian(grid_graph(3, 3));
  const DenseMatrix x = DenseMatrix::column(testing::random_vector(9, 8));
  for (const auto& kind : all_bases()) {
    if (kind.basis == Basis::kBernstein || kind.basis == Basis::kChebyshevInterp) continue;
    const std::vector<double> theta{1.0, 0.0, 0.0, 0.0};
    EXPECT_LT(max_abs_diff(apply_poly(kind, theta, l, x), x), 1e-14) << basis_name(kind.basis);
  }
  const std::vector<double> b0{1.0};
  EXPECT_LT(max_abs_diff(apply_poly(BasisKind::bernstein(), b0, l, x), x), 1e-14);
}

TEST(ApplyPoly, GcnPropagation) {
  const SparseSymMatrix l = normalized_laplacian(testing::random_connected_graph(7, 0.3, 2));
  const DenseMatrix x = DenseMatrix::column(testing::random_vector(7, 4));
  const std::vector<double> theta{1.0, -1.0};
  const DenseMatrix expect = matmul(add(DenseMatrix::identity(7), l.to_dense(), -1.0), x);
  EXPECT_LT(max_abs_diff(apply_poly(BasisKind::monomial(), theta, l, x), expect), 1e-14);
}

TEST(ApplyPoly, MatchesDensePowerForMonomial) {
  const SparseSymMatrix l = combinatorial_laplacian(path_graph(5));
  const DenseMatrix x = DenseMatrix::column(testing::random_vector(5, 6));
  const auto theta = random_theta(4, 7);
  DenseMatrix expect(5, 1);
  for (std::size_t k = 0; k <= 4; ++k)
    expect = add(expect, scaled(testing::dense_power_apply(l.to_dense(), k, x), theta[k]));
  EXPECT_LT(max_abs_diff(apply_poly(BasisKind::monomial(), theta, l, x), expect), 1e-10);
}

TEST(ApplyPoly, OracleEquivalenceAllBases) {
  std::uint64_t seed = 1;
  for (const auto& kind : all_bases())
    for (std::size_t order : {2u, 4u, 5u, 8u})
      for (int trial = 0; trial < 5; ++trial, ++seed) {
        const std::size_t n = 4 + seed % 7;
        const SparseSymMatrix l =
            normalized_laplacian(testing::random_connected_graph(n, 0.3, seed));
        const auto ed = eigendecompose(l.to_dense());
        const auto theta = random_theta(order, seed + 500);
        DenseMatrix x(n, 2);
        for (std::size_t j = 0; j < 2; ++j) {
          const auto v = testing::random_vector(n, seed * 3 + j);
          std::copy(v.begin(), v.end(), x.col(j).begin());
        }
        const DenseMatrix got = apply_poly(kind, theta, l, x);
        const DenseMatrix want =
            exact_filter(ed, [&](double lam) { return eval_scalar(kind, theta, lam); }, x);
        EXPECT_LT(max_abs_diff(got, want), 1e-8) << basis_name(kind.basis) << " K=" << order;
      }
}

TEST(ApplyPoly, LinearInTheta) {
  const SparseSymMatrix l = normalized_laplacian(grid_graph(3, 4));
  const DenseMatrix x = DenseMatrix::column(testing::random_vector(12, 10));
  for (const auto& kind : all_bases()) {
    const auto t1 = random_theta(6, 11), t2 = random_theta(6, 12);
    std::vector<double> t12(7);
    for (std::size_t k = 0; k < 7; ++k) t12[k] = t1[k] + t2[k];
    const DenseMatrix lhs = apply_poly(kind, t12, l, x);
    const DenseMatrix rhs = add(apply_poly(kind, t1, l, x), apply_poly(kind, t2, l, x));
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-10) << basis_name(kind.basis);
  }
}

TEST(ApplyPoly, DimensionMismatchThrows) {
  const SparseSymMatrix l = normalized_laplacian(path_graph(4));
  const DenseMatrix x(3, 1);
  const std::vector<double> theta{1.0, 1.0};
  EXPECT_THROW(apply_poly(BasisKind::chebyshev(), theta, l, x), InputError);
}

TEST(BasisApply, EachTermMatchesSpectralRoute) {
  const SparseSymMatrix l = normalized_laplacian(testing::random_connected_graph(9, 0.25, 31));
  const auto ed = eigendecompose(l.to_dense());
  const DenseMatrix x = DenseMatrix::column(testing::random_vector(9, 32));
  for (const auto& kind : all_bases()) {
    const auto terms = basis_apply(kind, 6, l, x);
    ASSERT_EQ(terms.size(), 7u);
    for (std::size_t k = 0; k <= 6; ++k) {
      const DenseMatrix want =
          exact_filter(ed, [&](double lam) { return basis_values(kind, 6, lam)[k]; }, x);
      EXPECT_LT(max_abs_diff(terms[k], want), 1e-9) << basis_name(kind.basis) << " k=" << k;
    }
  }
}

TEST(ChebII, Examples) {
  for (std::size_t k : {0u, 3u, 10u}) {
    const std::vector<double> ones(k + 1, 1.0);
    const auto c = chebII_coeffs(ones);
    EXPECT_NEAR(c[0], 1.0, 1e-14);
    for (std::size_t i = 1; i <= k; ++i) EXPECT_NEAR(c[i], 0.0, 1e-14);
  }
  const std::vector<double> theta{1.0, 0.0};
  const auto c = chebII_coeffs(theta);
  EXPECT_NEAR(c[0], 0.5, 1e-15);
  EXPECT_NEAR(c[1], std::sqrt(2.0) / 2, 1e-15);
}

TEST(ChebII, InterpolationExactness) {
  for (std::size_t k = 0; k <= 10; ++k) {
    const auto theta = random_theta(k, 60 + k);
    const auto c = chebII_coeffs(theta);
    for (std::size_t j = 0; j <= k; ++j) {
      const double xj = chebyshev_node(j, k);
      EXPECT_NEAR(xj, std::cos((j + 0.5) * std::numbers::pi / (k + 1)), 1e-15);
      double s = 0.0;
      for (std::size_t i = 0; i <= k; ++i) s += c[i] * std::cos(i * std::acos(xj));
      EXPECT_NEAR(s, theta[j], 1e-9);
    }
    // the interp basis evaluates the interpolant at lambda = x_j + 1
    for (std::size_t j = 0; j <= k; ++j)
      EXPECT_NEAR(eval_scalar(BasisKind::chebyshev_interp(), theta, chebyshev_node(j, k) + 1.0),
                  theta[j], 1e-9);
  }
}

TEST(ChebII, PullbackIsAdjoint) {
  const BasisKind kind = BasisKind::chebyshev_interp();
  for (std::size_t k : {1u, 4u, 9u}) {
    const auto theta = random_theta(k, 70 + k), g = random_theta(k, 80 + k);
    const auto c = effective_coefficients(kind, theta);
    const auto pb = pullback_coefficients(kind, g);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
      lhs += g[i] * c[i];
      rhs += pb[i] * theta[i];
    }
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

}  // namespace
}  // namespace hpde
