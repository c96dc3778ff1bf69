#include "hpde/poly.hpp"

#include <cmath>
#include <numbers>

#include "hpde/error.hpp"
#include "hpde/kernels.hpp"

namespace hpde {
namespace {

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / i;
  return r;
}

// Three-term Jacobi recurrence coefficients for k >= 2:
// P_k = (alpha x + alpha1) P_{k-1} - alpha2 P_{k-2}.
struct JacobiStep {
  double alpha, alpha1, alpha2;
};

JacobiStep jacobi_step(std::size_t k, double a, double b) {
  const double kk = static_cast<double>(k);
  const double s = 2.0 * kk + a + b;
  return {s * (s - 1.0) / (2.0 * kk * (kk + a + b)),
          (s - 1.0) * (a * a - b * b) / (2.0 * kk * (kk + a + b) * (s - 2.0)),
          (kk + a - 1.0) * (kk + b - 1.0) * s / (kk * (kk + a + b) * (s - 2.0))};
}

// y = shift(L) x
void shifted_product(Shift s, const SparseSymMatrix& lap, const DenseMatrix& x,
                     DenseMatrix& y) {
  for (std::size_t j = 0; j < x.cols(); ++j) {
    auto yj = y.col(j);
    spmv(lap, x.col(j), yj);
    switch (s) {
      case Shift::kIdentity:
        break;
      case Shift::kLMinusI:
        kernels::axpy(-1.0, x.col(j), yj);
        break;
      case Shift::kIMinusL:
        kernels::axpby(1.0, x.col(j), -1.0, yj, yj);
        break;
      case Shift::kHalf:
        for (double& v : yj) v *= 0.5;
        break;
    }
  }
}

DenseMatrix shifted(Shift s, const SparseSymMatrix& lap, const DenseMatrix& x) {
  DenseMatrix y(x.rows(), x.cols());
  shifted_product(s, lap, x, y);
  return y;
}

// out = alpha * a + beta * b, elementwise over whole matrices.
DenseMatrix combine(double alpha, const DenseMatrix& a, double beta, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), a.cols());
  kernels::axpby(alpha, a.data(), beta, b.data(), out.data());
  return out;
}

}  // namespace

Shift canonical_shift(Basis b) {
  switch (b) {
    case Basis::kMonomial:
      return Shift::kIdentity;
    case Basis::kChebyshev:
    case Basis::kChebyshevInterp:
      return Shift::kLMinusI;
    case Basis::kBernstein:
      return Shift::kHalf;
    case Basis::kJacobi:
      return Shift::kIMinusL;
  }
  return Shift::kIdentity;
}

void BasisKind::validate() const {
  if (basis != Basis::kMonomial && shift != canonical_shift(basis)) {
    throw InputError(std::string("basis ") + std::string(basis_name(basis)) +
                     " requires shift " +
                     std::string(shift_name(canonical_shift(basis))) + ", got " +
                     std::string(shift_name(shift)));
  }
  if (basis == Basis::kJacobi && (!(jacobi_a > -1.0) || !(jacobi_b > -1.0))) {
    throw InputError("jacobi parameters must satisfy a, b > -1");
  }
}

std::string_view basis_name(Basis b) {
  switch (b) {
    case Basis::kMonomial:
      return "monomial";
    case Basis::kChebyshev:
      return "chebyshev";
    case Basis::kBernstein:
      return "bernstein";
    case Basis::kJacobi:
      return "jacobi";
    case Basis::kChebyshevInterp:
      return "chebyshev-interp";
  }
  return "?";
}

Basis parse_basis(std::string_view name) {
  for (Basis b : {Basis::kMonomial, Basis::kChebyshev, Basis::kBernstein,
                  Basis::kJacobi, Basis::kChebyshevInterp}) {
    if (name == basis_name(b)) return b;
  }
  throw InputError("unknown basis \"" + std::string(name) +
                   "\"; valid: monomial, chebyshev, bernstein, jacobi, "
                   "chebyshev-interp");
}

std::string_view shift_name(Shift s) {
  switch (s) {
    case Shift::kIdentity:
      return "L";
    case Shift::kLMinusI:
      return "L-I";
    case Shift::kIMinusL:
      return "I-L";
    case Shift::kHalf:
      return "L/2";
  }
  return "?";
}

Shift parse_shift(std::string_view name) {
  for (Shift s : {Shift::kIdentity, Shift::kLMinusI, Shift::kIMinusL, Shift::kHalf}) {
    if (name == shift_name(s)) return s;
  }
  throw InputError("unknown shift \"" + std::string(name) +
                   "\"; valid: L, L-I, I-L, L/2");
}

double apply_shift(Shift s, double lambda) {
  switch (s) {
    case Shift::kIdentity:
      return lambda;
    case Shift::kLMinusI:
      return lambda - 1.0;
    case Shift::kIMinusL:
      return 1.0 - lambda;
    case Shift::kHalf:
      return 0.5 * lambda;
  }
  return lambda;
}

std::vector<double> basis_values(const BasisKind& kind, std::size_t order,
                                 double lambda) {
  kind.validate();
  const double x = apply_shift(kind.shift, lambda);
  std::vector<double> p(order + 1);
  switch (kind.basis) {
    case Basis::kMonomial:
      p[0] = 1.0;
      for (std::size_t k = 1; k <= order; ++k) p[k] = p[k - 1] * x;
      break;
    case Basis::kChebyshev:
    case Basis::kChebyshevInterp:
      p[0] = 1.0;
      if (order >= 1) p[1] = x;
      for (std::size_t k = 2; k <= order; ++k) p[k] = 2.0 * x * p[k - 1] - p[k - 2];
      break;
    case Basis::kBernstein:
      for (std::size_t k = 0; k <= order; ++k) {
        p[k] = binomial(order, k) * std::pow(1.0 - x, static_cast<double>(order - k)) *
               std::pow(x, static_cast<double>(k));
      }
      break;
    case Basis::kJacobi: {
      const double a = kind.jacobi_a;
      const double b = kind.jacobi_b;
      p[0] = 1.0;
      if (order >= 1) p[1] = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
      for (std::size_t k = 2; k <= order; ++k) {
        const auto st = jacobi_step(k, a, b);
        p[k] = (st.alpha * x + st.alpha1) * p[k - 1] - st.alpha2 * p[k - 2];
      }
      break;
    }
  }
  return p;
}

double chebyshev_node(std::size_t j, std::size_t order) {
  return std::cos((static_cast<double>(j) + 0.5) * std::numbers::pi /
                  static_cast<double>(order + 1));
}

std::vector<double> chebII_coeffs(std::span<const double> node_values) {
  const std::size_t m = node_values.size();
  if (m == 0) return {};
  const std::size_t order = m - 1;
  std::vector<double> c(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double xj = chebyshev_node(j, order);
    double t_prev = 1.0;
    double t_cur = xj;
    c[0] += node_values[j];
    for (std::size_t k = 1; k < m; ++k) {
      c[k] += node_values[j] * t_cur;
      const double t_next = 2.0 * xj * t_cur - t_prev;
      t_prev = t_cur;
      t_cur = t_next;
    }
  }
  const double inv = 1.0 / static_cast<double>(m);
  c[0] *= inv;
  for (std::size_t k = 1; k < m; ++k) c[k] *= 2.0 * inv;
  return c;
}

std::vector<double> effective_coefficients(const BasisKind& kind,
                                           std::span<const double> theta) {
  if (kind.basis == Basis::kChebyshevInterp) return chebII_coeffs(theta);
  return {theta.begin(), theta.end()};
}

std::vector<double> pullback_coefficients(const BasisKind& kind,
                                          std::span<const double> grad_effective) {
  if (kind.basis != Basis::kChebyshevInterp) {
    return {grad_effective.begin(), grad_effective.end()};
  }
  // Transpose of the interpolation matrix M[k][j] = w_k T_k(x_j).
  const std::size_t m = grad_effective.size();
  const std::size_t order = m - 1;
  const double inv = 1.0 / static_cast<double>(m);
  std::vector<double> g(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double xj = chebyshev_node(j, order);
    double t_prev = 1.0;
    double t_cur = xj;
    double acc = inv * grad_effective[0];
    for (std::size_t k = 1; k < m; ++k) {
      acc += 2.0 * inv * t_cur * grad_effective[k];
      const double t_next = 2.0 * xj * t_cur - t_prev;
      t_prev = t_cur;
      t_cur = t_next;
    }
    g[j] = acc;
  }
  return g;
}

double eval_scalar(const BasisKind& kind, std::span<const double> theta, double lambda) {
  if (theta.empty()) return 0.0;
  const auto coeffs = effective_coefficients(kind, theta);
  const auto p = basis_values(kind, theta.size() - 1, lambda);
  double g = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) g += coeffs[k] * p[k];
  return g;
}

std::vector<DenseMatrix> basis_apply(const BasisKind& kind, std::size_t order,
                                     const SparseSymMatrix& lap, const DenseMatrix& x) {
  kind.validate();
  if (x.rows() != lap.dim()) {
    throw InputError("basis_apply: feature matrix has " + std::to_string(x.rows()) +
                     " rows, Laplacian dimension is " + std::to_string(lap.dim()));
  }
  std::vector<DenseMatrix> out;
  out.reserve(order + 1);
  out.push_back(x);
  switch (kind.basis) {
    case Basis::kMonomial:
      for (std::size_t k = 1; k <= order; ++k)
        out.push_back(shifted(kind.shift, lap, out[k - 1]));
      break;
    case Basis::kChebyshev:
    case Basis::kChebyshevInterp:
      if (order >= 1) out.push_back(shifted(kind.shift, lap, x));
      for (std::size_t k = 2; k <= order; ++k) {
        out.push_back(combine(2.0, shifted(kind.shift, lap, out[k - 1]), -1.0, out[k - 2]));
      }
      break;
    case Basis::kJacobi: {
      const double a = kind.jacobi_a;
      const double b = kind.jacobi_b;
      if (order >= 1) {
        out.push_back(
            combine(0.5 * (a + b + 2.0), shifted(kind.shift, lap, x), 0.5 * (a - b), x));
      }
      for (std::size_t k = 2; k <= order; ++k) {
        const auto st = jacobi_step(k, a, b);
        DenseMatrix next = combine(st.alpha, shifted(kind.shift, lap, out[k - 1]),
                                   st.alpha1, out[k - 1]);
        kernels::axpy(-st.alpha2, out[k - 2].data(), next.data());
        out.push_back(std::move(next));
      }
      break;
    }
    case Basis::kBernstein: {
      // C(K,k) / 2^K (2I - L)^{K-k} L^k X
      std::vector<DenseMatrix> powers;
      powers.reserve(order + 1);
      powers.push_back(x);
      for (std::size_t k = 1; k <= order; ++k)
        powers.push_back(shifted(Shift::kIdentity, lap, powers[k - 1]));
      out.clear();
      const double scale = std::ldexp(1.0, -static_cast<int>(order));
      for (std::size_t k = 0; k <= order; ++k) {
        DenseMatrix v = powers[k];
        for (std::size_t r = 0; r < order - k; ++r) {
          v = combine(2.0, v, -1.0, shifted(Shift::kIdentity, lap, v));
        }
        for (double& e : v.data()) e *= binomial(order, k) * scale;
        out.push_back(std::move(v));
      }
      break;
    }
  }
  return out;
}

DenseMatrix apply_poly(const BasisKind& kind, std::span<const double> theta,
                       const SparseSymMatrix& lap, const DenseMatrix& x) {
  if (theta.empty()) throw InputError("apply_poly: empty coefficient vector");
  const auto coeffs = effective_coefficients(kind, theta);
  const auto terms = basis_apply(kind, theta.size() - 1, lap, x);
  DenseMatrix y(x.rows(), x.cols());
  for (std::size_t k = 0; k < terms.size(); ++k)
    kernels::axpy(coeffs[k], terms[k].data(), y.data());
  return y;
}

}  // namespace hpde
