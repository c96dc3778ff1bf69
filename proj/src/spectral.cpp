#include "hpde/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hpde/error.hpp"

namespace hpde {
namespace {

double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

void fix_sign(std::span<double> v) {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > best_mag + 1e-12) {
      best = i;
      best_mag = mag;
    }
  }
  if (!v.empty() && v[best] < 0.0)
    for (double& x : v) x = -x;
}

}  // namespace

EigenDecomposition eigendecompose(const DenseMatrix& m, const JacobiOptions& opts) {
  if (m.rows() != m.cols()) throw InputError("eigendecompose: matrix is not square");
  if (!all_finite(m)) throw InputError("eigendecompose: non-finite entries");
  const double asym = asymmetry(m);
  if (asym > 1e-10) {
    std::ostringstream msg;
    msg << "eigendecompose: matrix is not symmetric (max |a_ij - a_ji| = " << asym
        << ")";
    throw InputError(msg.str());
  }
  const std::size_t n = m.rows();
  DenseMatrix a = m;
  DenseMatrix v = DenseMatrix::identity(n);

  bool converged = false;
  double off = off_diagonal_norm(a);
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    if (off < opts.off_tolerance) {
      converged = true;
      break;
    }
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Late sweeps: drop elements too small to move either diagonal.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 4 && std::abs(app) + g == std::abs(app) &&
            std::abs(aqq) + g == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          const double nkp = c * akp - s * akq;
          const double nkq = s * akp + c * akq;
          a(k, p) = a(p, k) = nkp;
          a(k, q) = a(q, k) = nkq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    off = off_diagonal_norm(a);
    if (!rotated) {
      converged = true;
      break;
    }
  }
  if (!converged && off >= opts.off_tolerance) {
    std::ostringstream msg;
    msg << "eigendecompose: no convergence after " << opts.max_sweeps
        << " sweeps, off-diagonal norm " << off;
    throw NumericError(msg.str());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  EigenDecomposition ed;
  ed.values.resize(n);
  ed.vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    ed.values[k] = a(order[k], order[k]);
    auto src = v.col(order[k]);
    auto dst = ed.vectors.col(k);
    std::copy(src.begin(), src.end(), dst.begin());
    fix_sign(dst);
  }
  return ed;
}

const std::vector<std::string>& reference_filter_names() {
  static const std::vector<std::string> names{
      "low-pass", "high-pass",     "band-pass", "band-rejection",
      "comb",     "low-band-pass", "runge"};
  return names;
}

ScalarFilter reference_filter(std::string_view name) {
  using std::exp;
  if (name == "low-pass")
    return {std::string(name), [](double l) { return exp(-10.0 * l * l); }};
  if (name == "high-pass")
    return {std::string(name), [](double l) { return 1.0 - exp(-10.0 * l * l); }};
  if (name == "band-pass")
    return {std::string(name),
            [](double l) { return exp(-10.0 * (l - 1.0) * (l - 1.0)); }};
  if (name == "band-rejection")
    return {std::string(name),
            [](double l) { return 1.0 - exp(-10.0 * (l - 1.0) * (l - 1.0)); }};
  if (name == "comb")
    return {std::string(name),
            [](double l) { return std::abs(std::sin(std::numbers::pi * l)); }};
  if (name == "low-band-pass") {
    // Half-open branches; jumps from e^{-25} to e^{-12.5} at lambda = 1.
    return {std::string(name), [](double l) {
              if (l < 0.5) return 1.0;
              if (l < 1.0) return exp(-100.0 * (l - 0.5) * (l - 0.5));
              return exp(-50.0 * (l - 1.5) * (l - 1.5));
            }};
  }
  if (name == "runge")
    return {std::string(name), [](double l) { return 1.0 / (1.0 + 25.0 * l * l); }};

  std::string valid;
  for (const auto& n : reference_filter_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw InputError("unknown filter \"" + std::string(name) + "\"; valid: " + valid);
}

DenseMatrix spectral_matrix(const EigenDecomposition& ed,
                            const std::function<double(double)>& g) {
  const std::size_t n = ed.dim();
  DenseMatrix scaled_u = ed.vectors;
  for (std::size_t k = 0; k < n; ++k) {
    const double gk = g(ed.values[k]);
    for (double& x : scaled_u.col(k)) x *= gk;
  }
  return matmul(scaled_u, transpose(ed.vectors));
}

DenseMatrix exact_filter(const EigenDecomposition& ed,
                         const std::function<double(double)>& g,
                         const DenseMatrix& x) {
  const std::size_t n = ed.dim();
  if (x.rows() != n) {
    throw InputError("exact_filter: signal has " + std::to_string(x.rows()) +
                     " rows, expected " + std::to_string(n));
  }
  std::vector<double> gains(n);
  for (std::size_t k = 0; k < n; ++k) gains[k] = g(ed.values[k]);
  DenseMatrix y(n, x.cols());
  std::vector<double> coeff(n);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const auto xj = x.col(j);
    for (std::size_t k = 0; k < n; ++k) {
      const auto uk = ed.vectors.col(k);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += uk[i] * xj[i];
      coeff[k] = gains[k] * s;
    }
    auto yj = y.col(j);
    for (std::size_t k = 0; k < n; ++k) {
      const auto uk = ed.vectors.col(k);
      for (std::size_t i = 0; i < n; ++i) yj[i] += coeff[k] * uk[i];
    }
  }
  return y;
}

std::vector<double> exact_filter(const EigenDecomposition& ed,
                                 const std::function<double(double)>& g,
                                 std::span<const double> x) {
  const auto y = exact_filter(ed, g, DenseMatrix::column(x));
  return {y.data().begin(), y.data().end()};
}

DenseMatrix matrix_exponential(const DenseMatrix& m, double t) {
  if (m.rows() != m.cols()) throw InputError("matrix_exponential: matrix is not square");
  if (!all_finite(m) || !std::isfinite(t)) {
    throw InputError("matrix_exponential: non-finite input");
  }
  const std::size_t n = m.rows();
  DenseMatrix a = scaled(m, t);
  const double norm = norm1(a);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  a = scaled(a, std::ldexp(1.0, -squarings));

  DenseMatrix sum = DenseMatrix::identity(n);
  DenseMatrix term = DenseMatrix::identity(n);
  for (int k = 1; k <= 60; ++k) {
    term = scaled(matmul(term, a), 1.0 / k);
    sum = add(sum, term);
    if (norm1(term) < 1e-16) break;
  }
  for (int s = 0; s < squarings; ++s) sum = matmul(sum, sum);
  return sum;
}

double matrix_exponential_residual(const DenseMatrix& m, double t) {
  const DenseMatrix half = matrix_exponential(m, 0.5 * t);
  return max_abs_diff(matmul(half, half), matrix_exponential(m, t));
}

}  // namespace hpde
