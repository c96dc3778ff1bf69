#include "hpde/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hpde/error.hpp"

namespace hpde {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::column(std::span<const double> v) {
  DenseMatrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data_.begin());
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  DenseMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw InputError("from_rows: ragged rows");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
  return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw InputError("matmul: inner dimensions " + std::to_string(a.cols()) +
                     " and " + std::to_string(b.rows()) + " differ");
  }
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      for (std::size_t i = 0; i < a.rows(); ++i) c(i, j) += a(i, k) * bkj;
    }
  }
  return c;
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw InputError("matvec: dimension mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t k = 0; k < a.cols(); ++k)
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += a(i, k) * x[k];
  return y;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b, double beta) {
  if (!a.same_shape(b)) throw InputError("add: shape mismatch");
  DenseMatrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] += beta * bd[i];
  return c;
}

DenseMatrix scaled(const DenseMatrix& a, double s) {
  DenseMatrix c = a;
  for (double& v : c.data()) v *= s;
  return c;
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("max_abs_diff: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw InputError("max_abs_diff: shape mismatch");
  return max_abs_diff(a.data(), b.data());
}

double norm1(const DenseMatrix& a) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (double v : a.col(j)) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

double asymmetry(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw InputError("asymmetry: matrix is not square");
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = j + 1; i < a.rows(); ++i)
      m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

bool all_finite(const DenseMatrix& a) {
  return std::all_of(a.data().begin(), a.data().end(),
                     [](double v) { return std::isfinite(v); });
}

LuFactor::LuFactor(const DenseMatrix& a) : lu_(a), perm_(a.rows()) {
  if (a.rows() != a.cols()) throw InputError("LuFactor: matrix is not square");
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  const double scale = std::max(max_abs(a), 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu_(i, k)) > std::abs(lu_(piv, k))) piv = i;
    if (std::abs(lu_(piv, k)) <= 1e-14 * scale) {
      throw NumericError("LuFactor: matrix is singular at column " +
                         std::to_string(k));
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
      std::swap(perm_[k], perm_[piv]);
      sign_ = -sign_;
    }
    const double inv = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) lu_(i, k) *= inv;
    for (std::size_t j = k + 1; j < n; ++j) {
      const double ukj = lu_(k, j);
      if (ukj == 0.0) continue;
      for (std::size_t i = k + 1; i < n; ++i) lu_(i, j) -= lu_(i, k) * ukj;
    }
  }
}

double LuFactor::determinant() const {
  double d = sign_;
  for (std::size_t i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
  return d;
}

std::vector<double> LuFactor::solve(std::span<const double> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw InputError("LuFactor::solve: dimension mismatch");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < i; ++k) x[i] -= lu_(i, k) * x[k];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) x[i] -= lu_(i, k) * x[k];
    x[i] /= lu_(i, i);
  }
  return x;
}

DenseMatrix LuFactor::solve(const DenseMatrix& b) const {
  DenseMatrix x(b.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    const auto xj = solve(b.col(j));
    std::copy(xj.begin(), xj.end(), x.col(j).begin());
  }
  return x;
}

DenseMatrix LuFactor::inverse() const {
  return solve(DenseMatrix::identity(lu_.rows()));
}

}  // namespace hpde
