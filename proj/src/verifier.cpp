#include "hpde/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hpde/error.hpp"

namespace hpde {
namespace {

constexpr double kClusterGap = 1e-6;
constexpr double kFiniteDifferenceStep = 1e-5;

// Index ranges [first, last) of sorted values whose neighbors lie within the gap.
std::vector<std::pair<std::size_t, std::size_t>> clusters(const std::vector<double>& sorted) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i == sorted.size() ||
        sorted[i] - sorted[i - 1] > kClusterGap * std::max(1.0, std::abs(sorted[i]))) {
      out.emplace_back(start, i);
      start = i;
    }
  }
  return out;
}

DenseMatrix projector(const std::vector<std::span<const double>>& vecs, std::size_t dim) {
  DenseMatrix p(dim, dim);
  for (const auto& v : vecs)
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t i = 0; i < dim; ++i) p(i, j) += v[i] * v[j];
  return p;
}

CheckResult make_check(std::string name, double residual, double tol) {
  return {std::move(name), residual, tol, std::isfinite(residual) && residual < tol};
}

}  // namespace

bool VerificationReport::all_passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

BlockSystem build_block_system(const SparseSymMatrix& lhat, double a) {
  const std::size_t n = lhat.dim();
  BlockSystem bs;
  bs.n = n;
  bs.a = a;
  bs.lhat = lhat.to_dense();
  bs.c = DenseMatrix(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) bs.c(i, i) = 1.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) bs.c(n + i, n + j) = a * a * bs.lhat(i, j);
  return bs;
}

std::vector<EigenPair> eigenstructure(const BlockSystem& bs) {
  const std::size_t n = bs.n;
  std::vector<EigenPair> pairs;
  pairs.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    EigenPair p{1.0, std::vector<double>(2 * n, 0.0)};
    p.vector[i] = 1.0;
    pairs.push_back(std::move(p));
  }
  const EigenDecomposition ed = eigendecompose(bs.lhat);
  for (std::size_t k = 0; k < n; ++k) {
    EigenPair p{bs.a * bs.a * ed.values[k], std::vector<double>(2 * n, 0.0)};
    const auto u = ed.vectors.col(k);
    std::copy(u.begin(), u.end(), p.vector.begin() + static_cast<std::ptrdiff_t>(n));
    pairs.push_back(std::move(p));
  }
  return pairs;
}

FundamentalMatrix fundamental_matrix(std::span<const EigenPair> pairs, double t) {
  const std::size_t dim = pairs.size();
  FundamentalMatrix fm;
  fm.t = t;
  fm.pairs.assign(pairs.begin(), pairs.end());
  fm.phi = DenseMatrix(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    if (pairs[j].vector.size() != dim) {
      throw InputError("fundamental_matrix: eigenvector length mismatch");
    }
    const double scale = std::exp(pairs[j].value * t);
    for (std::size_t i = 0; i < dim; ++i) fm.phi(i, j) = scale * pairs[j].vector[i];
  }
  return fm;
}

std::vector<double> expand_in_basis(std::span<const double> w, const FundamentalMatrix& fm) {
  if (w.size() != fm.phi.rows()) throw InputError("expand_in_basis: length mismatch");
  const LuFactor lu(fm.phi);
  auto c = lu.solve(w);
  const auto back = matvec(fm.phi, c);
  double wmax = 0.0;
  for (double v : w) wmax = std::max(wmax, std::abs(v));
  const double resid = max_abs_diff(back, w);
  if (!(resid < 1e-8 * std::max(1.0, wmax))) {
    std::ostringstream msg;
    msg << "expand_in_basis: reconstruction residual " << resid;
    throw NumericError(msg.str());
  }
  return c;
}

DenseMatrix expand_in_basis(const DenseMatrix& w, const FundamentalMatrix& fm) {
  DenseMatrix c(w.rows(), w.cols());
  for (std::size_t j = 0; j < w.cols(); ++j) {
    const auto cj = expand_in_basis(w.col(j), fm);
    std::copy(cj.begin(), cj.end(), c.col(j).begin());
  }
  return c;
}

VerificationReport verify_theorems(const SparseSymMatrix& lhat, double a, double t,
                                   double tol) {
  if (lhat.dim() == 0 || lhat.dim() > 50) {
    throw InputError("verify_theorems: need 1 <= n <= 50, got " +
                     std::to_string(lhat.dim()));
  }
  if (!(t >= 0.0 && t <= 2.0)) throw InputError("verify_theorems: t must lie in [0, 2]");
  if (!(tol > 0.0)) throw InputError("verify_theorems: tol must be positive");
  if (!std::isfinite(a)) throw InputError("verify_theorems: a must be finite");

  const BlockSystem bs = build_block_system(lhat, a);
  const std::size_t dim = 2 * bs.n;
  const auto predicted = eigenstructure(bs);
  const EigenDecomposition full = eigendecompose(bs.c);

  VerificationReport report;
  report.n = bs.n;
  report.a = a;
  report.t = t;

  // (1) spectrum of C against the closed-form multiset.
  std::vector<std::size_t> order(dim);
  for (std::size_t i = 0; i < dim; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return predicted[i].value < predicted[j].value;
  });
  std::vector<double> predicted_sorted(dim);
  for (std::size_t i = 0; i < dim; ++i) predicted_sorted[i] = predicted[order[i]].value;
  report.checks.push_back(make_check(
      "eigenvalue_multiset", max_abs_diff(predicted_sorted, full.values), tol));

  // (2) eigenspaces: predicted block vectors must be eigenvectors and span the
  // same subspace as the computed eigenvectors of each eigenvalue cluster.
  double block_resid = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const auto& p = predicted[k];
    const auto cu = matvec(bs.c, p.vector);
    for (std::size_t i = 0; i < dim; ++i)
      block_resid = std::max(block_resid, std::abs(cu[i] - p.value * p.vector[i]));
    const std::size_t zero_begin = k < bs.n ? bs.n : 0;
    for (std::size_t i = zero_begin; i < zero_begin + bs.n; ++i)
      block_resid = std::max(block_resid, std::abs(p.vector[i]));
  }
  for (const auto& [first, last] : clusters(predicted_sorted)) {
    const double lo = predicted_sorted[first] - kClusterGap * std::max(1.0, std::abs(predicted_sorted[first]));
    const double hi = predicted_sorted[last - 1] + kClusterGap * std::max(1.0, std::abs(predicted_sorted[last - 1]));
    std::vector<std::span<const double>> want;
    std::vector<std::span<const double>> got;
    for (std::size_t i = first; i < last; ++i) want.emplace_back(predicted[order[i]].vector);
    for (std::size_t k = 0; k < dim; ++k)
      if (full.values[k] >= lo && full.values[k] <= hi) got.push_back(full.vectors.col(k));
    if (got.size() != want.size()) {
      block_resid = std::numeric_limits<double>::infinity();
      break;
    }
    block_resid = std::max(block_resid,
                           max_abs_diff(projector(want, dim), projector(got, dim)));
  }
  report.checks.push_back(make_check("eigenvector_blocks", block_resid, tol));

  // (3) d Phi / dt = C Phi by central differences.
  const FundamentalMatrix phi_t = fundamental_matrix(predicted, t);
  const double h = kFiniteDifferenceStep;
  const FundamentalMatrix phi_plus = fundamental_matrix(predicted, t + h);
  const FundamentalMatrix phi_minus = fundamental_matrix(predicted, t - h);
  const DenseMatrix c_phi = matmul(bs.c, phi_t.phi);
  const DenseMatrix fd = scaled(add(phi_plus.phi, phi_minus.phi, -1.0), 0.5 / h);
  report.checks.push_back(make_check(
      "ode_residual", max_abs_diff(fd, c_phi) / std::max(1.0, max_abs(c_phi)), tol));

  // (4) exp(Ct) = Phi(t) Phi(0)^{-1}.
  const FundamentalMatrix phi_0 = fundamental_matrix(predicted, 0.0);
  double exp_resid = std::numeric_limits<double>::infinity();
  try {
    const LuFactor lu(phi_0.phi);
    report.phi0_determinant = lu.determinant();
    if (std::abs(report.phi0_determinant) > 1e-12) {
      const DenseMatrix expct = matrix_exponential(bs.c, t);
      const DenseMatrix via_phi = matmul(phi_t.phi, lu.inverse());
      exp_resid = max_abs_diff(expct, via_phi) / std::max(1.0, max_abs(expct));
    }
  } catch (const NumericError&) {
    report.phi0_determinant = 0.0;
  }
  report.checks.push_back(make_check("exp_identity", exp_resid, tol));
  return report;
}

}  // namespace hpde
