#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "hpde/dense.hpp"
#include "hpde/graph.hpp"
#include "hpde/poly.hpp"

namespace hpde {

enum class Sharing { kShared, kPerStep };

std::string_view sharing_name(Sharing s);
Sharing parse_sharing(std::string_view name);

struct IntegratorConfig {
  double tau = 0.5;
  std::size_t steps = 4;  // m; final time T = steps * tau
  Sharing sharing = Sharing::kShared;
  BasisKind basis = BasisKind::chebyshev();
  std::size_t order = 10;
  double a = 1.0;  // only used by continuous_reference

  void validate() const;
  std::size_t coefficient_rows() const {
    return sharing == Sharing::kShared ? 1 : steps;
  }
};

// theta[step][order], row-major.
class CoefficientTensor {
 public:
  CoefficientTensor() = default;
  CoefficientTensor(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  // Single shared row.
  static CoefficientTensor shared(std::span<const double> row);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const CoefficientTensor&, const CoefficientTensor&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct IntegratorState {
  DenseMatrix prev;  // X(t_{step-1})
  DenseMatrix curr;  // X(t_step)
  std::size_t step = 0;
};

// Row of theta used at time index `step`.
std::span<const double> coefficients_at(const IntegratorConfig& cfg,
                                        const CoefficientTensor& theta, std::size_t step);

// P(L, t_step) X
DenseMatrix apply_rhs(const IntegratorConfig& cfg, const CoefficientTensor& theta,
                      std::size_t step, const SparseSymMatrix& lap, const DenseMatrix& x);

// X(t_0) = X0, X(t_1) = tau Xdot0 + (I + tau^2/2 P(L, t_0)) X0.
IntegratorState init_state(const DenseMatrix& x0, const DenseMatrix& xdot0,
                           const IntegratorConfig& cfg, const CoefficientTensor& theta,
                           const SparseSymMatrix& lap);

// X(t_{m+1}) = (2I + tau^2 P(L, t_m)) X(t_m) - X(t_{m-1}).
IntegratorState step(const IntegratorState& s, const IntegratorConfig& cfg,
                     const CoefficientTensor& theta, const SparseSymMatrix& lap);

// X(T) after cfg.steps steps.
DenseMatrix run(const DenseMatrix& x0, const DenseMatrix& xdot0,
                const IntegratorConfig& cfg, const CoefficientTensor& theta,
                const SparseSymMatrix& lap);

// exp(C t) w0 for C = blockdiag(I, a^2 Lhat), evaluated as Phi(t) Phi(0)^{-1} w0.
std::vector<double> continuous_reference(const SparseSymMatrix& lhat, double a, double t,
                                         std::span<const double> w0);

}  // namespace hpde
