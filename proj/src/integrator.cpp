#include "hpde/integrator.hpp"

#include <cmath>
#include <string>

#include "hpde/error.hpp"
#include "hpde/kernels.hpp"
#include "hpde/verifier.hpp"

namespace hpde {

std::string_view sharing_name(Sharing s) {
  return s == Sharing::kShared ? "shared" : "per-step";
}

Sharing parse_sharing(std::string_view name) {
  if (name == "shared") return Sharing::kShared;
  if (name == "per-step") return Sharing::kPerStep;
  throw InputError("unknown sharing mode \"" + std::string(name) +
                   "\"; valid: shared, per-step");
}

void IntegratorConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InputError("integrator: tau must be positive, got " + std::to_string(tau));
  }
  if (steps < 1) throw InputError("integrator: steps must be >= 1");
  basis.validate();
}

CoefficientTensor CoefficientTensor::shared(std::span<const double> row) {
  CoefficientTensor t(1, row.size());
  std::copy(row.begin(), row.end(), t.values_.begin());
  return t;
}

std::span<const double> coefficients_at(const IntegratorConfig& cfg,
                                        const CoefficientTensor& theta, std::size_t step) {
  if (theta.rows() != cfg.coefficient_rows() || theta.cols() != cfg.order + 1) {
    throw InputError("coefficient tensor is " + std::to_string(theta.rows()) + "x" +
                     std::to_string(theta.cols()) + ", config expects " +
                     std::to_string(cfg.coefficient_rows()) + "x" +
                     std::to_string(cfg.order + 1));
  }
  return theta.row(cfg.sharing == Sharing::kShared ? 0 : step);
}

DenseMatrix apply_rhs(const IntegratorConfig& cfg, const CoefficientTensor& theta,
                      std::size_t step, const SparseSymMatrix& lap, const DenseMatrix& x) {
  return apply_poly(cfg.basis, coefficients_at(cfg, theta, step), lap, x);
}

IntegratorState init_state(const DenseMatrix& x0, const DenseMatrix& xdot0,
                           const IntegratorConfig& cfg, const CoefficientTensor& theta,
                           const SparseSymMatrix& lap) {
  cfg.validate();
  if (!x0.same_shape(xdot0) || x0.rows() != lap.dim()) {
    throw InputError("init_state: X0, Xdot0 and the Laplacian disagree in shape");
  }
  IntegratorState s;
  s.prev = x0;
  s.curr = x0;
  const DenseMatrix px = apply_rhs(cfg, theta, 0, lap, x0);
  kernels::axpy(cfg.tau, xdot0.data(), s.curr.data());
  kernels::axpy(0.5 * cfg.tau * cfg.tau, px.data(), s.curr.data());
  s.step = 1;
  return s;
}

IntegratorState step(const IntegratorState& s, const IntegratorConfig& cfg,
                     const CoefficientTensor& theta, const SparseSymMatrix& lap) {
  if (s.step < 1) throw StateError("step: state is not initialized");
  if (s.step >= cfg.steps) {
    throw StateError("step: run complete (" + std::to_string(s.step) + " of " +
                     std::to_string(cfg.steps) + " steps)");
  }
  const DenseMatrix px = apply_rhs(cfg, theta, s.step, lap, s.curr);
  IntegratorState next;
  next.prev = s.curr;
  next.curr = DenseMatrix(s.curr.rows(), s.curr.cols());
  kernels::axpby(2.0, s.curr.data(), -1.0, s.prev.data(), next.curr.data());
  kernels::axpy(cfg.tau * cfg.tau, px.data(), next.curr.data());
  next.step = s.step + 1;
  return next;
}

DenseMatrix run(const DenseMatrix& x0, const DenseMatrix& xdot0,
                const IntegratorConfig& cfg, const CoefficientTensor& theta,
                const SparseSymMatrix& lap) {
  IntegratorState s = init_state(x0, xdot0, cfg, theta, lap);
  while (s.step < cfg.steps) s = step(s, cfg, theta, lap);
  return s.curr;
}

std::vector<double> continuous_reference(const SparseSymMatrix& lhat, double a, double t,
                                         std::span<const double> w0) {
  if (w0.size() != 2 * lhat.dim()) {
    throw InputError("continuous_reference: w0 must have length 2n");
  }
  const BlockSystem bs = build_block_system(lhat, a);
  const auto pairs = eigenstructure(bs);
  const FundamentalMatrix phi0 = fundamental_matrix(pairs, 0.0);
  const FundamentalMatrix phit = fundamental_matrix(pairs, t);
  const auto c = LuFactor(phi0.phi).solve(w0);
  return matvec(phit.phi, c);
}

}  // namespace hpde
