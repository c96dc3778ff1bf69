#include "hpde/fit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hpde/error.hpp"
#include "hpde/kernels.hpp"
#include "hpde/random.hpp"

namespace hpde {

std::string_view mode_name(Mode m) { return m == Mode::kPlain ? "plain" : "hyperbolic"; }

Mode parse_mode(std::string_view name) {
  if (name == "plain") return Mode::kPlain;
  if (name == "hyperbolic") return Mode::kHyperbolic;
  throw InputError("unknown mode \"" + std::string(name) + "\"; valid: plain, hyperbolic");
}

void ModelSpec::validate() const {
  basis.validate();
  if (mode == Mode::kHyperbolic) integrator().validate();
  if (mode == Mode::kPlain && learn_gains) {
    throw InputError("learn_gains applies to hyperbolic mode only");
  }
}

IntegratorConfig ModelSpec::integrator() const {
  IntegratorConfig cfg;
  cfg.tau = tau;
  cfg.steps = steps;
  cfg.sharing = sharing;
  cfg.basis = basis;
  cfg.order = order;
  cfg.a = 1.0;
  return cfg;
}

std::size_t ModelSpec::coefficient_rows() const {
  return mode == Mode::kHyperbolic ? integrator().coefficient_rows() : 1;
}

std::size_t parameter_count(const ModelSpec& spec) {
  return spec.coefficient_rows() * (spec.order + 1) + (spec.learn_gains ? 2 : 0);
}

std::vector<double> flatten(const ModelSpec& spec, const ModelParams& p) {
  std::vector<double> flat(p.theta.values().begin(), p.theta.values().end());
  if (spec.learn_gains) {
    flat.push_back(p.gain0);
    flat.push_back(p.gain1);
  }
  return flat;
}

ModelParams unflatten(const ModelSpec& spec, std::span<const double> flat) {
  if (flat.size() != parameter_count(spec)) {
    throw InputError("unflatten: expected " + std::to_string(parameter_count(spec)) +
                     " parameters, got " + std::to_string(flat.size()));
  }
  ModelParams p;
  p.theta = CoefficientTensor(spec.coefficient_rows(), spec.order + 1);
  std::copy(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(p.theta.values().size()),
            p.theta.values().begin());
  if (spec.learn_gains) {
    p.gain0 = flat[flat.size() - 2];
    p.gain1 = flat[flat.size() - 1];
  }
  return p;
}

ModelParams init_params(const ModelSpec& spec, std::uint64_t seed, double scale) {
  Rng rng(seed);
  ModelParams p;
  p.theta = CoefficientTensor(spec.coefficient_rows(), spec.order + 1);
  for (double& v : p.theta.values()) v = scale * standard_normal(rng);
  return p;
}

namespace {

void check_shapes(const ModelSpec& spec, const ModelParams& p, const SparseSymMatrix& lap,
                  const DenseMatrix& x) {
  spec.validate();
  if (p.theta.rows() != spec.coefficient_rows() || p.theta.cols() != spec.order + 1) {
    throw InputError("coefficient tensor shape does not match the model spec");
  }
  if (x.rows() != lap.dim()) {
    throw InputError("signal length " + std::to_string(x.rows()) +
                     " does not match graph size " + std::to_string(lap.dim()));
  }
}

std::size_t theta_row(const ModelSpec& spec, std::size_t step) {
  return spec.sharing == Sharing::kShared ? 0 : step;
}

// sum_k c_k terms[k]
DenseMatrix combine_terms(std::span<const double> c, const std::vector<DenseMatrix>& terms) {
  DenseMatrix y(terms.front().rows(), terms.front().cols());
  for (std::size_t k = 0; k < terms.size(); ++k) kernels::axpy(c[k], terms[k].data(), y.data());
  return y;
}

// Forward leapfrog pass keeping every state and basis product.
struct Trajectory {
  std::vector<DenseMatrix> states;                      // X_0 .. X_m
  std::vector<std::vector<DenseMatrix>> basis_products; // [j][k] = p_k X_j, j < m
  std::vector<std::vector<double>> coeffs;              // effective, per step
};

Trajectory integrate(const ModelSpec& spec, const ModelParams& p,
                     const SparseSymMatrix& lap, const DenseMatrix& x) {
  const double tau2 = spec.tau * spec.tau;
  const std::size_t m = spec.steps;
  Trajectory tr;
  tr.states.reserve(m + 1);
  tr.basis_products.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    tr.coeffs.push_back(effective_coefficients(spec.basis, p.theta.row(theta_row(spec, j))));
  }

  DenseMatrix x0 = x;
  for (double& v : x0.data()) v *= p.gain0;
  tr.states.push_back(std::move(x0));

  tr.basis_products.push_back(basis_apply(spec.basis, spec.order, lap, tr.states[0]));
  DenseMatrix x1 = tr.states[0];
  kernels::axpy(spec.tau * p.gain1, x.data(), x1.data());
  kernels::axpy(0.5 * tau2, combine_terms(tr.coeffs[0], tr.basis_products[0]).data(),
                x1.data());
  tr.states.push_back(std::move(x1));

  for (std::size_t j = 1; j < m; ++j) {
    tr.basis_products.push_back(basis_apply(spec.basis, spec.order, lap, tr.states[j]));
    DenseMatrix next(x.rows(), x.cols());
    kernels::axpby(2.0, tr.states[j].data(), -1.0, tr.states[j - 1].data(), next.data());
    kernels::axpy(tau2, combine_terms(tr.coeffs[j], tr.basis_products[j]).data(),
                  next.data());
    tr.states.push_back(std::move(next));
  }
  return tr;
}

}  // namespace

DenseMatrix forward(const ModelSpec& spec, const ModelParams& p,
                    const SparseSymMatrix& lap, const DenseMatrix& x) {
  check_shapes(spec, p, lap, x);
  if (spec.mode == Mode::kPlain) return apply_poly(spec.basis, p.theta.row(0), lap, x);
  DenseMatrix x0 = x;
  for (double& v : x0.data()) v *= p.gain0;
  DenseMatrix xdot0 = x;
  for (double& v : xdot0.data()) v *= p.gain1;
  return run(x0, xdot0, spec.integrator(), p.theta, lap);
}

double loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw InputError("loss: prediction has " + std::to_string(pred.size()) +
                     " entries, target has " + std::to_string(target.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - target[i];
    s += r * r;
  }
  return s;
}

double loss(const DenseMatrix& pred, const DenseMatrix& target) {
  if (!pred.same_shape(target)) throw InputError("loss: shape mismatch");
  return loss(pred.data(), target.data());
}

double r2_score(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || target.empty()) {
    throw InputError("r2_score: length mismatch or empty input");
  }
  double mean = 0.0;
  for (double v : target) mean += v;
  mean /= static_cast<double>(target.size());
  double ss_tot = 0.0;
  for (double v : target) ss_tot += (v - mean) * (v - mean);
  if (!(ss_tot > 0.0)) throw NumericError("r2_score: target has zero variance");
  return 1.0 - loss(pred, target) / ss_tot;
}

LossGradient gradient(const ModelSpec& spec, const ModelParams& p,
                      const SparseSymMatrix& lap, const DenseMatrix& x,
                      const DenseMatrix& target) {
  check_shapes(spec, p, lap, x);
  if (!x.same_shape(target)) throw InputError("gradient: target shape mismatch");

  LossGradient out;
  out.grad.theta = CoefficientTensor(p.theta.rows(), p.theta.cols());
  out.grad.gain0 = 0.0;
  out.grad.gain1 = 0.0;

  if (spec.mode == Mode::kPlain) {
    const auto terms = basis_apply(spec.basis, spec.order, lap, x);
    const auto coeffs = effective_coefficients(spec.basis, p.theta.row(0));
    DenseMatrix resid = combine_terms(coeffs, terms);
    kernels::axpy(-1.0, target.data(), resid.data());
    out.loss = kernels::dot(resid.data(), resid.data());
    std::vector<double> g_eff(terms.size());
    for (std::size_t k = 0; k < terms.size(); ++k)
      g_eff[k] = 2.0 * kernels::dot(resid.data(), terms[k].data());
    const auto g = pullback_coefficients(spec.basis, g_eff);
    std::copy(g.begin(), g.end(), out.grad.theta.row(0).begin());
    return out;
  }

  const std::size_t m = spec.steps;
  const double tau2 = spec.tau * spec.tau;
  const Trajectory tr = integrate(spec, p, lap, x);

  // adj[j] = d loss / d X_j, accumulated from later states.
  std::vector<DenseMatrix> adj(m + 1, DenseMatrix(x.rows(), x.cols()));
  adj[m] = tr.states[m];
  kernels::axpy(-1.0, target.data(), adj[m].data());
  out.loss = kernels::dot(adj[m].data(), adj[m].data());
  for (double& v : adj[m].data()) v *= 2.0;

  std::vector<std::vector<double>> g_eff(m, std::vector<double>(spec.order + 1, 0.0));
  // X_{j+1} = 2 X_j + tau^2 P_j X_j - X_{j-1}; P_j is symmetric.
  for (std::size_t j = m - 1; j >= 1; --j) {
    const DenseMatrix& up = adj[j + 1];
    for (std::size_t k = 0; k <= spec.order; ++k)
      g_eff[j][k] += tau2 * kernels::dot(up.data(), tr.basis_products[j][k].data());
    const auto p_up = combine_terms(tr.coeffs[j], basis_apply(spec.basis, spec.order, lap, up));
    kernels::axpy(2.0, up.data(), adj[j].data());
    kernels::axpy(tau2, p_up.data(), adj[j].data());
    kernels::axpy(-1.0, up.data(), adj[j - 1].data());
  }
  // X_1 = X_0 + tau g1 x + tau^2/2 P_0 X_0.
  for (std::size_t k = 0; k <= spec.order; ++k)
    g_eff[0][k] += 0.5 * tau2 * kernels::dot(adj[1].data(), tr.basis_products[0][k].data());

  for (std::size_t j = 0; j < m; ++j) {
    const auto g = pullback_coefficients(spec.basis, g_eff[j]);
    auto row = out.grad.theta.row(theta_row(spec, j));
    for (std::size_t k = 0; k < g.size(); ++k) row[k] += g[k];
  }

  if (spec.learn_gains) {
    const auto p_up = combine_terms(tr.coeffs[0], basis_apply(spec.basis, spec.order, lap, adj[1]));
    kernels::axpy(1.0, adj[1].data(), adj[0].data());
    kernels::axpy(0.5 * tau2, p_up.data(), adj[0].data());
    out.grad.gain0 = kernels::dot(adj[0].data(), x.data());
    out.grad.gain1 = spec.tau * kernels::dot(adj[1].data(), x.data());
  }
  return out;
}

void FitConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InputError("fit: learning rate must be positive");
  if (max_iterations < 1) throw InputError("fit: max iterations must be >= 1");
  if (patience < 1 || patience > max_iterations) {
    throw InputError("fit: patience must lie in [1, max iterations]");
  }
  if (!(init_scale > 0.0)) throw InputError("fit: init scale must be positive");
}

FitReport fit(const ModelSpec& spec, const FitConfig& cfg, const SparseSymMatrix& lap,
              const Dataset& data) {
  spec.validate();
  cfg.validate();
  if (data.empty()) throw InputError("fit: empty dataset");

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;

  std::vector<double> theta = flatten(spec, init_params(spec, cfg.seed, cfg.init_scale));
  const std::size_t np = theta.size();
  std::vector<double> m1(np, 0.0);
  std::vector<double> m2(np, 0.0);
  std::vector<double> best = theta;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t best_iter = 0;
  const double inv_count = 1.0 / static_cast<double>(data.size());

  FitReport report;
  report.loss_trace.reserve(cfg.max_iterations);
  double b1t = 1.0;
  double b2t = 1.0;
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    const ModelParams params = unflatten(spec, theta);
    double total = 0.0;
    std::vector<double> grad(np, 0.0);
    for (const auto& [x, y] : data) {
      const LossGradient lg = gradient(spec, params, lap, x, y);
      total += lg.loss;
      const auto g = flatten(spec, lg.grad);
      for (std::size_t i = 0; i < np; ++i) grad[i] += g[i];
    }
    total *= inv_count;
    for (double& g : grad) g *= inv_count;
    if (!std::isfinite(total)) {
      std::ostringstream msg;
      msg << "fit diverged at iteration " << it << " (loss " << total << ")";
      throw NumericError(msg.str());
    }
    report.loss_trace.push_back(total);
    report.iterations = it;
    if (total < best_loss) {
      best_loss = total;
      best = theta;
      best_iter = it;
    } else if (it - best_iter >= cfg.patience) {
      break;
    }

    b1t *= kBeta1;
    b2t *= kBeta2;
    for (std::size_t i = 0; i < np; ++i) {
      m1[i] = kBeta1 * m1[i] + (1.0 - kBeta1) * grad[i];
      m2[i] = kBeta2 * m2[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      const double mhat = m1[i] / (1.0 - b1t);
      const double vhat = m2[i] / (1.0 - b2t);
      theta[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + kEps);
    }
  }

  report.final_loss = best_loss;
  report.params = unflatten(spec, best);
  double r2 = 0.0;
  for (const auto& [x, y] : data) {
    const DenseMatrix pred = forward(spec, report.params, lap, x);
    r2 += r2_score(pred.data(), y.data());
  }
  report.r2 = r2 * inv_count;
  return report;
}

}  // namespace hpde
