#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hpde/dense.hpp"
#include "hpde/graph.hpp"
#include "hpde/integrator.hpp"
#include "hpde/poly.hpp"

namespace hpde {

enum class Mode { kPlain, kHyperbolic };

std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view name);

struct ModelSpec {
  Mode mode = Mode::kPlain;
  BasisKind basis = BasisKind::chebyshev();
  std::size_t order = 10;
  // Hyperbolic mode only.
  double tau = 0.5;
  std::size_t steps = 4;
  Sharing sharing = Sharing::kShared;
  // Learn X(t_0) = g0 x and Xdot(t_0) = g1 x instead of fixing g0 = 1, g1 = 0.
  bool learn_gains = false;

  void validate() const;
  IntegratorConfig integrator() const;
  std::size_t coefficient_rows() const;
};

struct ModelParams {
  CoefficientTensor theta;
  double gain0 = 1.0;
  double gain1 = 0.0;
};

// Flat layout used by the optimizer: theta row-major, then the two gains
// when spec.learn_gains.
std::size_t parameter_count(const ModelSpec& spec);
std::vector<double> flatten(const ModelSpec& spec, const ModelParams& p);
ModelParams unflatten(const ModelSpec& spec, std::span<const double> flat);

// Zero-mean Gaussian theta with standard deviation `scale`.
ModelParams init_params(const ModelSpec& spec, std::uint64_t seed, double scale);

// Plain: sum_k theta_k p_k(L) x. Hyperbolic: leapfrog run from X0 = g0 x,
// Xdot0 = g1 x.
DenseMatrix forward(const ModelSpec& spec, const ModelParams& p,
                    const SparseSymMatrix& lap, const DenseMatrix& x);

double loss(std::span<const double> pred, std::span<const double> target);
double loss(const DenseMatrix& pred, const DenseMatrix& target);

// 1 - SS_res / SS_tot. Throws NumericError when the target has zero variance.
double r2_score(std::span<const double> pred, std::span<const double> target);

struct LossGradient {
  double loss = 0.0;
  ModelParams grad;  // same shapes as the parameters
};

// Exact reverse-mode gradient of loss(forward(...), target).
LossGradient gradient(const ModelSpec& spec, const ModelParams& p,
                      const SparseSymMatrix& lap, const DenseMatrix& x,
                      const DenseMatrix& target);

struct FitConfig {
  double learning_rate = 0.05;
  std::size_t max_iterations = 2000;
  std::size_t patience = 100;
  std::uint64_t seed = 0;
  double init_scale = 0.01;

  void validate() const;
};

struct FitReport {
  double final_loss = 0.0;  // best loss seen
  double r2 = 0.0;          // mean over the dataset at the best parameters
  std::size_t iterations = 0;
  ModelParams params;
  std::vector<double> loss_trace;
};

using Dataset = std::vector<std::pair<DenseMatrix, DenseMatrix>>;

// Full-batch Adam on the mean squared error over the dataset. Throws
// NumericError if the loss becomes non-finite.
FitReport fit(const ModelSpec& spec, const FitConfig& cfg, const SparseSymMatrix& lap,
              const Dataset& data);

}  // namespace hpde
