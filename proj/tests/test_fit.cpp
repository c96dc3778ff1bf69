#include <gtest/gtest.h>

#include <cmath>

#include "hpde/error.hpp"
#include "hpde/fit.hpp"
#include "hpde/graph.hpp"
#include "hpde/spectral.hpp"
#include "test_support.hpp"

namespace hpde {
namespace {

std::vector<BasisKind> all_bases() {
  return {BasisKind::monomial(), BasisKind::chebyshev(), BasisKind::bernstein(),
          BasisKind::jacobi(1.0, 1.0), BasisKind::chebyshev_interp()};
}

ModelSpec make_spec(Mode mode, BasisKind basis, std::size_t order) {
  ModelSpec s;
  s.mode = mode;
  s.basis = basis;
  s.order = order;
  return s;
}

ModelParams random_params(const ModelSpec& spec, std::uint64_t seed, double scale) {
  ModelParams p = init_params(spec, seed, scale);
  if (spec.learn_gains) {
    p.gain0 = 0.9;
    p.gain1 = 0.2;
  }
  return p;
}

DenseMatrix random_col(std::size_t n, std::uint64_t seed) {
  return DenseMatrix::column(testing::random_vector(n, seed, 0.0, 1.0));
}

TEST(Loss, Examples) {
  const std::vector<double> a{1, 2, 3};
  EXPECT_EQ(loss(a, a), 0.0);
  EXPECT_EQ(loss(std::vector<double>{1, 0}, std::vector<double>{0, 0}), 1.0);
  EXPECT_EQ(loss(a, std::vector<double>{0, 0, 0}), 14.0);
  EXPECT_THROW(loss(a, std::vector<double>{0, 0}), InputError);
}

TEST(R2, Examples) {
  const std::vector<double> t{0, 0, 1, 1};
  EXPECT_EQ(r2_score(t, t), 1.0);
  EXPECT_EQ(r2_score(std::vector<double>{0.5, 0.5, 0.5, 0.5}, t), 0.0);
  EXPECT_EQ(r2_score(std::vector<double>{0, 0, 2, 2}, t), -1.0);
  EXPECT_THROW(r2_score(t, std::vector<double>{3, 3, 3, 3}), NumericError);
}

TEST(Forward, Examples) {
  const SparseSymMatrix l = normalized_laplacian(path_graph(3));
  const DenseMatrix x = random_col(3, 1);
  auto plain = make_spec(Mode::kPlain, BasisKind::chebyshev(), 3);
  ModelParams p{CoefficientTensor(1, 4), 1.0, 0.0};
  p.theta.row(0)[0] = 1.0;
  EXPECT_LT(max_abs_diff(forward(plain, p, l, x), x), 1e-15);

  auto hyp = make_spec(Mode::kHyperbolic, BasisKind::chebyshev(), 3);
  ModelParams z{CoefficientTensor(1, 4), 1.0, 0.0};
  EXPECT_LT(max_abs_diff(forward(hyp, z, l, x), x), 1e-15);

  const auto ed = eigendecompose(l.to_dense());
  auto cheb4 = make_spec(Mode::kPlain, BasisKind::chebyshev(), 4);
  const ModelParams r = init_params(cheb4, 3, 1.0);
  const auto th = r.theta.row(0);
  const auto want = exact_filter(
      ed, [&](double lam) { return eval_scalar(cheb4.basis, th, lam); }, x.col(0));
  EXPECT_LT(max_abs_diff(forward(cheb4, r, l, x).col(0), want), 1e-8);
}

TEST(Params, FlattenRoundTripAndCount) {
  ModelSpec s = make_spec(Mode::kHyperbolic, BasisKind::bernstein(), 5);
  s.sharing = Sharing::kPerStep;
  s.steps = 3;
  s.learn_gains = true;
  EXPECT_EQ(parameter_count(s), 3u * 6u + 2u);
  const ModelParams p = random_params(s, 4, 1.0);
  const auto flat = flatten(s, p);
  const ModelParams q = unflatten(s, flat);
  EXPECT_EQ(q.theta, p.theta);
  EXPECT_EQ(q.gain0, p.gain0);
  EXPECT_EQ(q.gain1, p.gain1);
  s.mode = Mode::kPlain;
  EXPECT_THROW(s.validate(), InputError);
}

struct GradCase {
  Mode mode;
  BasisKind basis;
  std::size_t order;
  Sharing sharing;
  bool gains;
};

double gradient_error(const GradCase& c, std::uint64_t seed) {
  ModelSpec spec = make_spec(c.mode, c.basis, c.order);
  spec.sharing = c.sharing;
  spec.learn_gains = c.gains;
  spec.tau = 0.4;
  spec.steps = 4;
  const SparseSymMatrix l = normalized_laplacian(testing::random_connected_graph(7, 0.3, seed));
  const DenseMatrix x = random_col(7, seed + 1), target = random_col(7, seed + 2);
  const ModelParams p = random_params(spec, seed + 3, 0.3);
  const LossGradient lg = gradient(spec, p, l, x, target);
  EXPECT_NEAR(lg.loss, loss(forward(spec, p, l, x), target), 1e-12 * std::max(1.0, lg.loss));
  const auto f = [&](const std::vector<double>& flat) {
    return loss(forward(spec, unflatten(spec, flat), l, x), target);
  };
  const auto fd = testing::central_difference(f, flatten(spec, p), 1e-5);
  return testing::max_relative_error(flatten(spec, lg.grad), fd);
}

TEST(Gradient, MatchesFiniteDifferencesAllConfigs) {
  std::uint64_t seed = 10;
  for (Mode mode : {Mode::kPlain, Mode::kHyperbolic})
    for (const auto& basis : all_bases())
      for (std::size_t order : {2u, 5u, 8u})
        for (Sharing sh : {Sharing::kShared, Sharing::kPerStep})
          for (bool gains : {false, true}) {
            if (mode == Mode::kPlain && (sh == Sharing::kPerStep || gains)) continue;
            seed += 7;
            const GradCase c{mode, basis, order, sh, gains};
            EXPECT_LT(gradient_error(c, seed), 1e-5)
                << mode_name(mode) << " " << basis_name(basis.basis) << " K=" << order << " "
                << sharing_name(sh) << " gains=" << gains;
          }
}

TEST(Gradient, PlainOrderZeroClosedForm) {
  const SparseSymMatrix l = normalized_laplacian(path_graph(4));
  const DenseMatrix x = random_col(4, 1), target = random_col(4, 2);
  const ModelSpec spec = make_spec(Mode::kPlain, BasisKind::monomial(), 0);
  ModelParams p{CoefficientTensor(1, 1), 1.0, 0.0};
  p.theta.row(0)[0] = 0.37;
  double want = 0.0;
  for (std::size_t i = 0; i < 4; ++i) want += 2 * (0.37 * x(i, 0) - target(i, 0)) * x(i, 0);
  EXPECT_NEAR(gradient(spec, p, l, x, target).grad.theta.row(0)[0], want, 1e-14);
}

TEST(Gradient, VanishesAtExactMinimum) {
  const SparseSymMatrix l = normalized_laplacian(grid_graph(3, 3));
  const DenseMatrix x = random_col(9, 5);
  for (Mode mode : {Mode::kPlain, Mode::kHyperbolic}) {
    const ModelSpec spec = make_spec(mode, BasisKind::chebyshev(), 3);
    const ModelParams star = init_params(spec, 6, 0.3);
    const DenseMatrix target = forward(spec, star, l, x);
    const LossGradient lg = gradient(spec, star, l, x, target);
    EXPECT_EQ(lg.loss, 0.0);
    double norm = 0.0;
    for (double g : lg.grad.theta.values()) norm += g * g;
    EXPECT_LT(std::sqrt(norm), 1e-8);
  }
}

TEST(Fit, GenerateThenRecover) {
  const SparseSymMatrix l = normalized_laplacian(grid_graph(4, 4));
  const DenseMatrix x = random_col(16, 9);
  for (Mode mode : {Mode::kPlain, Mode::kHyperbolic})
    for (const auto& basis : all_bases()) {
      ModelSpec spec = make_spec(mode, basis, 3);
      spec.tau = 0.5;
      spec.steps = 2;
      const ModelParams star = init_params(spec, 10, 0.2);
      const DenseMatrix target = forward(spec, star, l, x);
      FitConfig cfg;
      cfg.max_iterations = 6000;
      cfg.patience = 300;
      cfg.learning_rate = 0.02;
      const FitReport r = fit(spec, cfg, l, {{x, target}});
      EXPECT_LT(r.final_loss, 1e-6) << mode_name(mode) << " " << basis_name(basis.basis);
      EXPECT_GT(r.r2, 0.9999) << mode_name(mode) << " " << basis_name(basis.basis);
    }
}

TEST(Fit, IdentityTargetGivesUnitScale) {
  const SparseSymMatrix l = normalized_laplacian(path_graph(5));
  const DenseMatrix x = random_col(5, 3);
  const ModelSpec spec = make_spec(Mode::kPlain, BasisKind::monomial(), 0);
  const FitReport r = fit(spec, FitConfig{}, l, {{x, x}});
  EXPECT_NEAR(r.params.theta.row(0)[0], 1.0, 1e-4);
}

TEST(Fit, DeterministicAndMonotoneBest) {
  const SparseSymMatrix l = normalized_laplacian(grid_graph(4, 4));
  const DenseMatrix x = random_col(16, 2);
  const auto ed = eigendecompose(l.to_dense());
  const DenseMatrix target = exact_filter(ed, reference_filter("band-pass").gain, x);
  ModelSpec spec = make_spec(Mode::kHyperbolic, BasisKind::chebyshev(), 6);
  FitConfig cfg;
  cfg.max_iterations = 300;
  cfg.seed = 17;
  const FitReport a = fit(spec, cfg, l, {{x, target}});
  const FitReport b = fit(spec, cfg, l, {{x, target}});
  EXPECT_EQ(a.params.theta, b.params.theta);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  double best = INFINITY;
  for (double v : a.loss_trace) best = std::min(best, v);
  EXPECT_EQ(a.final_loss, best);
  EXPECT_LE(a.final_loss, a.loss_trace.front());
}

TEST(Fit, LowPassOnGridChebyshev) {
  const SparseSymMatrix l = normalized_laplacian(grid_graph(8, 8));
  const DenseMatrix x = random_col(64, 42);
  const auto ed = eigendecompose(l.to_dense());
  const DenseMatrix target = exact_filter(ed, reference_filter("low-pass").gain, x);
  const FitReport r =
      fit(make_spec(Mode::kPlain, BasisKind::chebyshev(), 10), FitConfig{}, l, {{x, target}});
  EXPECT_GE(r.r2, 0.99);
}

TEST(Fit, DivergenceReportsIteration) {
  const SparseSymMatrix l = combinatorial_laplacian(grid_graph(4, 4));
  const DenseMatrix x = random_col(16, 2);
  ModelSpec spec = make_spec(Mode::kHyperbolic, BasisKind::monomial(), 4);
  spec.steps = 40;
  spec.tau = 2.0;
  FitConfig cfg;
  cfg.init_scale = 50.0;
  cfg.learning_rate = 1.0;
  try {
    fit(spec, cfg, l, {{x, x}});
    FAIL() << "expected divergence";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("iteration"), std::string::npos);
  }
}

TEST(Fit, ConfigValidation) {
  FitConfig cfg;
  cfg.learning_rate = -1.0;
  EXPECT_THROW(cfg.validate(), InputError);
  const SparseSymMatrix l = normalized_laplacian(path_graph(3));
  EXPECT_THROW(fit(make_spec(Mode::kPlain, BasisKind::chebyshev(), 2), FitConfig{}, l, {}),
               InputError);
}

}  // namespace
}  // namespace hpde
