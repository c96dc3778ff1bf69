// hpde: graph generation, target synthesis, filter fitting, theorem checks
// and hyperparameter sweeps.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hpde/error.hpp"
#include "hpde/experiment.hpp"
#include "hpde/graph.hpp"
#include "hpde/io.hpp"
#include "hpde/spectral.hpp"
#include "hpde/verifier.hpp"

namespace {

using namespace hpde;

struct GraphFlags {
  std::string path;
  std::vector<std::size_t> grid;
  std::size_t path_nodes = 0;

  void add(CLI::App* app, bool allow_path_graph = false) {
    app->add_option("--graph", path, "Edge-list file");
    app->add_option("--grid", grid, "Grid dimensions R C")->expected(2);
    if (allow_path_graph) app->add_option("--path", path_nodes, "Path graph on N nodes");
  }
  bool given() const { return !path.empty() || !grid.empty() || path_nodes > 0; }
  GraphSource source() const {
    GraphSource src;
    if (!path.empty()) src.path = path;
    if (!grid.empty()) src.grid = std::make_pair(grid[0], grid[1]);
    return src;
  }
  Graph load() const {
    const int count = !path.empty() + !grid.empty() + (path_nodes > 0);
    if (count != 1) throw InputError("give exactly one of --graph, --grid, --path");
    if (path_nodes > 0) return path_graph(path_nodes);
    return load_graph(source());
  }
};

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

LaplacianKind parse_laplacian(const std::string& s) {
  if (s == "normalized") return LaplacianKind::kNormalized;
  if (s == "combinatorial") return LaplacianKind::kCombinatorial;
  throw InputError("unknown laplacian \"" + s + "\"; valid: normalized, combinatorial");
}

// Flags shared by fit and sweep that override or replace config fields.
struct ExperimentFlags {
  std::string config_path;
  GraphFlags graph;
  std::string signal;
  std::optional<std::uint64_t> synthetic;
  std::size_t synthetic_count = 0;
  std::string filters;
  std::string basis, mode, sharing, laplacian;
  std::optional<std::size_t> order, steps, iters, patience;
  std::optional<double> tau, lr;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out;
  bool aggregate = false;
  bool no_timestamp = false;

  void add(CLI::App* app) {
    app->add_option("config", config_path, "Experiment config JSON");
    graph.add(app);
    app->add_option("--signal", signal, "Signal CSV file(s), comma separated");
    app->add_option("--synthetic", synthetic, "Seed for synthetic uniform signals");
    app->add_option("--signals", synthetic_count, "Number of synthetic signals");
    app->add_option("--filter", filters, "Filter name(s), comma separated");
    app->add_option("--basis", basis, "monomial|chebyshev|bernstein|jacobi|chebyshev-interp");
    app->add_option("--order", order, "Polynomial order K");
    app->add_option("--mode", mode, "plain|hyperbolic");
    app->add_option("--tau", tau, "Time step");
    app->add_option("--steps", steps, "Number of time steps");
    app->add_option("--sharing", sharing, "shared|per-step");
    app->add_option("--laplacian", laplacian, "normalized|combinatorial");
    app->add_option("--lr", lr, "Learning rate");
    app->add_option("--iters", iters, "Maximum iterations");
    app->add_option("--patience", patience, "Early-stopping patience");
    app->add_option("--seed", seed, "Initialization seed");
    app->add_option("--threads", threads, "Worker threads (0: all cores)");
    app->add_option("--out", out, "Output path (default stdout)");
    app->add_flag("--aggregate", aggregate, "Fit one coefficient set across all signals");
    app->add_flag("--no-timestamp", no_timestamp, "Omit the generation timestamp");
  }

  ExperimentConfig build() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = experiment_config_from_json(read_json_file(config_path));
    if (graph.given()) cfg.graph = graph.source();
    if (!signal.empty()) {
      cfg.signals = {};
      cfg.signals.csv_paths = split_csv(signal);
    }
    if (synthetic) {
      cfg.signals = {};
      cfg.signals.synthetic_seed = *synthetic;
    }
    if (synthetic_count > 0) cfg.signals.synthetic_count = synthetic_count;
    if (!filters.empty()) cfg.filters = split_csv(filters);
    if (!laplacian.empty()) cfg.laplacian = parse_laplacian(laplacian);

    const bool spec_flags = !basis.empty() || !mode.empty() || order || tau || steps ||
                            !sharing.empty();
    if (cfg.specs.empty() || !basis.empty() || !mode.empty()) {
      ModelSpec s = cfg.specs.empty() ? ModelSpec{} : cfg.specs.front().spec;
      cfg.specs = {NamedSpec{"", s}};
    }
    if (spec_flags) {
      for (auto& ns : cfg.specs) {
        ModelSpec& s = ns.spec;
        if (!basis.empty()) {
          s.basis.basis = parse_basis(basis);
          s.basis.shift = canonical_shift(s.basis.basis);
        }
        if (!mode.empty()) s.mode = parse_mode(mode);
        if (order) s.order = *order;
        if (tau) s.tau = *tau;
        if (steps) s.steps = *steps;
        if (!sharing.empty()) s.sharing = parse_sharing(sharing);
        ns.name.clear();
      }
    }
    for (auto& ns : cfg.specs) {
      if (ns.name.empty()) ns.name = default_spec_name(ns.spec);
    }
    if (lr) cfg.fit.learning_rate = *lr;
    if (iters) cfg.fit.max_iterations = *iters;
    if (patience) cfg.fit.patience = *patience;
    if (seed) cfg.fit.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (aggregate) cfg.aggregate = true;
    if (!out.empty()) cfg.output = out;
    return cfg;
  }
};

int run_cli(int argc, char** argv) {
  CLI::App app{"Polynomial and hyperbolic-PDE graph spectral filters"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // gen-grid
  auto* gen_grid = app.add_subcommand("gen-grid", "Write a 4-neighborhood grid edge list");
  std::size_t rows = 0, cols = 0;
  std::string grid_out;
  gen_grid->add_option("rows", rows)->required();
  gen_grid->add_option("cols", cols)->required();
  gen_grid->add_option("--out", grid_out, "Output path (default stdout)");

  // gen-signal
  auto* gen_signal = app.add_subcommand("gen-signal", "Write a synthetic uniform signal CSV");
  std::uint64_t sig_seed = 0;
  std::size_t sig_nodes = 0;
  std::string sig_out;
  gen_signal->add_option("--synthetic", sig_seed, "Seed")->required();
  gen_signal->add_option("--nodes", sig_nodes, "Signal length")->required();
  gen_signal->add_option("--out", sig_out, "Output path (default stdout)");

  // make-target
  auto* make_target = app.add_subcommand("make-target", "Filter a signal exactly");
  GraphFlags mt_graph;
  mt_graph.add(make_target);
  std::string mt_signal, mt_filter, mt_out, mt_lap = "normalized";
  std::optional<std::uint64_t> mt_seed;
  make_target->add_option("--signal", mt_signal, "Signal CSV");
  make_target->add_option("--synthetic", mt_seed, "Synthetic signal seed");
  make_target->add_option("--filter", mt_filter, "Reference filter name")->required();
  make_target->add_option("--laplacian", mt_lap, "normalized|combinatorial");
  make_target->add_option("--out", mt_out, "Output path (default stdout)");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit filter models and write a report");
  ExperimentFlags fit_flags;
  fit_flags.add(fit_cmd);

  // verify
  auto* verify = app.add_subcommand("verify", "Check the fundamental-matrix identities");
  GraphFlags v_graph;
  v_graph.add(verify, true);
  double v_a = 1.0, v_t = 1.0, v_tol = 1e-6;
  std::string v_out;
  verify->add_option("--a", v_a, "Propagation coefficient");
  verify->add_option("--t", v_t, "Time in [0, 2]");
  verify->add_option("--tol", v_tol, "Tolerance");
  verify->add_option("--out", v_out, "Output path (default stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Grid search over lr, order and tau");
  ExperimentFlags sw_flags;
  sw_flags.add(sweep);
  std::string sw_lrs, sw_orders, sw_taus;
  sweep->add_option("--lr-list", sw_lrs, "Learning rates, comma separated");
  sweep->add_option("--order-list", sw_orders, "Orders, comma separated");
  sweep->add_option("--tau-list", sw_taus, "Time steps, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  if (*gen_grid) {
    std::ostringstream os;
    write_edge_list(os, grid_graph(rows, cols));
    emit(grid_out, os.str());
    return kExitOk;
  }
  if (*gen_signal) {
    std::ostringstream os;
    write_signal_csv(os, synthetic_signal(sig_seed, sig_nodes));
    emit(sig_out, os.str());
    return kExitOk;
  }
  if (*make_target) {
    const Graph g = mt_graph.load();
    if (mt_signal.empty() == !mt_seed.has_value()) {
      throw InputError("give exactly one of --signal and --synthetic");
    }
    const auto x = mt_seed ? synthetic_signal(*mt_seed, g.num_nodes())
                           : read_signal_csv_file(mt_signal);
    if (x.size() != g.num_nodes()) throw InputError("signal length does not match the graph");
    const ScalarFilter filt = reference_filter(mt_filter);
    if (g.num_nodes() > kDenseOracleWarnNodes) {
      std::cerr << "warning: dense eigendecomposition of " << g.num_nodes() << " nodes\n";
    }
    const auto lap = laplacian(g, parse_laplacian(mt_lap));
    const auto ed = eigendecompose(lap.to_dense());
    std::ostringstream os;
    write_signal_csv(os, exact_filter(ed, filt.gain, x));
    emit(mt_out, os.str());
    return kExitOk;
  }
  if (*verify) {
    const Graph g = v_graph.given() ? v_graph.load() : path_graph(2);
    const auto report = verify_theorems(combinatorial_laplacian(g), v_a, v_t, v_tol);
    emit(v_out, dump_json(to_json(report)));
    return report.all_passed() ? kExitOk : kExitNumeric;
  }
  if (*fit_cmd) {
    const ExperimentConfig cfg = fit_flags.build();
    const ExperimentReport report = run_experiment(cfg);
    emit(cfg.output, dump_json(to_json(report, !fit_flags.no_timestamp)));
    if (!report.comparison.empty() && !cfg.output.empty() && cfg.output != "-") {
      std::cout << format_comparison(report.comparison);
    }
    for (const auto& c : report.cells) {
      if (!c.report) std::cerr << "fit failed (" << c.filter << ", " << c.spec_name << "): " << c.error << "\n";
    }
    return report.any_failed() ? kExitNumeric : kExitOk;
  }
  if (*sweep) {
    const ExperimentConfig cfg = sw_flags.build();
    SweepGrid grid;
    for (const auto& s : split_csv(sw_lrs)) grid.learning_rates.push_back(std::stod(s));
    for (const auto& s : split_csv(sw_orders)) grid.orders.push_back(std::stoul(s));
    for (const auto& s : split_csv(sw_taus)) grid.taus.push_back(std::stod(s));
    const SweepReport report = run_sweep(cfg, grid);
    emit(cfg.output, dump_json(to_json(report, !sw_flags.no_timestamp)));
    return report.runs.any_failed() ? kExitNumeric : kExitOk;
  }
  return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad number: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
