#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpde/fit.hpp"
#include "hpde/graph.hpp"

namespace hpde {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::size_t kDenseOracleWarnNodes = 1000;

struct GraphSource {
  std::optional<std::pair<std::size_t, std::size_t>> grid;
  std::optional<std::string> path;
};

struct SignalSource {
  std::optional<std::uint64_t> synthetic_seed;
  std::size_t synthetic_count = 1;  // signal k uses seed + k
  std::vector<std::string> csv_paths;
};

struct NamedSpec {
  std::string name;
  ModelSpec spec;
};

struct ExperimentConfig {
  GraphSource graph;
  LaplacianKind laplacian = LaplacianKind::kNormalized;
  SignalSource signals;
  std::vector<std::string> filters;
  std::vector<NamedSpec> specs;
  FitConfig fit;
  bool aggregate = false;  // one fit per (filter, spec) across all signals
  std::string output;
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const;
};

// e.g. "hyperbolic-chebyshev-K10-tau0.5-m4"
std::string default_spec_name(const ModelSpec& s);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);

// Entries uniform on [0, 1) from mt19937_64 seeded with `seed`.
std::vector<double> synthetic_signal(std::uint64_t seed, std::size_t n);

Graph load_graph(const GraphSource& src);

struct NamedSignal {
  std::string name;
  std::vector<double> values;
};
std::vector<NamedSignal> load_signals(const SignalSource& src, std::size_t n);

struct CellResult {
  std::string signal;
  std::string filter;
  std::string spec_name;
  ModelSpec spec;
  FitConfig config;
  std::optional<FitReport> report;
  std::string error;  // set when the fit failed
};

struct AggregateRow {
  std::string filter;
  std::string spec_name;
  double mean_squared_error = 0.0;
  double mean_r2 = 0.0;
  std::size_t cells = 0;
  std::size_t failed = 0;
};

struct ComparisonRow {
  std::string filter;
  std::string plain_spec;
  std::string hyperbolic_spec;
  double plain_loss = 0.0;
  double hyperbolic_loss = 0.0;
  double improvement_pct = 0.0;  // (plain - hyperbolic) / plain * 100
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CellResult> cells;  // (signal, filter, spec) order
  std::vector<AggregateRow> aggregates;
  std::vector<ComparisonRow> comparison;

  bool any_failed() const;
};

// Runs every (signal, filter, spec) cell. Fit failures are recorded per cell.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

std::vector<AggregateRow> aggregate_cells(const std::vector<CellResult>& cells);
// Pairs each plain spec with the hyperbolic spec of the same basis and order.
std::vector<ComparisonRow> compare_modes(const ExperimentConfig& cfg,
                                         const std::vector<AggregateRow>& rows);
std::string format_comparison(const std::vector<ComparisonRow>& rows);

// Top-level "schema_version": 1. The "generated_at" stamp is the only field
// that varies between identical runs; omitted when `timestamp` is false.
nlohmann::json to_json(const ExperimentReport& report, bool timestamp = true);

struct SweepGrid {
  std::vector<double> learning_rates;
  std::vector<std::size_t> orders;
  std::vector<double> taus;
};

struct SweepReport {
  ExperimentReport runs;  // every swept cell; spec names carry the overrides
  std::vector<CellResult> best;  // argmin final loss per (signal, filter)
};

// Cross product of the grid with every spec of the config. Empty lists keep
// the config's own value.
SweepReport run_sweep(const ExperimentConfig& cfg, const SweepGrid& grid);
nlohmann::json to_json(const SweepReport& report, bool timestamp = true);

}  // namespace hpde
