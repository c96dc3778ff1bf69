#include "hpde/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "hpde/error.hpp"
#include "hpde/io.hpp"
#include "hpde/kernels.hpp"
#include "hpde/random.hpp"
#include "hpde/spectral.hpp"

namespace hpde {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (graph.grid.has_value() == graph.path.has_value()) {
    throw InputError("experiment: specify exactly one of a grid or an edge-list path");
  }
  if (graph.path && !std::filesystem::exists(*graph.path)) {
    throw InputError("experiment: graph file " + *graph.path + " does not exist");
  }
  if (signals.synthetic_seed.has_value() == !signals.csv_paths.empty()) {
    throw InputError("experiment: specify exactly one of a synthetic seed or signal files");
  }
  if (signals.synthetic_seed && signals.synthetic_count == 0) {
    throw InputError("experiment: synthetic signal count must be >= 1");
  }
  for (const auto& p : signals.csv_paths) {
    if (!std::filesystem::exists(p)) throw InputError("experiment: signal file " + p + " does not exist");
  }
  if (filters.empty()) throw InputError("experiment: at least one filter is required");
  for (const auto& f : filters) reference_filter(f);
  if (specs.empty()) throw InputError("experiment: at least one model spec is required");
  for (const auto& s : specs) s.spec.validate();
  fit.validate();
}

std::string default_spec_name(const ModelSpec& s) {
  std::string name = std::string(mode_name(s.mode)) + "-" +
                     std::string(basis_name(s.basis.basis)) + "-K" + std::to_string(s.order);
  if (s.mode == Mode::kHyperbolic) {
    std::ostringstream os;
    os << "-tau" << s.tau << "-m" << s.steps;
    if (s.sharing == Sharing::kPerStep) os << "-perstep";
    name += os.str();
  }
  return name;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("graph")) {
      const auto& g = j["graph"];
      if (g.contains("grid")) {
        cfg.graph.grid = std::make_pair(g["grid"].at(0).get<std::size_t>(),
                                        g["grid"].at(1).get<std::size_t>());
      }
      if (g.contains("path")) cfg.graph.path = g["path"].get<std::string>();
    }
    if (j.contains("laplacian")) {
      const auto lap = j["laplacian"].get<std::string>();
      if (lap == "normalized") {
        cfg.laplacian = LaplacianKind::kNormalized;
      } else if (lap == "combinatorial") {
        cfg.laplacian = LaplacianKind::kCombinatorial;
      } else {
        throw InputError("unknown laplacian \"" + lap + "\"; valid: normalized, combinatorial");
      }
    }
    if (j.contains("signals")) {
      const auto& s = j["signals"];
      if (s.contains("synthetic")) {
        cfg.signals.synthetic_seed = s["synthetic"].at("seed").get<std::uint64_t>();
        cfg.signals.synthetic_count = s["synthetic"].value("count", std::size_t{1});
      }
      if (s.contains("csv")) cfg.signals.csv_paths = s["csv"].get<std::vector<std::string>>();
    }
    if (j.contains("filters")) cfg.filters = j["filters"].get<std::vector<std::string>>();
    if (j.contains("specs")) {
      for (const auto& sj : j["specs"]) {
        NamedSpec ns{sj.value("name", std::string()), model_spec_from_json(sj)};
        if (ns.name.empty()) ns.name = default_spec_name(ns.spec);
        cfg.specs.push_back(std::move(ns));
      }
    }
    if (j.contains("fit")) cfg.fit = fit_config_from_json(j["fit"]);
    cfg.aggregate = j.value("aggregate", false);
    cfg.output = j.value("output", std::string());
    cfg.threads = j.value("threads", std::size_t{0});
  } catch (const json::exception& e) {
    throw InputError(std::string("experiment config: ") + e.what());
  }
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  if (cfg.graph.grid) j["graph"]["grid"] = {cfg.graph.grid->first, cfg.graph.grid->second};
  if (cfg.graph.path) j["graph"]["path"] = *cfg.graph.path;
  j["laplacian"] = cfg.laplacian == LaplacianKind::kNormalized ? "normalized" : "combinatorial";
  if (cfg.signals.synthetic_seed) {
    j["signals"]["synthetic"] = {{"seed", *cfg.signals.synthetic_seed},
                                 {"count", cfg.signals.synthetic_count}};
  } else {
    j["signals"]["csv"] = cfg.signals.csv_paths;
  }
  j["filters"] = cfg.filters;
  j["specs"] = json::array();
  for (const auto& s : cfg.specs) {
    json sj = to_json(s.spec);
    sj["name"] = s.name;
    j["specs"].push_back(sj);
  }
  j["fit"] = to_json(cfg.fit);
  j["aggregate"] = cfg.aggregate;
  return j;
}

std::vector<double> synthetic_signal(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = uniform01(rng);
  return v;
}

Graph load_graph(const GraphSource& src) {
  if (src.grid) return grid_graph(src.grid->first, src.grid->second);
  if (src.path) return read_edge_list_file(*src.path);
  throw InputError("no graph source given");
}

std::vector<NamedSignal> load_signals(const SignalSource& src, std::size_t n) {
  std::vector<NamedSignal> out;
  if (src.synthetic_seed) {
    for (std::size_t k = 0; k < src.synthetic_count; ++k) {
      const std::uint64_t seed = *src.synthetic_seed + k;
      out.push_back({"synthetic:" + std::to_string(seed), synthetic_signal(seed, n)});
    }
  }
  for (const auto& p : src.csv_paths) {
    auto values = read_signal_csv_file(p);
    if (values.size() != n) {
      throw InputError("signal " + p + " has " + std::to_string(values.size()) +
                       " values, graph has " + std::to_string(n) + " nodes");
    }
    out.push_back({p, std::move(values)});
  }
  return out;
}

bool ExperimentReport::any_failed() const {
  return std::any_of(cells.begin(), cells.end(), [](const auto& c) { return !c.report; });
}

namespace {

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
}

struct Job {
  std::size_t signal;  // index, or all signals in aggregate mode
  std::size_t filter;
  NamedSpec spec;
  FitConfig fit;
};

// Cells over a prepared graph and targets.
std::vector<CellResult> run_jobs(const ExperimentConfig& cfg, const std::vector<Job>& jobs) {
  const Graph g = load_graph(cfg.graph);
  const std::size_t n = g.num_nodes();
  if (n > kDenseOracleWarnNodes) {
    std::cerr << "warning: " << n << " nodes; the dense eigendecomposition used for "
              << "targets scales as O(n^3)\n";
  }
  const SparseSymMatrix lap = laplacian(g, cfg.laplacian);
  const auto signals = load_signals(cfg.signals, n);
  const EigenDecomposition ed = eigendecompose(lap.to_dense());

  // targets[f][s]
  std::vector<std::vector<DenseMatrix>> targets(cfg.filters.size());
  for (std::size_t f = 0; f < cfg.filters.size(); ++f) {
    const ScalarFilter filt = reference_filter(cfg.filters[f]);
    for (const auto& s : signals) {
      targets[f].push_back(exact_filter(ed, filt.gain, DenseMatrix::column(s.values)));
    }
  }

  std::vector<CellResult> cells(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    CellResult& cell = cells[i];
    cell.filter = cfg.filters[job.filter];
    cell.spec_name = job.spec.name;
    cell.spec = job.spec.spec;
    cell.config = job.fit;
    Dataset data;
    if (cfg.aggregate) {
      cell.signal = "all";
      for (std::size_t s = 0; s < signals.size(); ++s)
        data.emplace_back(DenseMatrix::column(signals[s].values), targets[job.filter][s]);
    } else {
      cell.signal = signals[job.signal].name;
      data.emplace_back(DenseMatrix::column(signals[job.signal].values),
                        targets[job.filter][job.signal]);
    }
    try {
      cell.report = fit(job.spec.spec, job.fit, lap, data);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });
  return cells;
}

std::size_t signal_count(const ExperimentConfig& cfg) {
  if (cfg.aggregate) return 1;
  return cfg.signals.synthetic_seed ? cfg.signals.synthetic_count : cfg.signals.csv_paths.size();
}

}  // namespace

std::vector<AggregateRow> aggregate_cells(const std::vector<CellResult>& cells) {
  std::vector<AggregateRow> rows;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const auto& c : cells) {
    const auto key = std::make_pair(c.filter, c.spec_name);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rows.size()).first;
      rows.push_back({c.filter, c.spec_name});
    }
    AggregateRow& row = rows[it->second];
    if (!c.report) {
      ++row.failed;
      continue;
    }
    row.mean_squared_error += c.report->final_loss;
    row.mean_r2 += c.report->r2;
    ++row.cells;
  }
  for (auto& row : rows) {
    if (row.cells == 0) {
      row.mean_squared_error = std::nan("");
      row.mean_r2 = std::nan("");
      continue;
    }
    row.mean_squared_error /= static_cast<double>(row.cells);
    row.mean_r2 /= static_cast<double>(row.cells);
  }
  return rows;
}

std::vector<ComparisonRow> compare_modes(const ExperimentConfig& cfg,
                                         const std::vector<AggregateRow>& rows) {
  std::vector<ComparisonRow> out;
  auto find_row = [&](const std::string& filter, const std::string& spec) -> const AggregateRow* {
    for (const auto& r : rows)
      if (r.filter == filter && r.spec_name == spec) return &r;
    return nullptr;
  };
  for (const auto& filter : cfg.filters) {
    for (const auto& plain : cfg.specs) {
      if (plain.spec.mode != Mode::kPlain) continue;
      for (const auto& hyp : cfg.specs) {
        if (hyp.spec.mode != Mode::kHyperbolic || !(hyp.spec.basis == plain.spec.basis) ||
            hyp.spec.order != plain.spec.order) {
          continue;
        }
        const AggregateRow* pr = find_row(filter, plain.name);
        const AggregateRow* hr = find_row(filter, hyp.name);
        if (pr == nullptr || hr == nullptr) continue;
        ComparisonRow row{filter, plain.name, hyp.name, pr->mean_squared_error,
                          hr->mean_squared_error, 0.0};
        row.improvement_pct = row.plain_loss > 0.0
                                  ? (row.plain_loss - row.hyperbolic_loss) / row.plain_loss * 100.0
                                  : 0.0;
        out.push_back(row);
      }
    }
  }
  return out;
}

std::string format_comparison(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "filter" << std::setw(28) << "plain" << std::right
     << std::setw(14) << "plain SE" << "  " << std::left << std::setw(34) << "hyperbolic"
     << std::right << std::setw(14) << "hyperbolic SE" << std::setw(12) << "hyp/plain" << '\n';
  for (const auto& r : rows) {
    os << std::left << std::setw(16) << r.filter << std::setw(28) << r.plain_spec << std::right
       << std::setw(14) << std::setprecision(6) << r.plain_loss << "  " << std::left
       << std::setw(34) << r.hyperbolic_spec << std::right << std::setw(14)
       << r.hyperbolic_loss << std::setw(12) << std::setprecision(4)
       << (r.plain_loss > 0.0 ? r.hyperbolic_loss / r.plain_loss : std::nan("")) << '\n';
  }
  return os.str();
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < signal_count(cfg); ++s)
    for (std::size_t f = 0; f < cfg.filters.size(); ++f)
      for (const auto& spec : cfg.specs) jobs.push_back({s, f, spec, cfg.fit});
  ExperimentReport report;
  report.config = cfg;
  report.cells = run_jobs(cfg, jobs);
  report.aggregates = aggregate_cells(report.cells);
  report.comparison = compare_modes(cfg, report.aggregates);
  return report;
}

namespace {

json cell_json(const CellResult& c) {
  json j;
  if (c.report) {
    j = to_json(c.spec, c.config, *c.report);
    j["status"] = "ok";
  } else {
    j = {{"spec", to_json(c.spec)}, {"config", to_json(c.config)}, {"status", "failed"},
         {"error", c.error}};
  }
  j["signal"] = c.signal;
  j["filter"] = c.filter;
  j["spec_name"] = c.spec_name;
  return j;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json environment_json(const ExperimentConfig& cfg, bool timestamp) {
  json env{{"seed", cfg.fit.seed},
           {"version", kVersion},
           {"kernels", kernels::isa_name(kernels::active().isa)}};
  if (timestamp) env["generated_at"] = utc_now();
  return env;
}

}  // namespace

json to_json(const ExperimentReport& report, bool timestamp) {
  json cells = json::array();
  for (const auto& c : report.cells) cells.push_back(cell_json(c));
  json aggregates = json::array();
  for (const auto& a : report.aggregates) {
    aggregates.push_back({{"filter", a.filter},
                          {"spec_name", a.spec_name},
                          {"mean_squared_error", number_or_null(a.mean_squared_error)},
                          {"mean_r2", number_or_null(a.mean_r2)},
                          {"cells", a.cells},
                          {"failed", a.failed}});
  }
  json comparison = json::array();
  for (const auto& r : report.comparison) {
    comparison.push_back({{"filter", r.filter},
                          {"plain_spec", r.plain_spec},
                          {"hyperbolic_spec", r.hyperbolic_spec},
                          {"plain_squared_error", number_or_null(r.plain_loss)},
                          {"hyperbolic_squared_error", number_or_null(r.hyperbolic_loss)},
                          {"improvement_pct", number_or_null(r.improvement_pct)}});
  }
  return {{"schema_version", 1},
          {"environment", environment_json(report.config, timestamp)},
          {"experiment", to_json(report.config)},
          {"cells", cells},
          {"aggregates", aggregates},
          {"comparison", comparison},
          {"failed", report.any_failed()}};
}

SweepReport run_sweep(const ExperimentConfig& cfg, const SweepGrid& grid) {
  cfg.validate();
  const std::vector<double> lrs =
      grid.learning_rates.empty() ? std::vector<double>{cfg.fit.learning_rate} : grid.learning_rates;
  std::vector<Job> jobs;
  ExperimentConfig swept = cfg;
  swept.specs.clear();
  for (const auto& base : cfg.specs) {
    const std::vector<std::size_t> orders =
        grid.orders.empty() ? std::vector<std::size_t>{base.spec.order} : grid.orders;
    std::vector<double> taus{base.spec.tau};
    if (base.spec.mode == Mode::kHyperbolic && !grid.taus.empty()) taus = grid.taus;
    for (std::size_t order : orders) {
      for (double tau : taus) {
        NamedSpec ns = base;
        ns.spec.order = order;
        ns.spec.tau = tau;
        ns.spec.validate();
        std::ostringstream name;
        name << base.name << "[K=" << order;
        if (ns.spec.mode == Mode::kHyperbolic) name << ",tau=" << tau;
        name << "]";
        ns.name = name.str();
        swept.specs.push_back(ns);
      }
    }
  }
  for (std::size_t s = 0; s < signal_count(cfg); ++s) {
    for (std::size_t f = 0; f < cfg.filters.size(); ++f) {
      for (const auto& spec : swept.specs) {
        for (double lr : lrs) {
          FitConfig fc = cfg.fit;
          fc.learning_rate = lr;
          fc.validate();
          jobs.push_back({s, f, spec, fc});
        }
      }
    }
  }
  SweepReport out;
  out.runs.config = swept;
  out.runs.cells = run_jobs(swept, jobs);
  out.runs.aggregates = aggregate_cells(out.runs.cells);
  out.runs.comparison = compare_modes(swept, out.runs.aggregates);

  std::map<std::pair<std::string, std::string>, std::size_t> best;
  std::vector<std::pair<std::string, std::string>> order;
  for (std::size_t i = 0; i < out.runs.cells.size(); ++i) {
    const auto& c = out.runs.cells[i];
    if (!c.report) continue;
    const auto key = std::make_pair(c.signal, c.filter);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(key, i);
      order.push_back(key);
    } else if (c.report->final_loss < out.runs.cells[it->second].report->final_loss) {
      it->second = i;
    }
  }
  for (const auto& key : order) out.best.push_back(out.runs.cells[best[key]]);
  return out;
}

json to_json(const SweepReport& report, bool timestamp) {
  json best = json::array();
  for (const auto& c : report.best) best.push_back(cell_json(c));
  json runs = json::array();
  for (const auto& c : report.runs.cells) {
    json r{{"signal", c.signal}, {"filter", c.filter}, {"spec_name", c.spec_name},
           {"lr", c.config.learning_rate}};
    if (c.report) {
      r["final_loss"] = c.report->final_loss;
      r["r2"] = c.report->r2;
    } else {
      r["error"] = c.error;
    }
    runs.push_back(r);
  }
  return {{"schema_version", 1},
          {"environment", environment_json(report.runs.config, timestamp)},
          {"best", best},
          {"runs", runs},
          {"failed", report.runs.any_failed()}};
}

}  // namespace hpde
