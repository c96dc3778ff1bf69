#include "hpde/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hpde/error.hpp"

namespace hpde {

using nlohmann::json;

std::vector<double> read_signal_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("signal csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "value") {
    throw InputError("signal csv: header must be \"value\", got \"" + line + "\"");
  }
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream row(line);
    double v = 0.0;
    std::string rest;
    if (!(row >> v) || (row >> rest)) {
      throw InputError("signal csv: bad value on line " + std::to_string(lineno) +
                       ": \"" + line + "\"");
    }
    values.push_back(v);
  }
  return values;
}

std::vector<double> read_signal_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open signal " + path);
  return read_signal_csv(in);
}

void write_signal_csv(std::ostream& out, std::span<const double> values) {
  out << "value\n" << std::setprecision(17);
  for (double v : values) out << v << '\n';
}

void write_signal_csv_file(const std::string& path, std::span<const double> values) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write signal " + path);
  write_signal_csv(out, values);
}

json to_json(const BasisKind& kind) {
  json j{{"name", basis_name(kind.basis)}, {"shift", shift_name(kind.shift)}};
  if (kind.basis == Basis::kJacobi) {
    j["a"] = kind.jacobi_a;
    j["b"] = kind.jacobi_b;
  }
  return j;
}

json to_json(const ModelSpec& spec) {
  json j{{"mode", mode_name(spec.mode)},
         {"basis", to_json(spec.basis)},
         {"order", spec.order}};
  if (spec.mode == Mode::kHyperbolic) {
    j["tau"] = spec.tau;
    j["steps"] = spec.steps;
    j["sharing"] = sharing_name(spec.sharing);
    j["learn_gains"] = spec.learn_gains;
  }
  return j;
}

json to_json(const FitConfig& cfg) {
  return {{"lr", cfg.learning_rate},
          {"max_iterations", cfg.max_iterations},
          {"patience", cfg.patience},
          {"seed", cfg.seed},
          {"init_scale", cfg.init_scale}};
}

json to_json(const IntegratorConfig& cfg) {
  return {{"tau", cfg.tau},
          {"steps", cfg.steps},
          {"sharing", sharing_name(cfg.sharing)},
          {"basis", to_json(cfg.basis)},
          {"order", cfg.order}};
}

namespace {

// JSON has no infinity; failed residuals are reported as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

BasisKind basis_from_json(const json& j) {
  BasisKind kind;
  if (j.is_string()) {
    kind.basis = parse_basis(j.get<std::string>());
    kind.shift = canonical_shift(kind.basis);
    return kind;
  }
  kind.basis = parse_basis(j.at("name").get<std::string>());
  kind.shift = j.contains("shift") ? parse_shift(j["shift"].get<std::string>())
                                   : canonical_shift(kind.basis);
  kind.jacobi_a = j.value("a", kind.jacobi_a);
  kind.jacobi_b = j.value("b", kind.jacobi_b);
  return kind;
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

json to_json(const VerificationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"check_name", c.name},
                      {"residual", finite_or_null(c.residual)},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed}});
  }
  return {{"schema_version", 1},
          {"n", report.n},
          {"a", report.a},
          {"t", report.t},
          {"phi0_determinant", report.phi0_determinant},
          {"checks", checks},
          {"passed", report.all_passed()}};
}

std::vector<double> downsample(std::span<const double> trace, std::size_t max_points) {
  if (trace.size() <= max_points || max_points < 2) return {trace.begin(), trace.end()};
  const std::size_t stride = (trace.size() + max_points - 2) / (max_points - 1);
  std::vector<double> out;
  for (std::size_t i = 0; i < trace.size(); i += stride) out.push_back(trace[i]);
  if ((trace.size() - 1) % stride != 0) out.push_back(trace.back());
  return out;
}

json to_json(const ModelSpec& spec, const FitConfig& cfg, const FitReport& r) {
  json theta = json::array();
  for (std::size_t i = 0; i < r.params.theta.rows(); ++i) {
    const auto row = r.params.theta.row(i);
    theta.push_back(std::vector<double>(row.begin(), row.end()));
  }
  json j{{"spec", to_json(spec)},
         {"config", to_json(cfg)},
         {"final_loss", r.final_loss},
         {"r2", r.r2},
         {"iterations", r.iterations},
         {"theta", theta},
         {"loss_trace_downsampled", downsample(r.loss_trace)}};
  if (spec.learn_gains) j["gains"] = {r.params.gain0, r.params.gain1};
  return j;
}

ModelSpec model_spec_from_json(const json& j) {
  return guarded("model spec", [&] {
    ModelSpec s;
    if (j.contains("mode")) s.mode = parse_mode(j["mode"].get<std::string>());
    if (j.contains("basis")) s.basis = basis_from_json(j["basis"]);
    s.order = j.value("order", s.order);
    s.tau = j.value("tau", s.tau);
    s.steps = j.value("steps", s.steps);
    if (j.contains("sharing")) s.sharing = parse_sharing(j["sharing"].get<std::string>());
    s.learn_gains = j.value("learn_gains", s.learn_gains);
    s.validate();
    return s;
  });
}

FitConfig fit_config_from_json(const json& j) {
  return guarded("fit config", [&] {
    FitConfig c;
    c.learning_rate = j.value("lr", c.learning_rate);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.patience = j.value("patience", c.patience);
    c.seed = j.value("seed", c.seed);
    c.init_scale = j.value("init_scale", c.init_scale);
    c.validate();
    return c;
  });
}

IntegratorConfig integrator_config_from_json(const json& j) {
  return guarded("integrator config", [&] {
    IntegratorConfig c;
    c.tau = j.value("tau", c.tau);
    c.steps = j.value("steps", c.steps);
    if (j.contains("sharing")) c.sharing = parse_sharing(j["sharing"].get<std::string>());
    if (j.contains("basis")) c.basis = basis_from_json(j["basis"]);
    c.order = j.value("order", c.order);
    c.validate();
    return c;
  });
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("invalid JSON in " + path + ": " + e.what());
  }
}

}  // namespace hpde
