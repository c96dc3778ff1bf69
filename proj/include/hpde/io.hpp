#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpde/fit.hpp"
#include "hpde/verifier.hpp"

namespace hpde {

// Single-column CSV with header "value".
std::vector<double> read_signal_csv(std::istream& in);
std::vector<double> read_signal_csv_file(const std::string& path);
void write_signal_csv(std::ostream& out, std::span<const double> values);
void write_signal_csv_file(const std::string& path, std::span<const double> values);

nlohmann::json to_json(const BasisKind& kind);
nlohmann::json to_json(const ModelSpec& spec);
nlohmann::json to_json(const FitConfig& cfg);
nlohmann::json to_json(const IntegratorConfig& cfg);
nlohmann::json to_json(const VerificationReport& report);
// {spec, config, final_loss, r2, iterations, theta, loss_trace_downsampled}
nlohmann::json to_json(const ModelSpec& spec, const FitConfig& cfg, const FitReport& r);

// Missing keys keep their defaults; unknown enum names throw InputError.
ModelSpec model_spec_from_json(const nlohmann::json& j);
FitConfig fit_config_from_json(const nlohmann::json& j);
// {tau, steps, sharing, basis, order}
IntegratorConfig integrator_config_from_json(const nlohmann::json& j);

// Every `stride`-th entry plus the last one, at most `max_points` entries.
std::vector<double> downsample(std::span<const double> trace, std::size_t max_points = 100);

std::string dump_json(const nlohmann::json& j);
void write_text_file(const std::string& path, const std::string& text);
nlohmann::json read_json_file(const std::string& path);

}  // namespace hpde
