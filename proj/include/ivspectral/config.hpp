#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ivspectral/diagnostics.hpp"
#include "ivspectral/montecarlo.hpp"

namespace ivspectral {

/// Where the diagnose command gets its first-stage coefficients: a value
/// file, inline values, or a scheme materialized against the loaded data.
struct PiSource {
  std::string source;  // path | values | scheme
  std::string path;
  std::vector<double> values;
  PiScheme scheme;
};

struct DiagnoseParams {
  double c = 1.0;
  std::optional<std::vector<int>> k_grid;  // default: K/8, K/4, K/2, K
  std::optional<PiSource> pi;
  std::optional<std::vector<double>> weights;
};

/// Fully validated run description: the parsed config document plus the
/// patharguments supplied on the command line.
struct RunConfig {
  std::string command;  // simulate | estimate | diagnose
  std::optional<ScenarioConfig> scenario;       // simulate
  std::vector<EstimatorSpec> estimators;        // estimate
  DiagnoseParams diagnose;                      // diagnose
  std::string input_path;
  std::string output_path;
  std::string output_format = "json";  // json | csv
};

/// Parses and validates a configuration document for the given command.
/// Unknown keys are rejected; invariant violations name the field.
RunConfig parse_config(const std::string& text, const std::string& command);

/// Canonical serialization of the resolved document (sorted keys, defaults
/// filled); re-parsing it yields an identical RunConfig.
nlohmann::json config_to_json(const RunConfig& config);
std::string canonical_config(const RunConfig& config);

// JSON conversions shared by the config parser and the report writer.
nlohmann::json pi_scheme_to_json(const PiScheme& s);
PiScheme pi_scheme_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json design_to_json(const InstrumentDesign& d);
InstrumentDesign design_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json dgp_to_json(const DgpConfig& c);
DgpConfig dgp_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json scheme_to_json(const RegularizationScheme& s);
RegularizationScheme scheme_from_json(const nlohmann::json& j,
                                      const std::string& path);
nlohmann::json estimator_spec_to_json(const EstimatorSpec& s);
EstimatorSpec estimator_spec_from_json(const nlohmann::json& j,
                                       const std::string& path);
nlohmann::json scenario_to_json(const ScenarioConfig& s);
ScenarioConfig scenario_from_json(const nlohmann::json& j,
                                  const std::string& path);

}  // namespace ivspectral
