#pragma once

#include <nlohmann/json.hpp>

#include "ivspectral/config.hpp"
#include "ivspectral/report.hpp"

namespace ivspectral {

/// Executes a validated RunConfig and returns the report object. input_path
/// must be set for estimate/diagnose; threads only affects simulate.
nlohmann::json run_command(const RunConfig& config, int threads = 1);

/// Renders the report in the configured output format.
std::string render_report(const RunConfig& config, const nlohmann::json& report);

/// Default Cauchy-gap grid for K instruments: K/8, K/4, K/2, K (deduplicated).
std::vector<int> default_k_grid(int k);

}  // namespace ivspectral
