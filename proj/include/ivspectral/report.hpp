#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "ivspectral/config.hpp"
#include "ivspectral/diagnostics.hpp"
#include "ivspectral/montecarlo.hpp"

namespace ivspectral {

/// Diagnose-command output bundle.
struct DiagnosticsReport {
  EffectiveCountReport effective_count;
  CauchyGapReport cauchy_gap;
  SpectrumReport spectrum;
  std::map<std::string, double> assumption3;
};

nlohmann::json estimator_result_to_json(const std::string& label,
                                        const EstimatorResult& result);
nlohmann::json replication_stats_to_json(const ReplicationStats& stats);
nlohmann::json diagnostics_to_json(const DiagnosticsReport& report);

/// One top-level report object: {config, results, diagnostics, version, seed}.
nlohmann::json build_report(const RunConfig& config, nlohmann::json results,
                            nlohmann::json diagnostics, std::uint64_t seed);

std::string render_report_json(const nlohmann::json& report);
std::string render_report_csv(const nlohmann::json& report);

}  // namespace ivspectral
