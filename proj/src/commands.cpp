#include "ivspectral/commands.hpp"

#include <algorithm>

#include "ivspectral/errors.hpp"
#include "ivspectral/io.hpp"

namespace ivspectral {

using nlohmann::json;

std::vector<int> default_k_grid(int k) {
  std::vector<int> grid;
  for (int d : {8, 4, 2, 1}) {
    const int v = std::max(1, k / d);
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  return grid;
}

namespace {

Eigen::VectorXd resolve_pi(const DiagnoseParams& params, const Dataset& data) {
  if (data.truth && !params.pi) {
    // DGP truth echo: re-materialize the generating scheme.
    return materialize_pi(data.truth->pi, data.truth->k, data.truth->n);
  }
  if (!params.pi)
    throw config_error(
        "diagnose needs first-stage coefficients: supply 'diagnose.pi' as "
        "{\"path\": <value file>}, {\"values\": [...]} or {\"scheme\": {...}} "
        "(a DGP truth echo is only available for simulated datasets)");
  const PiSource& src = *params.pi;
  if (src.source == "path") {
    std::vector<double> vals = read_value_file(src.path);
    if (static_cast<int>(vals.size()) != data.k())
      throw data_error("pi file '" + src.path + "' has " +
                       std::to_string(vals.size()) + " values, expected K = " +
                       std::to_string(data.k()));
    return Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size());
  }
  if (src.source == "values") {
    if (static_cast<int>(src.values.size()) != data.k())
      throw config_error("'diagnose.pi.values' has " +
                         std::to_string(src.values.size()) +
                         " entries, expected K = " + std::to_string(data.k()));
    return Eigen::Map<const Eigen::VectorXd>(src.values.data(),
                                             src.values.size());
  }
  return materialize_pi(src.scheme, data.k(), data.n());
}

json cmd_simulate(const RunConfig& config, int threads) {
  ReplicationStats stats = run_scenario(*config.scenario, threads);
  return build_report(config, replication_stats_to_json(stats), json(nullptr),
                      config.scenario->master_seed);
}

json cmd_estimate(const RunConfig& config) {
  Dataset data = read_dataset_csv(config.input_path);
  json results = json::array();
  for (const auto& spec : config.estimators)
    results.push_back(estimator_result_to_json(spec.label,
                                               run_estimator(data, spec)));
  return build_report(config, std::move(results), json(nullptr), 0);
}

json cmd_diagnose(const RunConfig& config) {
  Dataset data = read_dataset_csv(config.input_path);
  Eigen::VectorXd pi = resolve_pi(config.diagnose, data);
  if (pi.size() != data.k())
    throw config_error("pi length must equal the number of instruments");

  std::vector<int> k_grid =
      config.diagnose.k_grid ? *config.diagnose.k_grid : default_k_grid(data.k());
  if (!k_grid.empty() && k_grid.back() > data.k())
    throw config_error("'diagnose.k_grid' exceeds the number of instruments K = " +
                       std::to_string(data.k()));

  DiagnosticsReport report;
  report.effective_count = effective_count(pi, data.n(), config.diagnose.c);
  report.cauchy_gap = q_sequence(data.z, pi, k_grid);
  report.spectrum = covariance_spectrum(data.z, config.diagnose.weights);
  report.assumption3 = assumption3_checks(data, pi);
  return build_report(config, json::array(), diagnostics_to_json(report), 0);
}

}  // namespace

json run_command(const RunConfig& config, int threads) {
  if (config.command == "simulate") {
    if (!config.scenario)
      throw config_error("simulate requires a 'scenario' section");
    return cmd_simulate(config, threads);
  }
  if (config.input_path.empty())
    throw config_error(config.command + " requires an input data file (--data)");
  if (config.command == "estimate") return cmd_estimate(config);
  if (config.command == "diagnose") return cmd_diagnose(config);
  throw config_error("unknown command '" + config.command + "'");
}

std::string render_report(const RunConfig& config, const json& report) {
  if (config.output_format == "json") return render_report_json(report);
  if (config.output_format == "csv") return render_report_csv(report);
  throw config_error("output format must be json or csv; got '" +
                     config.output_format + "'");
}

}  // namespace ivspectral
