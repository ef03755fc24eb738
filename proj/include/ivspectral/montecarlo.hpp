#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ivspectral/dgp.hpp"
#include "ivspectral/estimators.hpp"

namespace ivspectral {

/// One estimator from the scenario grid: a method plus either a fixed
/// regularization scheme or a data-driven selection request.
struct EstimatorSpec {
  std::string label;
  std::string method;  // ols | tsls | tsls_regularized
  std::optional<RegularizationScheme> scheme;
  std::optional<AlphaSelection> select;

  void validate() const;
};

struct ScenarioConfig {
  DgpConfig dgp;
  std::vector<EstimatorSpec> estimators;
  int replications = 1;
  std::uint64_t master_seed = 0;
  std::optional<std::vector<int>> n_grid;  // overrides dgp.n per cell

  void validate() const;
};

/// Summary statistics for one (estimator, n) cell; all vectors are length G.
struct CellStats {
  Eigen::VectorXd mean_bias;
  Eigen::VectorXd median_bias;
  Eigen::VectorXd mad;           // median absolute deviation around delta_true
  Eigen::VectorXd mse;
  Eigen::VectorXd decile_range;  // 90th minus 10th percentile of the bias
  int failure_count = 0;
  int n_success = 0;
};

struct ReplicationStats {
  std::vector<std::string> estimator_labels;
  std::vector<int> n_values;
  // cells[n_index][estimator_index]
  std::vector<std::vector<CellStats>> cells;

  const CellStats& cell(const std::string& label, int n) const;
};

/// Resolves an estimator spec against one dataset.
EstimatorResult run_estimator(const Dataset& data, const EstimatorSpec& spec);

/// Summarizes a table of estimates (rows = successful replications, columns =
/// coordinates of delta_hat) against the truth. Throws config_error on an
/// empty table.
CellStats summarize(const Eigen::MatrixXd& delta_table,
                    const Eigen::VectorXd& delta_true, int failure_count = 0);

/// Runs the full scenario. Replication r of cell n draws its seed from
/// (master_seed, n_index, r), every estimator sees the same dataset within a
/// replication, and results are aggregated in replication order, so the
/// statistics are bit-identical for any worker count.
ReplicationStats run_scenario(const ScenarioConfig& config, int threads = 1);

}  // namespace ivspectral
