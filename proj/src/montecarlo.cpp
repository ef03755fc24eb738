#include "ivspectral/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "ivspectral/errors.hpp"
#include "ivspectral/rng.hpp"

namespace ivspectral {

void EstimatorSpec::validate() const {
  if (label.empty()) throw config_error("estimator.label must be non-empty");
  if (method == "ols" || method == "tsls") {
    if (scheme || select)
      throw config_error("estimator '" + label + "': method " + method +
                         " takes no regularization scheme");
  } else if (method == "tsls_regularized") {
    if (static_cast<bool>(scheme) == static_cast<bool>(select))
      throw config_error("estimator '" + label +
                         "': tsls_regularized requires exactly one of "
                         "'scheme' or 'select'");
    if (scheme) scheme->validate();
    if (select && select->grid.empty())
      throw config_error("estimator '" + label + "': select.grid must be non-empty");
  } else {
    throw config_error("estimator '" + label + "': unknown method '" + method +
                       "' (expected ols, tsls or tsls_regularized)");
  }
}

void ScenarioConfig::validate() const {
  if (replications < 1)
    throw config_error("scenario.replications must be >= 1");
  if (estimators.empty())
    throw config_error("scenario.estimators must be non-empty");
  std::set<std::string> labels;
  for (const auto& spec : estimators) {
    spec.validate();
    if (!labels.insert(spec.label).second)
      throw config_error("scenario.estimators labels must be unique; '" +
                         spec.label + "' repeats");
  }
  if (n_grid) {
    if (n_grid->empty()) throw config_error("scenario.n_grid must be non-empty");
    for (int n : *n_grid)
      if (n < 1) throw config_error("scenario.n_grid entries must be >= 1");
  }
  dgp.validate();
}

EstimatorResult run_estimator(const Dataset& data, const EstimatorSpec& spec) {
  spec.validate();
  if (spec.method == "ols") return ols(data);
  if (spec.method == "tsls") return tsls(data);
  RegularizationScheme scheme =
      spec.scheme ? *spec.scheme
                  : select_alpha(data, spec.select->kind, spec.select->grid);
  EstimatorResult res = tsls_regularized(data, scheme);
  res.scheme = scheme;
  return res;
}

namespace {

double quantile(std::vector<double> sorted, double p) {
  // Linear interpolation between order statistics (type 7).
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = (static_cast<double>(n) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

CellStats summarize(const Eigen::MatrixXd& delta_table,
                    const Eigen::VectorXd& delta_true, int failure_count) {
  if (delta_table.rows() == 0)
    throw config_error("summarize: estimate table must be non-empty");
  if (delta_table.cols() != delta_true.size())
    throw config_error("summarize: table width must match delta_true length");

  const int r = static_cast<int>(delta_table.rows());
  const int g = static_cast<int>(delta_table.cols());
  CellStats s;
  s.failure_count = failure_count;
  s.n_success = r;
  s.mean_bias.resize(g);
  s.median_bias.resize(g);
  s.mad.resize(g);
  s.mse.resize(g);
  s.decile_range.resize(g);

  for (int j = 0; j < g; ++j) {
    std::vector<double> bias(r), abias(r);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < r; ++i) {
      const double b = delta_table(i, j) - delta_true[j];
      bias[i] = b;
      abias[i] = std::abs(b);
      sum += b;
      sumsq += b * b;
    }
    s.mean_bias[j] = sum / r;
    s.mse[j] = sumsq / r;
    s.median_bias[j] = median_of(bias);
    s.mad[j] = median_of(abias);
    std::sort(bias.begin(), bias.end());
    s.decile_range[j] = quantile(bias, 0.9) - quantile(bias, 0.1);
  }
  return s;
}

const CellStats& ReplicationStats::cell(const std::string& label, int n) const {
  for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
    if (n_values[ni] != n) continue;
    for (std::size_t ei = 0; ei < estimator_labels.size(); ++ei)
      if (estimator_labels[ei] == label) return cells[ni][ei];
  }
  throw config_error("no cell for estimator '" + label + "' at n = " +
                     std::to_string(n));
}

ReplicationStats run_scenario(const ScenarioConfig& config, int threads) {
  config.validate();
  if (threads < 1) throw config_error("threads must be >= 1");

  const std::vector<int> n_values =
      config.n_grid ? *config.n_grid : std::vector<int>{config.dgp.n};
  const int n_est = static_cast<int>(config.estimators.size());
  const int reps = config.replications;

  ReplicationStats out;
  out.n_values = n_values;
  for (const auto& spec : config.estimators)
    out.estimator_labels.push_back(spec.label);

  for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
    DgpConfig dgp = config.dgp;
    dgp.n = n_values[ni];
    dgp.validate();

    // estimates[e][r]: empty vector marks a failed replication.
    std::vector<std::vector<Eigen::VectorXd>> estimates(
        n_est, std::vector<Eigen::VectorXd>(reps));

    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= reps) return;
        const std::uint64_t seed = derive_seed(config.master_seed, ni, r);
        Dataset data = simulate_dataset(dgp, seed);
        for (int e = 0; e < n_est; ++e) {
          try {
            estimates[e][r] = run_estimator(data, config.estimators[e]).delta_hat;
          } catch (const numeric_error&) {
            // failure counted below; the paired replication continues
          }
        }
      }
    };

    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    Eigen::VectorXd delta_true = Eigen::Map<const Eigen::VectorXd>(
        dgp.delta_true.data(), dgp.g);
    std::vector<CellStats> row;
    for (int e = 0; e < n_est; ++e) {
      int failures = 0;
      std::vector<int> ok;
      for (int r = 0; r < reps; ++r) {
        if (estimates[e][r].size() == 0)
          ++failures;
        else
          ok.push_back(r);
      }
      if (ok.empty()) {
        CellStats s;
        s.failure_count = failures;
        s.n_success = 0;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        s.mean_bias = Eigen::VectorXd::Constant(dgp.g, nan);
        s.median_bias = s.mean_bias;
        s.mad = s.mean_bias;
        s.mse = s.mean_bias;
        s.decile_range = s.mean_bias;
        row.push_back(std::move(s));
        continue;
      }
      Eigen::MatrixXd table(ok.size(), dgp.g);
      for (std::size_t i = 0; i < ok.size(); ++i)
        table.row(i) = estimates[e][ok[i]].transpose();
      row.push_back(summarize(table, delta_true, failures));
    }
    out.cells.push_back(std::move(row));
  }
  return out;
}

}  // namespace ivspectral
