#include "ivspectral/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "ivspectral/errors.hpp"

namespace ivspectral {

namespace {

// Verdict cut points; chosen to separate linear growth from geometric decay
// by more than 10x at K = 100.
constexpr double kEpsilonDiv = 1e-2;
constexpr double kEpsilonCauchy = 1e-3;

}  // namespace

EffectiveCountReport effective_count(const Eigen::VectorXd& pi, int n, double c) {
  if (n < 1) throw config_error("effective_count: n must be >= 1");
  if (!(c > 0.0)) throw config_error("effective_count: c must be positive");
  EffectiveCountReport rep;
  rep.threshold = c / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < pi.size(); ++j) {
    if (pi[j] == 0.0) {
      ++rep.count_irrelevant;
    } else if (std::abs(pi[j]) > rep.threshold) {
      ++rep.count_effective;
      rep.indices_effective.push_back(j);
    }
  }
  return rep;
}

CauchyGapReport q_sequence(const Eigen::MatrixXd& z, const Eigen::MatrixXd& pi,
                           const std::vector<int>& k_grid) {
  const int k_max = static_cast<int>(z.cols());
  const double n = static_cast<double>(z.rows());
  if (pi.rows() != k_max)
    throw config_error("q_sequence: pi must have one row per instrument column");
  if (k_grid.empty()) throw config_error("q_sequence: k_grid must be non-empty");
  for (std::size_t j = 0; j < k_grid.size(); ++j) {
    if (k_grid[j] < 1 || k_grid[j] > k_max)
      throw config_error("q_sequence: k_grid entry " + std::to_string(k_grid[j]) +
                         " out of range [1, " + std::to_string(k_max) + "]");
    if (j > 0 && !(k_grid[j] > k_grid[j - 1]))
      throw config_error("q_sequence: k_grid must be strictly ascending");
  }

  CauchyGapReport rep;
  rep.k_grid = k_grid;
  for (int k : k_grid) {
    const auto zk = z.leftCols(k);
    const auto pk = pi.topRows(k);
    Eigen::MatrixXd qk = pk.transpose() * (zk.transpose() * zk) * pk / n;
    rep.q_values.push_back(std::move(qk));
  }
  for (std::size_t j = 1; j < rep.q_values.size(); ++j)
    rep.gaps.push_back((rep.q_values[j] - rep.q_values[j - 1]).norm());

  if (rep.gaps.empty()) {
    rep.verdict = "inconclusive";
    return rep;
  }
  const int m = static_cast<int>(rep.gaps.size());
  const int third = std::max(1, m / 3);
  double first = 0.0, last = 0.0;
  for (int j = 0; j < third; ++j) first += rep.gaps[j];
  for (int j = m - third; j < m; ++j) last += rep.gaps[j];
  first /= third;
  last /= third;

  bool non_increasing = true;
  for (std::size_t j = 1; j < rep.gaps.size(); ++j)
    if (rep.gaps[j] > rep.gaps[j - 1]) non_increasing = false;

  if (last >= first && last >= kEpsilonDiv)
    rep.verdict = "diverging";
  else if (non_increasing && rep.gaps.back() < kEpsilonCauchy)
    rep.verdict = "cauchy_like";
  else
    rep.verdict = "inconclusive";
  return rep;
}

CauchyGapReport q_sequence(const Eigen::MatrixXd& z, const Eigen::VectorXd& pi,
                           const std::vector<int>& k_grid) {
  return q_sequence(z, Eigen::MatrixXd(pi), k_grid);
}

SpectrumReport covariance_spectrum(
    const Eigen::MatrixXd& z, const std::optional<std::vector<double>>& weights) {
  if (!z.allFinite())
    throw data_error("covariance_spectrum: input contains non-finite entries");
  const int k = static_cast<int>(z.cols());
  const double n = static_cast<double>(z.rows());

  Eigen::MatrixXd cov = z.transpose() * z / n;
  if (weights) {
    if (static_cast<int>(weights->size()) != k)
      throw config_error("covariance_spectrum: weights must have length k = " +
                         std::to_string(k));
    double sum = 0.0;
    for (double w : *weights) {
      if (w < 0.0)
        throw config_error("covariance_spectrum: weights must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-8)
      throw config_error("covariance_spectrum: weights must sum to 1");
    Eigen::VectorXd d(k);
    for (int j = 0; j < k; ++j) d[j] = std::sqrt((*weights)[j]);
    cov = d.asDiagonal() * cov * d.asDiagonal();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw numeric_error("covariance_spectrum: eigendecomposition failed");

  SpectrumReport rep;
  rep.eigenvalues = es.eigenvalues().reverse();
  for (int j = 0; j < k; ++j)
    if (rep.eigenvalues[j] < 0.0) rep.eigenvalues[j] = 0.0;

  const double total = rep.eigenvalues.sum();
  rep.nuclear_estimate = total;
  for (int m : {1, 5, 10}) {
    double tail = 0.0;
    for (int j = m; j < k; ++j) tail += rep.eigenvalues[j];
    rep.tail_mass[m] = total > 0.0 ? tail / total : 0.0;
  }
  const double lmax = rep.eigenvalues[0];
  rep.flatness = lmax > 0.0 ? rep.eigenvalues[k - 1] / lmax : 0.0;

  // Geometric decay ratio: least-squares slope of log(lambda_j) on j over the
  // numerically nonzero part of the spectrum.
  std::vector<double> logs;
  for (int j = 0; j < k; ++j) {
    if (rep.eigenvalues[j] > 1e-12 * lmax && rep.eigenvalues[j] > 0.0)
      logs.push_back(std::log(rep.eigenvalues[j]));
    else
      break;
  }
  if (logs.size() >= 2) {
    const double m = static_cast<double>(logs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t j = 0; j < logs.size(); ++j) {
      sx += j;
      sy += logs[j];
      sxx += static_cast<double>(j) * j;
      sxy += j * logs[j];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.decay_fit = std::exp(slope);
  } else {
    rep.decay_fit = 0.0;
  }
  return rep;
}

std::map<std::string, double> assumption3_checks(const Dataset& data,
                                                 const Eigen::MatrixXd& pi) {
  data.validate();
  if (pi.rows() != data.k())
    throw config_error("assumption3_checks: pi must have length K = " +
                       std::to_string(data.k()));
  const double n = static_cast<double>(data.n());

  std::map<std::string, double> out;
  out["kappa_hat"] = static_cast<double>(data.k()) / n;

  Eigen::MatrixXd zpi = data.z * pi;  // n x G rows are pi'Z_i
  out["max_leverage"] = zpi.rowwise().norm().maxCoeff() / std::sqrt(n);

  Eigen::MatrixXd qmat = zpi.transpose() * zpi / n;  // pi'(Z'Z/N)pi
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qmat);
  out["q_hat"] = std::max(0.0, es.eigenvalues().minCoeff());
  return out;
}

}  // namespace ivspectral
