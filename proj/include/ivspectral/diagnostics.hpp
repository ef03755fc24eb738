#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ivspectral/dgp.hpp"

namespace ivspectral {

/// Classification of first-stage coefficients against the c/sqrt(N)
/// threshold: effective iff |pi_k| > c/sqrt(N) strictly, irrelevant iff
/// pi_k = 0 exactly, the rest below-threshold.
struct EffectiveCountReport {
  double threshold = 0.0;  // c / sqrt(n)
  int count_effective = 0;
  int count_irrelevant = 0;
  std::vector<int> indices_effective;
};

/// The sequence Q_K = pi'_K (Z'_K Z_K / n) pi_K over a K grid with its
/// successive Frobenius gaps. Bounded-away-from-zero gaps signal that the
/// sequence cannot converge; shrinking gaps are Cauchy-like.
struct CauchyGapReport {
  std::vector<int> k_grid;
  std::vector<Eigen::MatrixXd> q_values;  // G x G per grid point
  std::vector<double> gaps;               // Frobenius norms of differences
  std::string verdict;                    // cauchy_like | diverging | inconclusive
};

/// Eigenvalue-decay summary of the (optionally quadrature-weighted) sample
/// covariance of the instruments; the compactness proxy.
struct SpectrumReport {
  Eigen::VectorXd eigenvalues;          // descending, of D^{1/2}(Z'Z/n)D^{1/2}
  std::map<int, double> tail_mass;      // m in {1, 5, 10}
  double flatness = 0.0;                // lambda_min / lambda_max
  double decay_fit = 0.0;               // fitted geometric ratio
  double nuclear_estimate = 0.0;        // sum of eigenvalues
};

EffectiveCountReport effective_count(const Eigen::VectorXd& pi, int n, double c);

/// pi may be a K x G matrix; the public vector form is the G = 1 case.
CauchyGapReport q_sequence(const Eigen::MatrixXd& z, const Eigen::MatrixXd& pi,
                           const std::vector<int>& k_grid);
CauchyGapReport q_sequence(const Eigen::MatrixXd& z, const Eigen::VectorXd& pi,
                           const std::vector<int>& k_grid);

SpectrumReport covariance_spectrum(
    const Eigen::MatrixXd& z,
    const std::optional<std::vector<double>>& weights = std::nullopt);

/// {kappa_hat: K/N, max_leverage: max_i ||pi'Z_i|| / sqrt(N),
///  q_hat: smallest eigenvalue of pi'(Z'Z/N)pi}.
std::map<std::string, double> assumption3_checks(const Dataset& data,
                                                 const Eigen::MatrixXd& pi);

}  // namespace ivspectral
