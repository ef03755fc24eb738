#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ivspectral/dgp.hpp"

namespace ivspectral {

/// Spectral decomposition of a symmetric PSD Gram matrix. Eigenvalues are
/// sorted descending and padded with exact zeros to source_dim; entries below
/// 1e-10 * lambda_max are clamped to 0 (the rank tolerance used throughout).
/// eigenvectors holds orthonormal columns for the leading eigenvalues; when
/// the Gram is built from an n x K matrix with K > n only the numerically
/// nonzero part is stored. The q/lambda = 0 convention in the filters never
/// touches the missing null-space columns.
struct EigenSystem {
  Eigen::VectorXd eigenvalues;   // length source_dim, descending, >= 0
  Eigen::MatrixXd eigenvectors;  // source_dim x m, orthonormal columns
  int source_dim = 0;

  int stored() const { return static_cast<int>(eigenvectors.cols()); }
  double lambda_max() const { return eigenvalues.size() ? eigenvalues[0] : 0.0; }
  double lambda_min() const {
    return eigenvalues.size() ? eigenvalues[eigenvalues.size() - 1] : 0.0;
  }
};

/// Spectral filter family and its parameter.
struct RegularizationScheme {
  enum class Kind { Tikhonov, SpectralCutoff, PrincipalComponents, Landweber };

  Kind kind = Kind::Tikhonov;
  double alpha = 0.0;      // tikhonov, > 0
  double threshold = 0.0;  // spectral_cutoff, > 0
  int m = 0;               // principal_components, >= 1
  int iterations = 0;      // landweber, >= 1
  double step = 0.0;       // landweber, in (0, 2/lambda_max) at application

  static RegularizationScheme tikhonov(double alpha);
  static RegularizationScheme spectral_cutoff(double threshold);
  static RegularizationScheme principal_components(int m);
  static RegularizationScheme landweber(int iterations, double step);

  void validate() const;
  std::string kind_name() const;
};

struct EstimatorResult {
  Eigen::VectorXd delta_hat;
  std::string method;
  std::optional<RegularizationScheme> scheme;
  std::optional<Eigen::MatrixXd> first_stage_fitted;  // n x g
  std::map<std::string, double> diagnostics;  // condition_number, effective_dof
};

/// Data-driven selection request: which filter family and which grid of
/// candidate parameters to score by first-stage cross-validation.
struct AlphaSelection {
  std::string kind = "tikhonov";
  std::vector<double> grid;  // strictly positive, sorted ascending
};

/// Eigendecomposition of Z'Z. Works on the K x K Gram when K <= n and on the
/// n x n outer Gram when K > n, converting between the factorizations.
EigenSystem eigensystem_of_gram(const Eigen::MatrixXd& z);

/// Per-eigenvalue damping factors q_j in [0, 1], defined relative to P_Z: the
/// filtered projection is P^q = Z U diag(q_j / lambda_j) U' Z' with
/// q_j / lambda_j := 0 when lambda_j = 0.
///   tikhonov:              q_j = lambda_j^2 / (lambda_j^2 + alpha)
///   spectral_cutoff:       q_j = 1 if lambda_j >= threshold else 0
///   principal_components:  q_j = 1 for the m largest, else 0
///   landweber:             q_j = 1 - (1 - step * lambda_j)^iterations
Eigen::VectorXd filter_factors(const EigenSystem& eigs,
                               const RegularizationScheme& scheme);

/// Applies the damped projector P^q to v (n x c) without forming the n x n
/// matrix. q must have length eigs.source_dim.
Eigen::MatrixXd apply_filtered_projection(const Eigen::MatrixXd& z,
                                          const EigenSystem& eigs,
                                          const Eigen::VectorXd& q,
                                          const Eigen::MatrixXd& v);

/// P_Z v with P_Z = Z (Z'Z)^{-1} Z'. Requires Z of full column rank within
/// the 1e-10 eigenvalue-ratio tolerance; otherwise throws numeric_error.
Eigen::MatrixXd projection_apply(const Eigen::MatrixXd& z,
                                 const Eigen::MatrixXd& v);

/// Ordinary least squares baseline: delta_hat = (X'X)^{-1} X'y.
EstimatorResult ols(const Dataset& data);

/// Classical 2SLS: delta_hat = (X'P_Z X)^{-1} X'P_Z y.
EstimatorResult tsls(const Dataset& data);

/// Spectrally regularized 2SLS: delta_hat = (X'P^q X)^{-1} X'P^q y. Handles
/// K >= n and rank-deficient Z through the q/lambda = 0 convention.
EstimatorResult tsls_regularized(const Dataset& data,
                                 const RegularizationScheme& scheme);

/// Picks the grid member minimizing V-fold (V = 5) cross-validated
/// first-stage prediction error of the filtered fit; ties break toward the
/// larger parameter. scheme_kind is one of the RegularizationScheme kinds.
RegularizationScheme select_alpha(const Dataset& data,
                                  const std::string& scheme_kind,
                                  const std::vector<double>& grid);

}  // namespace ivspectral
