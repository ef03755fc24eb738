#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ivspectral {

/// First-stage coefficient scheme. Materialized to a length-K vector by
/// materialize_pi; the weak scheme depends on the sample size as well.
struct PiScheme {
  enum class Kind { FixedSupport, GeometricDecay, Weak, Sparse, Custom };

  Kind kind = Kind::FixedSupport;
  int support_size = 0;       // fixed_support
  double value = 0.0;         // fixed_support
  double base = 0.0;          // geometric_decay
  double ratio = 0.0;         // geometric_decay, in (0,1)
  double scale = 0.0;         // weak: pi_k = scale / sqrt(n)
  std::vector<int> support_indices;  // sparse
  std::vector<double> values;        // sparse / custom

  static PiScheme fixed_support(int support_size, double value);
  static PiScheme geometric_decay(double base, double ratio);
  static PiScheme weak(double scale);
  static PiScheme sparse(std::vector<int> indices, std::vector<double> values);
  static PiScheme custom(std::vector<double> values);

  /// Throws config_error if the scheme is inconsistent for K instruments.
  void validate(int k) const;

  std::string kind_name() const;
};

/// How the n x K instrument matrix is drawn.
struct InstrumentDesign {
  enum class Kind { IidGaussian, Ar1Correlated, Factor, Orthonormalized, Continuum };

  Kind kind = Kind::IidGaussian;
  double rho = 0.0;            // ar1_correlated, in (-1,1); correlation across
                               // instrument index, observations stay iid
  int num_factors = 1;         // factor
  double loadings_scale = 1.0; // factor
  int base_dim = 1;            // continuum
  std::vector<double> tau_grid;           // continuum, strictly increasing
  std::vector<double> quadrature_weights; // continuum, positive, sums to 1

  static InstrumentDesign iid_gaussian();
  static InstrumentDesign ar1_correlated(double rho);
  static InstrumentDesign factor(int num_factors, double loadings_scale);
  static InstrumentDesign orthonormalized();
  static InstrumentDesign continuum(int base_dim, std::vector<double> tau_grid,
                                    std::vector<double> quadrature_weights);
  /// 32 equispaced grid points on [-3, 3] with uniform weights.
  static InstrumentDesign continuum_default(int base_dim = 1);

  void validate(int n, int k) const;

  std::string kind_name() const;
};

struct DgpConfig {
  int n = 0;
  int k = 0;
  int g = 1;  // number of endogenous regressors
  PiScheme pi;
  InstrumentDesign design;
  std::vector<double> delta_true;  // length g
  double sigma_u = 1.0;
  std::vector<double> sigma_vu;    // length g, cov(u, V_j)
  double sigma_v = 1.0;

  /// Throws config_error naming the offending field.
  void validate() const;

  /// gamma = sigma_vu / sigma_u^2 (per coordinate).
  std::vector<double> gamma() const;
};

struct Dataset {
  Eigen::VectorXd y;  // n
  Eigen::MatrixXd x;  // n x g
  Eigen::MatrixXd z;  // n x k
  std::optional<DgpConfig> truth;  // absent for ingested real data

  int n() const { return static_cast<int>(y.size()); }
  int g() const { return static_cast<int>(x.cols()); }
  int k() const { return static_cast<int>(z.cols()); }

  /// Dimensional consistency and finiteness. Throws data_error.
  void validate() const;
};

/// Realizes the first-stage coefficient vector for K instruments. n enters
/// only through the weak scheme (pi_k = scale / sqrt(n)).
Eigen::VectorXd materialize_pi(const PiScheme& scheme, int k, int n);

/// Draws the n x K instrument matrix. Deterministic given the seed.
Eigen::MatrixXd generate_instruments(const InstrumentDesign& design, int n,
                                     int k, std::uint64_t seed);

/// Simulates one dataset: X = Z pi + V, y = X delta + u, with (u_i, V_i)
/// jointly Gaussian. Deterministic given (config, seed).
Dataset simulate_dataset(const DgpConfig& config, std::uint64_t seed);

}  // namespace ivspectral
