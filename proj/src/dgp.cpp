#include "ivspectral/dgp.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <set>

#include "ivspectral/errors.hpp"
#include "ivspectral/rng.hpp"

namespace ivspectral {

// ---------------------------------------------------------------------------
// PiScheme

PiScheme PiScheme::fixed_support(int support_size, double value) {
  PiScheme s;
  s.kind = Kind::FixedSupport;
  s.support_size = support_size;
  s.value = value;
  return s;
}

PiScheme PiScheme::geometric_decay(double base, double ratio) {
  PiScheme s;
  s.kind = Kind::GeometricDecay;
  s.base = base;
  s.ratio = ratio;
  return s;
}

PiScheme PiScheme::weak(double scale) {
  PiScheme s;
  s.kind = Kind::Weak;
  s.scale = scale;
  return s;
}

PiScheme PiScheme::sparse(std::vector<int> indices, std::vector<double> values) {
  PiScheme s;
  s.kind = Kind::Sparse;
  s.support_indices = std::move(indices);
  s.values = std::move(values);
  return s;
}

PiScheme PiScheme::custom(std::vector<double> values) {
  PiScheme s;
  s.kind = Kind::Custom;
  s.values = std::move(values);
  return s;
}

std::string PiScheme::kind_name() const {
  switch (kind) {
    case Kind::FixedSupport: return "fixed_support";
    case Kind::GeometricDecay: return "geometric_decay";
    case Kind::Weak: return "weak";
    case Kind::Sparse: return "sparse";
    case Kind::Custom: return "custom";
  }
  return "?";
}

void PiScheme::validate(int k) const {
  switch (kind) {
    case Kind::FixedSupport:
      if (support_size < 0 || support_size > k)
        throw config_error("pi.support_size must lie in [0, k]; got " +
                           std::to_string(support_size) + " with k = " +
                           std::to_string(k));
      break;
    case Kind::GeometricDecay:
      if (!(ratio > 0.0 && ratio < 1.0))
        throw config_error("pi.ratio must lie strictly inside (0, 1); got " +
                           std::to_string(ratio));
      break;
    case Kind::Weak:
      break;
    case Kind::Sparse: {
      if (support_indices.size() != values.size())
        throw config_error("pi.support_indices and pi.values must have equal length");
      std::set<int> seen;
      for (int idx : support_indices) {
        if (idx < 0 || idx >= k)
          throw config_error("pi.support_indices entry " + std::to_string(idx) +
                             " out of range [0, " + std::to_string(k) + ")");
        if (!seen.insert(idx).second)
          throw config_error("pi.support_indices contains duplicate index " +
                             std::to_string(idx));
      }
      break;
    }
    case Kind::Custom:
      if (static_cast<int>(values.size()) != k)
        throw config_error("pi.values must have length k = " + std::to_string(k) +
                           "; got " + std::to_string(values.size()));
      break;
  }
}

Eigen::VectorXd materialize_pi(const PiScheme& scheme, int k, int n) {
  if (k < 1) throw config_error("k must be >= 1");
  if (n < 1) throw config_error("n must be >= 1");
  scheme.validate(k);
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(k);
  switch (scheme.kind) {
    case PiScheme::Kind::FixedSupport:
      for (int j = 0; j < scheme.support_size; ++j) pi[j] = scheme.value;
      break;
    case PiScheme::Kind::GeometricDecay:
      for (int j = 0; j < k; ++j) pi[j] = scheme.base * std::pow(scheme.ratio, j);
      break;
    case PiScheme::Kind::Weak: {
      const double v = scheme.scale / std::sqrt(static_cast<double>(n));
      pi.setConstant(v);
      break;
    }
    case PiScheme::Kind::Sparse:
      for (std::size_t j = 0; j < scheme.support_indices.size(); ++j)
        pi[scheme.support_indices[j]] = scheme.values[j];
      break;
    case PiScheme::Kind::Custom:
      for (int j = 0; j < k; ++j) pi[j] = scheme.values[j];
      break;
  }
  return pi;
}

// ---------------------------------------------------------------------------
// InstrumentDesign

InstrumentDesign InstrumentDesign::iid_gaussian() {
  InstrumentDesign d;
  d.kind = Kind::IidGaussian;
  return d;
}

InstrumentDesign InstrumentDesign::ar1_correlated(double rho) {
  InstrumentDesign d;
  d.kind = Kind::Ar1Correlated;
  d.rho = rho;
  return d;
}

InstrumentDesign InstrumentDesign::factor(int num_factors, double loadings_scale) {
  InstrumentDesign d;
  d.kind = Kind::Factor;
  d.num_factors = num_factors;
  d.loadings_scale = loadings_scale;
  return d;
}

InstrumentDesign InstrumentDesign::orthonormalized() {
  InstrumentDesign d;
  d.kind = Kind::Orthonormalized;
  return d;
}

InstrumentDesign InstrumentDesign::continuum(int base_dim,
                                             std::vector<double> tau_grid,
                                             std::vector<double> weights) {
  InstrumentDesign d;
  d.kind = Kind::Continuum;
  d.base_dim = base_dim;
  d.tau_grid = std::move(tau_grid);
  d.quadrature_weights = std::move(weights);
  return d;
}

InstrumentDesign InstrumentDesign::continuum_default(int base_dim) {
  const int m = 32;
  std::vector<double> grid(m), w(m, 1.0 / m);
  for (int j = 0; j < m; ++j) grid[j] = -3.0 + 6.0 * j / (m - 1);
  return continuum(base_dim, std::move(grid), std::move(w));
}

std::string InstrumentDesign::kind_name() const {
  switch (kind) {
    case Kind::IidGaussian: return "iid_gaussian";
    case Kind::Ar1Correlated: return "ar1_correlated";
    case Kind::Factor: return "factor";
    case Kind::Orthonormalized: return "orthonormalized";
    case Kind::Continuum: return "continuum";
  }
  return "?";
}

void InstrumentDesign::validate(int n, int k) const {
  switch (kind) {
    case Kind::IidGaussian:
      break;
    case Kind::Ar1Correlated:
      if (!(rho > -1.0 && rho < 1.0))
        throw config_error("design.rho must lie strictly inside (-1, 1); got " +
                           std::to_string(rho));
      break;
    case Kind::Factor:
      if (num_factors < 1)
        throw config_error("design.num_factors must be >= 1");
      break;
    case Kind::Orthonormalized:
      if (n < k)
        throw config_error("design orthonormalized requires n >= k; got n = " +
                           std::to_string(n) + ", k = " + std::to_string(k));
      break;
    case Kind::Continuum: {
      if (tau_grid.empty())
        throw config_error("design.tau_grid must be non-empty");
      if (base_dim < 1)
        throw config_error("design.base_dim must be >= 1");
      for (std::size_t j = 1; j < tau_grid.size(); ++j)
        if (!(tau_grid[j] > tau_grid[j - 1]))
          throw config_error("design.tau_grid must be strictly increasing");
      if (quadrature_weights.size() != tau_grid.size())
        throw config_error("design.quadrature_weights must match tau_grid length");
      double sum = 0.0;
      for (double w : quadrature_weights) {
        if (!(w > 0.0))
          throw config_error("design.quadrature_weights must be positive");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-8)
        throw config_error("design.quadrature_weights must sum to 1; got " +
                           std::to_string(sum));
      if (k != 2 * static_cast<int>(tau_grid.size()))
        throw config_error("continuum design requires k = 2 * |tau_grid| = " +
                           std::to_string(2 * tau_grid.size()) + "; got k = " +
                           std::to_string(k));
      break;
    }
  }
}

namespace {

Eigen::MatrixXd gaussian_matrix(Rng& rng, int n, int k) {
  Eigen::MatrixXd m(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

Eigen::MatrixXd generate_instruments(const InstrumentDesign& design, int n,
                                     int k, std::uint64_t seed) {
  if (n < 1 || k < 1) throw config_error("n and k must be >= 1");
  design.validate(n, k);
  Rng rng(derive_seed(seed, 0x5a));

  switch (design.kind) {
    case InstrumentDesign::Kind::IidGaussian:
      return gaussian_matrix(rng, n, k);

    case InstrumentDesign::Kind::Ar1Correlated: {
      // AR(1) across the instrument index: corr(col_j, col_l) = rho^{|j-l|},
      // unit marginal variance, rows iid.
      Eigen::MatrixXd eps = gaussian_matrix(rng, n, k);
      Eigen::MatrixXd z(n, k);
      z.col(0) = eps.col(0);
      const double innov = std::sqrt(1.0 - design.rho * design.rho);
      for (int j = 1; j < k; ++j)
        z.col(j) = design.rho * z.col(j - 1) + innov * eps.col(j);
      return z;
    }

    case InstrumentDesign::Kind::Factor: {
      Eigen::MatrixXd f = gaussian_matrix(rng, n, design.num_factors);
      Eigen::MatrixXd loadings =
          design.loadings_scale * gaussian_matrix(rng, k, design.num_factors);
      Eigen::MatrixXd noise = gaussian_matrix(rng, n, k);
      return f * loadings.transpose() + noise;
    }

    case InstrumentDesign::Kind::Orthonormalized: {
      // Thin QR of a raw Gaussian draw, scaled by sqrt(n): Z'Z/n = I exactly
      // up to round-off.
      Eigen::MatrixXd raw = gaussian_matrix(rng, n, k);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
      Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
      return std::sqrt(static_cast<double>(n)) * q;
    }

    case InstrumentDesign::Kind::Continuum: {
      // Real/imaginary split of exp(i tau' z): column pair
      // sqrt(w_m) * (cos(a_im), sin(a_im)) with a_im = tau_m * u'z_i and
      // u = (1,...,1)/sqrt(base_dim), so u'z_i is standard normal.
      const int m = static_cast<int>(design.tau_grid.size());
      Eigen::MatrixXd base = gaussian_matrix(rng, n, design.base_dim);
      Eigen::VectorXd proj =
          base.rowwise().sum() / std::sqrt(static_cast<double>(design.base_dim));
      Eigen::MatrixXd z(n, 2 * m);
      for (int j = 0; j < m; ++j) {
        const double tau = design.tau_grid[j];
        const double w = std::sqrt(design.quadrature_weights[j]);
        for (int i = 0; i < n; ++i) {
          const double a = tau * proj[i];
          z(i, 2 * j) = w * std::cos(a);
          z(i, 2 * j + 1) = w * std::sin(a);
        }
      }
      return z;
    }
  }
  throw config_error("unknown instrument design");
}

// ---------------------------------------------------------------------------
// DgpConfig / Dataset

std::vector<double> DgpConfig::gamma() const {
  std::vector<double> out(sigma_vu.size());
  for (std::size_t j = 0; j < sigma_vu.size(); ++j)
    out[j] = sigma_vu[j] / (sigma_u * sigma_u);
  return out;
}

void DgpConfig::validate() const {
  if (n < 1) throw config_error("dgp.n must be >= 1");
  if (k < 1) throw config_error("dgp.k must be >= 1");
  if (g < 1) throw config_error("dgp.g must be >= 1");
  if (static_cast<int>(delta_true.size()) != g)
    throw config_error("dgp.delta_true must have length g = " + std::to_string(g));
  if (!(sigma_u > 0.0)) throw config_error("dgp.sigma_u must be positive");
  if (!(sigma_v > 0.0)) throw config_error("dgp.sigma_v must be positive");
  if (static_cast<int>(sigma_vu.size()) != g)
    throw config_error("dgp.sigma_vu must have length g = " + std::to_string(g));
  for (int j = 0; j < g; ++j)
    if (!(std::abs(sigma_vu[j]) < sigma_u * sigma_v))
      throw config_error("dgp.sigma_vu[" + std::to_string(j) +
                         "] must satisfy |sigma_vu| < sigma_u * sigma_v");
  pi.validate(k);
  design.validate(n, k);
}

void Dataset::validate() const {
  if (x.rows() != y.size() || z.rows() != y.size())
    throw data_error("dataset dimensions are inconsistent: y has " +
                     std::to_string(y.size()) + " rows, x has " +
                     std::to_string(x.rows()) + ", z has " +
                     std::to_string(z.rows()));
  if (y.size() == 0 || x.cols() == 0 || z.cols() == 0)
    throw data_error("dataset must have at least one row, regressor and instrument");
  if (!y.allFinite() || !x.allFinite() || !z.allFinite())
    throw data_error("dataset contains non-finite entries");
}

Dataset simulate_dataset(const DgpConfig& config, std::uint64_t seed) {
  config.validate();
  const int n = config.n, k = config.k, g = config.g;

  Eigen::VectorXd pi = materialize_pi(config.pi, k, n);
  Eigen::MatrixXd z = generate_instruments(config.design, n, k, derive_seed(seed, 1));

  // Joint error covariance of (u, V_1..V_g): Var(u) = sigma_u^2,
  // Var(V_j) = sigma_v^2, Cov(u, V_j) = sigma_vu[j], Cov(V_j, V_l) = 0.
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(1 + g, 1 + g);
  cov(0, 0) = config.sigma_u * config.sigma_u;
  for (int j = 0; j < g; ++j) {
    cov(0, j + 1) = config.sigma_vu[j];
    cov(j + 1, 0) = config.sigma_vu[j];
    cov(j + 1, j + 1) = config.sigma_v * config.sigma_v;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw config_error("joint error covariance of (u, V) is not positive definite");
  Eigen::MatrixXd chol = llt.matrixL();

  Rng rng(derive_seed(seed, 2));
  Eigen::MatrixXd raw(n, 1 + g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 1 + g; ++j) raw(i, j) = rng.normal();
  Eigen::MatrixXd errs = raw * chol.transpose();

  Eigen::VectorXd u = errs.col(0);
  Eigen::MatrixXd v = errs.rightCols(g);

  Eigen::VectorXd zpi = z * pi;
  Eigen::MatrixXd x = v;
  for (int j = 0; j < g; ++j) x.col(j) += zpi;

  Eigen::VectorXd delta =
      Eigen::Map<const Eigen::VectorXd>(config.delta_true.data(), g);
  Dataset data;
  data.y = x * delta + u;
  data.x = std::move(x);
  data.z = std::move(z);
  data.truth = config;
  data.validate();
  return data;
}

}  // namespace ivspectral
