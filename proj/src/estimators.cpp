#include "ivspectral/estimators.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "ivspectral/errors.hpp"

namespace ivspectral {

namespace {

constexpr double kRankTol = 1e-10;   // eigenvalue ratio declaring deficiency
constexpr double kCondBound = 1e12;  // largest admissible condition number

// Solves the small g x g system A delta = b with a condition check.
Eigen::VectorXd solve_design(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             const std::string& what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw numeric_error(what + ": eigendecomposition of the design failed");
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  if (!(lmin > 0.0) || lmax / lmin > kCondBound)
    throw numeric_error(what + " is singular within condition bound 1e12");
  Eigen::VectorXd delta = es.eigenvectors() *
                          (es.eigenvectors().transpose() * b).cwiseQuotient(
                              es.eigenvalues());
  if (!delta.allFinite()) throw numeric_error(what + ": non-finite solution");
  return delta;
}

double condition_of(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (lmin <= 0.0) return std::numeric_limits<double>::infinity();
  return lmax / lmin;
}

EigenSystem descending_clamped(const Eigen::VectorXd& vals_asc,
                               const Eigen::MatrixXd& vecs, int source_dim) {
  const int m = static_cast<int>(vals_asc.size());
  EigenSystem out;
  out.source_dim = source_dim;
  out.eigenvalues = Eigen::VectorXd::Zero(source_dim);
  out.eigenvectors = Eigen::MatrixXd(vecs.rows(), m);
  for (int j = 0; j < m; ++j) {
    out.eigenvalues[j] = vals_asc[m - 1 - j];
    out.eigenvectors.col(j) = vecs.col(m - 1 - j);
  }
  const double lmax = out.eigenvalues.maxCoeff();
  const double floor = kRankTol * std::abs(lmax);
  for (int j = 0; j < source_dim; ++j)
    if (out.eigenvalues[j] < floor) out.eigenvalues[j] = 0.0;
  return out;
}

}  // namespace

EigenSystem eigensystem_of_gram(const Eigen::MatrixXd& z) {
  if (!z.allFinite())
    throw data_error("eigensystem_of_gram: input contains non-finite entries");
  const int n = static_cast<int>(z.rows());
  const int k = static_cast<int>(z.cols());

  if (k <= n) {
    Eigen::MatrixXd gram = z.transpose() * z;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success)
      throw numeric_error("eigensystem_of_gram: decomposition failed");
    return descending_clamped(es.eigenvalues(), es.eigenvectors(), k);
  }

  // K > n: decompose the n x n outer Gram ZZ' and convert; the eigenvectors
  // of Z'Z for nonzero eigenvalues are u_j = Z'v_j / sqrt(lambda_j).
  Eigen::MatrixXd outer = z * z.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(outer);
  if (es.info() != Eigen::Success)
    throw numeric_error("eigensystem_of_gram: decomposition failed");
  const double lmax = es.eigenvalues().maxCoeff();
  const double floor = kRankTol * std::abs(lmax);
  std::vector<int> keep;
  for (int j = n - 1; j >= 0; --j)
    if (es.eigenvalues()[j] >= floor && es.eigenvalues()[j] > 0.0)
      keep.push_back(j);

  EigenSystem out;
  out.source_dim = k;
  out.eigenvalues = Eigen::VectorXd::Zero(k);
  out.eigenvectors = Eigen::MatrixXd(k, keep.size());
  for (std::size_t idx = 0; idx < keep.size(); ++idx) {
    const double lambda = es.eigenvalues()[keep[idx]];
    out.eigenvalues[idx] = lambda;
    out.eigenvectors.col(idx) =
        z.transpose() * es.eigenvectors().col(keep[idx]) / std::sqrt(lambda);
  }
  return out;
}

// ---------------------------------------------------------------------------
// RegularizationScheme

RegularizationScheme RegularizationScheme::tikhonov(double alpha) {
  RegularizationScheme s;
  s.kind = Kind::Tikhonov;
  s.alpha = alpha;
  return s;
}

RegularizationScheme RegularizationScheme::spectral_cutoff(double threshold) {
  RegularizationScheme s;
  s.kind = Kind::SpectralCutoff;
  s.threshold = threshold;
  return s;
}

RegularizationScheme RegularizationScheme::principal_components(int m) {
  RegularizationScheme s;
  s.kind = Kind::PrincipalComponents;
  s.m = m;
  return s;
}

RegularizationScheme RegularizationScheme::landweber(int iterations, double step) {
  RegularizationScheme s;
  s.kind = Kind::Landweber;
  s.iterations = iterations;
  s.step = step;
  return s;
}

std::string RegularizationScheme::kind_name() const {
  switch (kind) {
    case Kind::Tikhonov: return "tikhonov";
    case Kind::SpectralCutoff: return "spectral_cutoff";
    case Kind::PrincipalComponents: return "principal_components";
    case Kind::Landweber: return "landweber";
  }
  return "?";
}

void RegularizationScheme::validate() const {
  switch (kind) {
    case Kind::Tikhonov:
      if (!(alpha > 0.0))
        throw config_error("scheme.alpha must be positive; got " +
                           std::to_string(alpha));
      break;
    case Kind::SpectralCutoff:
      if (!(threshold > 0.0))
        throw config_error("scheme.threshold must be positive; got " +
                           std::to_string(threshold));
      break;
    case Kind::PrincipalComponents:
      if (m < 1) throw config_error("scheme.m must be >= 1");
      break;
    case Kind::Landweber:
      if (iterations < 1) throw config_error("scheme.iterations must be >= 1");
      if (!(step > 0.0)) throw config_error("scheme.step must be positive");
      break;
  }
}

Eigen::VectorXd filter_factors(const EigenSystem& eigs,
                               const RegularizationScheme& scheme) {
  scheme.validate();
  const int k = eigs.source_dim;
  const Eigen::VectorXd& lam = eigs.eigenvalues;
  Eigen::VectorXd q(k);
  switch (scheme.kind) {
    case RegularizationScheme::Kind::Tikhonov:
      for (int j = 0; j < k; ++j)
        q[j] = lam[j] * lam[j] / (lam[j] * lam[j] + scheme.alpha);
      break;
    case RegularizationScheme::Kind::SpectralCutoff:
      for (int j = 0; j < k; ++j) q[j] = lam[j] >= scheme.threshold ? 1.0 : 0.0;
      break;
    case RegularizationScheme::Kind::PrincipalComponents:
      for (int j = 0; j < k; ++j) q[j] = j < scheme.m ? 1.0 : 0.0;
      break;
    case RegularizationScheme::Kind::Landweber: {
      const double lmax = eigs.lambda_max();
      if (lmax > 0.0 && scheme.step >= 2.0 / lmax)
        throw config_error("scheme.step must lie in (0, 2/lambda_max); got step = " +
                           std::to_string(scheme.step) + " with lambda_max = " +
                           std::to_string(lmax));
      for (int j = 0; j < k; ++j)
        q[j] = 1.0 - std::pow(1.0 - scheme.step * lam[j], scheme.iterations);
      break;
    }
  }
  return q;
}

Eigen::MatrixXd apply_filtered_projection(const Eigen::MatrixXd& z,
                                          const EigenSystem& eigs,
                                          const Eigen::VectorXd& q,
                                          const Eigen::MatrixXd& v) {
  if (q.size() != eigs.source_dim)
    throw config_error("filter factor vector has wrong length");
  const int m = eigs.stored();
  Eigen::VectorXd scale = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < m; ++j)
    if (eigs.eigenvalues[j] > 0.0) scale[j] = q[j] / eigs.eigenvalues[j];
  // P^q v = Z U diag(q/lambda) U' (Z'v)
  Eigen::MatrixXd coeff = eigs.eigenvectors.transpose() * (z.transpose() * v);
  coeff.array().colwise() *= scale.array();
  return z * (eigs.eigenvectors * coeff);
}

Eigen::MatrixXd projection_apply(const Eigen::MatrixXd& z,
                                 const Eigen::MatrixXd& v) {
  if (z.rows() != v.rows())
    throw data_error("projection_apply: Z and v row counts differ");
  EigenSystem eigs = eigensystem_of_gram(z);
  const double lmax = eigs.lambda_max();
  const double lmin = eigs.lambda_min();
  if (!(lmin > kRankTol * lmax) || lmax == 0.0)
    throw numeric_error(
        "projection requires Z of full column rank: smallest/largest Gram "
        "eigenvalue ratio = " +
        std::to_string(lmax > 0.0 ? lmin / lmax : 0.0) + " <= 1e-10");
  return apply_filtered_projection(z, eigs,
                                   Eigen::VectorXd::Ones(eigs.source_dim), v);
}

// ---------------------------------------------------------------------------
// Estimators

EstimatorResult ols(const Dataset& data) {
  data.validate();
  Eigen::MatrixXd a = data.x.transpose() * data.x;
  Eigen::VectorXd delta = solve_design(a, data.x.transpose() * data.y, "X'X");
  EstimatorResult res;
  res.delta_hat = std::move(delta);
  res.method = "ols";
  res.diagnostics["condition_number"] = condition_of(a);
  return res;
}

EstimatorResult tsls(const Dataset& data) {
  data.validate();
  Eigen::MatrixXd fitted = projection_apply(data.z, data.x);
  // X'P_Z X = (P_Z X)'(P_Z X) by idempotence and symmetry.
  Eigen::MatrixXd a = fitted.transpose() * fitted;
  Eigen::VectorXd delta =
      solve_design(a, fitted.transpose() * data.y, "X'P_Z X");
  EstimatorResult res;
  res.delta_hat = std::move(delta);
  res.method = "tsls";
  res.first_stage_fitted = std::move(fitted);
  res.diagnostics["condition_number"] = condition_of(a);
  res.diagnostics["effective_dof"] = static_cast<double>(data.k());
  return res;
}

EstimatorResult tsls_regularized(const Dataset& data,
                                 const RegularizationScheme& scheme) {
  data.validate();
  EigenSystem eigs = eigensystem_of_gram(data.z);
  Eigen::VectorXd q = filter_factors(eigs, scheme);

  // Filter [X y] in one pass; the damped projector is symmetric, so
  // X'P^q y = (P^q X)' y would also do, but the literal form is kept.
  Eigen::MatrixXd xy(data.n(), data.g() + 1);
  xy.leftCols(data.g()) = data.x;
  xy.col(data.g()) = data.y;
  Eigen::MatrixXd fxy = apply_filtered_projection(data.z, eigs, q, xy);
  Eigen::MatrixXd fitted = fxy.leftCols(data.g());
  Eigen::VectorXd fy = fxy.col(data.g());

  Eigen::MatrixXd a = data.x.transpose() * fitted;
  a = 0.5 * (a + a.transpose());  // symmetric in exact arithmetic
  Eigen::VectorXd delta;
  try {
    delta = solve_design(a, data.x.transpose() * fy, "X'P^q X");
  } catch (const numeric_error&) {
    throw numeric_error(
        "filtered design X'P^q X is singular within condition bound; consider "
        "a larger regularization parameter");
  }
  EstimatorResult res;
  res.delta_hat = std::move(delta);
  res.method = "tsls_regularized";
  res.scheme = scheme;
  res.first_stage_fitted = std::move(fitted);
  res.diagnostics["condition_number"] = condition_of(a);
  res.diagnostics["effective_dof"] = q.sum();
  return res;
}

// ---------------------------------------------------------------------------
// Data-driven parameter selection

namespace {

RegularizationScheme scheme_from_grid_value(const std::string& kind, double g,
                                            double step_for_landweber) {
  if (kind == "tikhonov") return RegularizationScheme::tikhonov(g);
  if (kind == "spectral_cutoff") return RegularizationScheme::spectral_cutoff(g);
  if (kind == "principal_components")
    return RegularizationScheme::principal_components(
        std::max(1, static_cast<int>(std::lround(g))));
  if (kind == "landweber")
    return RegularizationScheme::landweber(
        std::max(1, static_cast<int>(std::lround(g))), step_for_landweber);
  throw config_error("unknown regularization kind '" + kind + "'");
}

}  // namespace

RegularizationScheme select_alpha(const Dataset& data,
                                  const std::string& scheme_kind,
                                  const std::vector<double>& grid) {
  data.validate();
  if (grid.empty()) throw config_error("select_alpha: grid must be non-empty");
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(grid[j] > 0.0))
      throw config_error("select_alpha: grid values must be strictly positive");
    if (j > 0 && !(grid[j] > grid[j - 1]))
      throw config_error("select_alpha: grid must be sorted strictly ascending");
  }

  const int n = data.n();
  const int folds = std::min(5, n);
  std::vector<double> score(grid.size(), 0.0);

  for (int f = 0; f < folds; ++f) {
    const int lo = static_cast<int>(static_cast<long long>(f) * n / folds);
    const int hi = static_cast<int>(static_cast<long long>(f + 1) * n / folds);
    const int n_te = hi - lo;
    const int n_tr = n - n_te;
    if (n_tr == 0) continue;

    Eigen::MatrixXd z_tr(n_tr, data.k()), x_tr(n_tr, data.g());
    z_tr.topRows(lo) = data.z.topRows(lo);
    z_tr.bottomRows(n - hi) = data.z.bottomRows(n - hi);
    x_tr.topRows(lo) = data.x.topRows(lo);
    x_tr.bottomRows(n - hi) = data.x.bottomRows(n - hi);
    Eigen::MatrixXd z_te = data.z.middleRows(lo, n_te);
    Eigen::MatrixXd x_te = data.x.middleRows(lo, n_te);

    EigenSystem eigs = eigensystem_of_gram(z_tr);
    const double lmax = eigs.lambda_max();
    const double lw_step = lmax > 0.0 ? 1.0 / lmax : 1.0;
    Eigen::MatrixXd ztx = eigs.eigenvectors.transpose() *
                          (z_tr.transpose() * x_tr);

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      RegularizationScheme s = scheme_from_grid_value(scheme_kind, grid[gi], lw_step);
      Eigen::VectorXd q = filter_factors(eigs, s);
      Eigen::VectorXd scale = Eigen::VectorXd::Zero(eigs.stored());
      for (int j = 0; j < eigs.stored(); ++j)
        if (eigs.eigenvalues[j] > 0.0) scale[j] = q[j] / eigs.eigenvalues[j];
      Eigen::MatrixXd coeff = ztx;
      coeff.array().colwise() *= scale.array();
      Eigen::MatrixXd pred = z_te * (eigs.eigenvectors * coeff);
      score[gi] += (x_te - pred).squaredNorm();
    }
  }

  // Ascending scan with "<=" keeps the larger parameter on ties.
  std::size_t best = 0;
  for (std::size_t gi = 1; gi < grid.size(); ++gi)
    if (score[gi] <= score[best]) best = gi;

  double lw_step_full = 0.0;
  if (scheme_kind == "landweber") {
    EigenSystem eigs = eigensystem_of_gram(data.z);
    lw_step_full = eigs.lambda_max() > 0.0 ? 1.0 / eigs.lambda_max() : 1.0;
  }
  return scheme_from_grid_value(scheme_kind, grid[best], lw_step_full);
}

}  // namespace ivspectral
