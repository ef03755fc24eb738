#include "ivspectral/config.hpp"

#include <algorithm>
#include <set>

#include "ivspectral/errors.hpp"

namespace ivspectral {

using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object())
    throw config_error(path + " must be an object");
}

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw config_error("unknown key '" + path + "." + item.key() + "'");
}

double get_double(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key))
    throw config_error("missing required key '" + path + "." + key + "'");
  if (!j[key].is_number())
    throw config_error("'" + path + "." + key + "' must be a number");
  return j[key].get<double>();
}

double get_double_or(const json& j, const std::string& path, const char* key,
                     double def) {
  return j.contains(key) ? get_double(j, path, key) : def;
}

int get_int(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key))
    throw config_error("missing required key '" + path + "." + key + "'");
  if (!j[key].is_number_integer())
    throw config_error("'" + path + "." + key + "' must be an integer");
  return j[key].get<int>();
}

int get_int_or(const json& j, const std::string& path, const char* key, int def) {
  return j.contains(key) ? get_int(j, path, key) : def;
}

std::string get_string(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key))
    throw config_error("missing required key '" + path + "." + key + "'");
  if (!j[key].is_string())
    throw config_error("'" + path + "." + key + "' must be a string");
  return j[key].get<std::string>();
}

std::vector<double> get_double_list(const json& j, const std::string& path,
                                    const char* key) {
  if (!j.contains(key))
    throw config_error("missing required key '" + path + "." + key + "'");
  if (!j[key].is_array())
    throw config_error("'" + path + "." + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number())
      throw config_error("'" + path + "." + key + "' must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<int> get_int_list(const json& j, const std::string& path,
                              const char* key) {
  if (!j[key].is_array())
    throw config_error("'" + path + "." + key + "' must be an array of integers");
  std::vector<int> out;
  for (const auto& v : j[key]) {
    if (!v.is_number_integer())
      throw config_error("'" + path + "." + key + "' must contain only integers");
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// PiScheme

json pi_scheme_to_json(const PiScheme& s) {
  json j;
  j["kind"] = s.kind_name();
  switch (s.kind) {
    case PiScheme::Kind::FixedSupport:
      j["support_size"] = s.support_size;
      j["value"] = s.value;
      break;
    case PiScheme::Kind::GeometricDecay:
      j["base"] = s.base;
      j["ratio"] = s.ratio;
      break;
    case PiScheme::Kind::Weak:
      j["scale"] = s.scale;
      break;
    case PiScheme::Kind::Sparse:
      j["support_indices"] = s.support_indices;
      j["values"] = s.values;
      break;
    case PiScheme::Kind::Custom:
      j["values"] = s.values;
      break;
  }
  return j;
}

PiScheme pi_scheme_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string kind = get_string(j, path, "kind");
  if (kind == "fixed_support") {
    check_keys(j, path, {"kind", "support_size", "value"});
    return PiScheme::fixed_support(get_int(j, path, "support_size"),
                                   get_double(j, path, "value"));
  }
  if (kind == "geometric_decay") {
    check_keys(j, path, {"kind", "base", "ratio"});
    return PiScheme::geometric_decay(get_double(j, path, "base"),
                                     get_double(j, path, "ratio"));
  }
  if (kind == "weak") {
    check_keys(j, path, {"kind", "scale"});
    return PiScheme::weak(get_double(j, path, "scale"));
  }
  if (kind == "sparse") {
    check_keys(j, path, {"kind", "support_indices", "values"});
    if (!j.contains("support_indices"))
      throw config_error("missing required key '" + path + ".support_indices'");
    return PiScheme::sparse(get_int_list(j, path, "support_indices"),
                            get_double_list(j, path, "values"));
  }
  if (kind == "custom") {
    check_keys(j, path, {"kind", "values"});
    return PiScheme::custom(get_double_list(j, path, "values"));
  }
  throw config_error("'" + path + ".kind' must be one of fixed_support, "
                     "geometric_decay, weak, sparse, custom; got '" + kind + "'");
}

// ---------------------------------------------------------------------------
// InstrumentDesign

json design_to_json(const InstrumentDesign& d) {
  json j;
  j["kind"] = d.kind_name();
  switch (d.kind) {
    case InstrumentDesign::Kind::IidGaussian:
    case InstrumentDesign::Kind::Orthonormalized:
      break;
    case InstrumentDesign::Kind::Ar1Correlated:
      j["rho"] = d.rho;
      break;
    case InstrumentDesign::Kind::Factor:
      j["num_factors"] = d.num_factors;
      j["loadings_scale"] = d.loadings_scale;
      break;
    case InstrumentDesign::Kind::Continuum:
      j["base_dim"] = d.base_dim;
      j["tau_grid"] = d.tau_grid;
      j["quadrature_weights"] = d.quadrature_weights;
      break;
  }
  return j;
}

InstrumentDesign design_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string kind = get_string(j, path, "kind");
  if (kind == "iid_gaussian") {
    check_keys(j, path, {"kind"});
    return InstrumentDesign::iid_gaussian();
  }
  if (kind == "ar1_correlated") {
    check_keys(j, path, {"kind", "rho"});
    const double rho = get_double(j, path, "rho");
    if (!(rho > -1.0 && rho < 1.0))
      throw config_error("'" + path + ".rho' must lie strictly inside (-1, 1); got " +
                         std::to_string(rho));
    return InstrumentDesign::ar1_correlated(rho);
  }
  if (kind == "factor") {
    check_keys(j, path, {"kind", "num_factors", "loadings_scale"});
    return InstrumentDesign::factor(get_int(j, path, "num_factors"),
                                    get_double_or(j, path, "loadings_scale", 1.0));
  }
  if (kind == "orthonormalized") {
    check_keys(j, path, {"kind"});
    return InstrumentDesign::orthonormalized();
  }
  if (kind == "continuum") {
    check_keys(j, path, {"kind", "base_dim", "tau_grid", "quadrature_weights"});
    const int base_dim = get_int_or(j, path, "base_dim", 1);
    if (!j.contains("tau_grid") && !j.contains("quadrature_weights"))
      return InstrumentDesign::continuum_default(base_dim);
    std::vector<double> grid = get_double_list(j, path, "tau_grid");
    std::vector<double> weights;
    if (j.contains("quadrature_weights")) {
      weights = get_double_list(j, path, "quadrature_weights");
    } else {
      weights.assign(grid.size(), 1.0 / static_cast<double>(grid.size()));
    }
    return InstrumentDesign::continuum(base_dim, std::move(grid), std::move(weights));
  }
  throw config_error("'" + path + ".kind' must be one of iid_gaussian, "
                     "ar1_correlated, factor, orthonormalized, continuum; got '" +
                     kind + "'");
}

// ---------------------------------------------------------------------------
// DgpConfig

json dgp_to_json(const DgpConfig& c) {
  json j;
  j["n"] = c.n;
  j["k"] = c.k;
  j["g"] = c.g;
  j["pi"] = pi_scheme_to_json(c.pi);
  j["design"] = design_to_json(c.design);
  j["delta_true"] = c.delta_true;
  j["sigma_u"] = c.sigma_u;
  j["sigma_vu"] = c.sigma_vu;
  j["sigma_v"] = c.sigma_v;
  return j;
}

DgpConfig dgp_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"n", "k", "g", "pi", "design", "delta_true", "sigma_u",
                       "sigma_vu", "sigma_v"});
  DgpConfig c;
  c.g = get_int_or(j, path, "g", 1);
  if (j.contains("pi"))
    c.pi = pi_scheme_from_json(j["pi"], path + ".pi");
  else
    throw config_error("missing required key '" + path + ".pi'");
  c.design = j.contains("design")
                 ? design_from_json(j["design"], path + ".design")
                 : InstrumentDesign::iid_gaussian();
  // A continuum design fixes k = 2 * |tau_grid|; k may be omitted then.
  if (!j.contains("k") && c.design.kind == InstrumentDesign::Kind::Continuum)
    c.k = 2 * static_cast<int>(c.design.tau_grid.size());
  else
    c.k = get_int(j, path, "k");
  c.n = get_int(j, path, "n");
  c.delta_true = j.contains("delta_true")
                     ? get_double_list(j, path, "delta_true")
                     : std::vector<double>(std::max(1, c.g), 1.0);
  c.sigma_u = get_double_or(j, path, "sigma_u", 1.0);
  c.sigma_v = get_double_or(j, path, "sigma_v", 1.0);
  c.sigma_vu = j.contains("sigma_vu")
                   ? get_double_list(j, path, "sigma_vu")
                   : std::vector<double>(std::max(1, c.g), 0.0);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// RegularizationScheme / EstimatorSpec / ScenarioConfig

json scheme_to_json(const RegularizationScheme& s) {
  json j;
  j["kind"] = s.kind_name();
  switch (s.kind) {
    case RegularizationScheme::Kind::Tikhonov:
      j["alpha"] = s.alpha;
      break;
    case RegularizationScheme::Kind::SpectralCutoff:
      j["threshold"] = s.threshold;
      break;
    case RegularizationScheme::Kind::PrincipalComponents:
      j["m"] = s.m;
      break;
    case RegularizationScheme::Kind::Landweber:
      j["iterations"] = s.iterations;
      j["step"] = s.step;
      break;
  }
  return j;
}

RegularizationScheme scheme_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string kind = get_string(j, path, "kind");
  RegularizationScheme s;
  if (kind == "tikhonov") {
    check_keys(j, path, {"kind", "alpha"});
    s = RegularizationScheme::tikhonov(get_double(j, path, "alpha"));
  } else if (kind == "spectral_cutoff") {
    check_keys(j, path, {"kind", "threshold"});
    s = RegularizationScheme::spectral_cutoff(get_double(j, path, "threshold"));
  } else if (kind == "principal_components") {
    check_keys(j, path, {"kind", "m"});
    s = RegularizationScheme::principal_components(get_int(j, path, "m"));
  } else if (kind == "landweber") {
    check_keys(j, path, {"kind", "iterations", "step"});
    s = RegularizationScheme::landweber(get_int(j, path, "iterations"),
                                        get_double(j, path, "step"));
  } else {
    throw config_error("'" + path + ".kind' must be one of tikhonov, "
                       "spectral_cutoff, principal_components, landweber; got '" +
                       kind + "'");
  }
  s.validate();
  return s;
}

json estimator_spec_to_json(const EstimatorSpec& s) {
  json j;
  j["label"] = s.label;
  j["method"] = s.method;
  if (s.scheme) j["scheme"] = scheme_to_json(*s.scheme);
  if (s.select) {
    json sel;
    sel["kind"] = s.select->kind;
    sel["grid"] = s.select->grid;
    j["select"] = sel;
  }
  return j;
}

EstimatorSpec estimator_spec_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"label", "method", "scheme", "select"});
  EstimatorSpec s;
  s.method = get_string(j, path, "method");
  s.label = j.contains("label") ? get_string(j, path, "label") : s.method;
  if (j.contains("scheme"))
    s.scheme = scheme_from_json(j["scheme"], path + ".scheme");
  if (j.contains("select")) {
    const json& sel = j["select"];
    expect_object(sel, path + ".select");
    check_keys(sel, path + ".select", {"kind", "grid"});
    AlphaSelection a;
    a.kind = get_string(sel, path + ".select", "kind");
    a.grid = get_double_list(sel, path + ".select", "grid");
    s.select = std::move(a);
  }
  s.validate();
  return s;
}

json scenario_to_json(const ScenarioConfig& s) {
  json j;
  j["dgp"] = dgp_to_json(s.dgp);
  json est = json::array();
  for (const auto& spec : s.estimators) est.push_back(estimator_spec_to_json(spec));
  j["estimators"] = est;
  j["replications"] = s.replications;
  j["master_seed"] = s.master_seed;
  if (s.n_grid) j["n_grid"] = *s.n_grid;
  return j;
}

ScenarioConfig scenario_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path,
             {"dgp", "estimators", "replications", "master_seed", "n_grid"});
  ScenarioConfig s;
  if (!j.contains("dgp"))
    throw config_error("missing required key '" + path + ".dgp'");
  s.dgp = dgp_from_json(j["dgp"], path + ".dgp");
  if (j.contains("estimators")) {
    if (!j["estimators"].is_array())
      throw config_error("'" + path + ".estimators' must be an array");
    int idx = 0;
    for (const auto& e : j["estimators"]) {
      s.estimators.push_back(estimator_spec_from_json(
          e, path + ".estimators[" + std::to_string(idx) + "]"));
      ++idx;
    }
  } else {
    EstimatorSpec o;
    o.label = "ols";
    o.method = "ols";
    EstimatorSpec t;
    t.label = "tsls";
    t.method = "tsls";
    s.estimators = {o, t};
  }
  s.replications = get_int_or(j, path, "replications", 1);
  if (j.contains("master_seed")) {
    if (!j["master_seed"].is_number_integer())
      throw config_error("'" + path + ".master_seed' must be an integer");
    s.master_seed = j["master_seed"].get<std::uint64_t>();
  }
  if (j.contains("n_grid")) s.n_grid = get_int_list(j, path, "n_grid");
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// DiagnoseParams / RunConfig

namespace {

json pi_source_to_json(const PiSource& p) {
  json j;
  if (p.source == "path") j["path"] = p.path;
  if (p.source == "values") j["values"] = p.values;
  if (p.source == "scheme") j["scheme"] = pi_scheme_to_json(p.scheme);
  return j;
}

PiSource pi_source_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"path", "values", "scheme"});
  int provided = static_cast<int>(j.contains("path")) +
                 static_cast<int>(j.contains("values")) +
                 static_cast<int>(j.contains("scheme"));
  if (provided != 1)
    throw config_error("'" + path + "' must provide exactly one of 'path', "
                       "'values' or 'scheme'");
  PiSource p;
  if (j.contains("path")) {
    p.source = "path";
    p.path = get_string(j, path, "path");
  } else if (j.contains("values")) {
    p.source = "values";
    p.values = get_double_list(j, path, "values");
  } else {
    p.source = "scheme";
    // Validated against K when the data is known.
    p.scheme = pi_scheme_from_json(j["scheme"], path + ".scheme");
  }
  return p;
}

json diagnose_to_json(const DiagnoseParams& d) {
  json j;
  j["c"] = d.c;
  if (d.k_grid) j["k_grid"] = *d.k_grid;
  if (d.pi) j["pi"] = pi_source_to_json(*d.pi);
  if (d.weights) j["weights"] = *d.weights;
  return j;
}

DiagnoseParams diagnose_from_json(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"c", "k_grid", "pi", "weights"});
  DiagnoseParams d;
  d.c = get_double_or(j, path, "c", 1.0);
  if (!(d.c > 0.0))
    throw config_error("'" + path + ".c' must be positive");
  if (j.contains("k_grid")) {
    d.k_grid = get_int_list(j, path, "k_grid");
    for (std::size_t i = 0; i < d.k_grid->size(); ++i) {
      if ((*d.k_grid)[i] < 1)
        throw config_error("'" + path + ".k_grid' entries must be >= 1");
      if (i > 0 && (*d.k_grid)[i] <= (*d.k_grid)[i - 1])
        throw config_error("'" + path + ".k_grid' must be strictly ascending");
    }
  }
  if (j.contains("pi")) d.pi = pi_source_from_json(j["pi"], path + ".pi");
  if (j.contains("weights")) d.weights = get_double_list(j, path, "weights");
  return d;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& command) {
  if (command != "simulate" && command != "estimate" && command != "diagnose")
    throw config_error("command must be simulate, estimate or diagnose; got '" +
                       command + "'");
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config document is not valid JSON: ") +
                       e.what());
  }
  expect_object(j, "config");

  RunConfig rc;
  rc.command = command;
  if (j.contains("command")) {
    if (!j["command"].is_string() || j["command"].get<std::string>() != command)
      throw config_error("'config.command' (" + j["command"].dump() +
                         ") does not match the invoked subcommand '" + command + "'");
  }

  if (command == "simulate") {
    check_keys(j, "config", {"command", "scenario"});
    if (!j.contains("scenario"))
      throw config_error("simulate requires a 'scenario' section");
    rc.scenario = scenario_from_json(j["scenario"], "config.scenario");
  } else if (command == "estimate") {
    check_keys(j, "config", {"command", "estimators"});
    if (!j.contains("estimators") || !j["estimators"].is_array() ||
        j["estimators"].empty())
      throw config_error("estimate requires a non-empty 'estimators' array");
    int idx = 0;
    std::set<std::string> labels;
    for (const auto& e : j["estimators"]) {
      rc.estimators.push_back(estimator_spec_from_json(
          e, "config.estimators[" + std::to_string(idx) + "]"));
      if (!labels.insert(rc.estimators.back().label).second)
        throw config_error("estimator labels must be unique; '" +
                           rc.estimators.back().label + "' repeats");
      ++idx;
    }
  } else {
    check_keys(j, "config", {"command", "diagnose"});
    if (j.contains("diagnose"))
      rc.diagnose = diagnose_from_json(j["diagnose"], "config.diagnose");
  }
  return rc;
}

json config_to_json(const RunConfig& config) {
  json j;
  j["command"] = config.command;
  if (config.command == "simulate" && config.scenario)
    j["scenario"] = scenario_to_json(*config.scenario);
  if (config.command == "estimate") {
    json est = json::array();
    for (const auto& e : config.estimators) est.push_back(estimator_spec_to_json(e));
    j["estimators"] = est;
  }
  if (config.command == "diagnose") j["diagnose"] = diagnose_to_json(config.diagnose);
  return j;
}

std::string canonical_config(const RunConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

}  // namespace ivspectral
