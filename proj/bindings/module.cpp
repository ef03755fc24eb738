#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ivspectral/commands.hpp"
#include "ivspectral/config.hpp"
#include "ivspectral/diagnostics.hpp"
#include "ivspectral/dgp.hpp"
#include "ivspectral/errors.hpp"
#include "ivspectral/estimators.hpp"
#include "ivspectral/montecarlo.hpp"
#include "ivspectral/version.hpp"

namespace py = pybind11;
using namespace ivspectral;

namespace {

// Build config objects from JSON-like python dicts through the same strict
// parser the CLI uses.
DgpConfig dgp_config_from_dict(const py::dict& d) {
  const std::string text =
      py::str(py::module_::import("json").attr("dumps")(d));
  return dgp_from_json(nlohmann::json::parse(text), "dgp");
}

ScenarioConfig scenario_from_dict(const py::dict& d) {
  const std::string text =
      py::str(py::module_::import("json").attr("dumps")(d));
  return scenario_from_json(nlohmann::json::parse(text), "scenario");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Instrumental-variable estimators with spectral regularization "
            "and many-instruments diagnostics";
  m.attr("__version__") = kVersion;

  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<data_error>(m, "DataError", PyExc_ValueError);
  py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);

  // --- dgp ---
  py::class_<PiScheme>(m, "PiScheme")
      .def_static("fixed_support", &PiScheme::fixed_support,
                  py::arg("support_size"), py::arg("value"))
      .def_static("geometric_decay", &PiScheme::geometric_decay,
                  py::arg("base"), py::arg("ratio"))
      .def_static("weak", &PiScheme::weak, py::arg("scale"))
      .def_static("sparse", &PiScheme::sparse, py::arg("support_indices"),
                  py::arg("values"))
      .def_static("custom", &PiScheme::custom, py::arg("values"))
      .def_property_readonly("kind", &PiScheme::kind_name);

  py::class_<InstrumentDesign>(m, "InstrumentDesign")
      .def_static("iid_gaussian", &InstrumentDesign::iid_gaussian)
      .def_static("ar1_correlated", &InstrumentDesign::ar1_correlated,
                  py::arg("rho"))
      .def_static("factor", &InstrumentDesign::factor, py::arg("num_factors"),
                  py::arg("loadings_scale") = 1.0)
      .def_static("orthonormalized", &InstrumentDesign::orthonormalized)
      .def_static("continuum", &InstrumentDesign::continuum,
                  py::arg("base_dim"), py::arg("tau_grid"),
                  py::arg("quadrature_weights"))
      .def_static("continuum_default", &InstrumentDesign::continuum_default,
                  py::arg("base_dim") = 1)
      .def_property_readonly("kind", &InstrumentDesign::kind_name);

  py::class_<DgpConfig>(m, "DgpConfig")
      .def(py::init([](int n, int k, int g, const PiScheme& pi,
                       const InstrumentDesign& design,
                       std::vector<double> delta_true, double sigma_u,
                       std::vector<double> sigma_vu, double sigma_v) {
             DgpConfig c;
             c.n = n;
             c.k = k;
             c.g = g;
             c.pi = pi;
             c.design = design;
             c.delta_true = delta_true.empty()
                                ? std::vector<double>(g, 1.0)
                                : std::move(delta_true);
             c.sigma_u = sigma_u;
             c.sigma_vu = sigma_vu.empty() ? std::vector<double>(g, 0.0)
                                           : std::move(sigma_vu);
             c.sigma_v = sigma_v;
             c.validate();
             return c;
           }),
           py::arg("n"), py::arg("k"), py::arg("g") = 1, py::arg("pi"),
           py::arg("design") = InstrumentDesign::iid_gaussian(),
           py::arg("delta_true") = std::vector<double>{},
           py::arg("sigma_u") = 1.0,
           py::arg("sigma_vu") = std::vector<double>{},
           py::arg("sigma_v") = 1.0)
      .def_static("from_dict", &dgp_config_from_dict, py::arg("d"))
      .def_readonly("n", &DgpConfig::n)
      .def_readonly("k", &DgpConfig::k)
      .def_readonly("g", &DgpConfig::g)
      .def_readonly("delta_true", &DgpConfig::delta_true)
      .def_readonly("sigma_u", &DgpConfig::sigma_u)
      .def_readonly("sigma_vu", &DgpConfig::sigma_vu)
      .def_readonly("sigma_v", &DgpConfig::sigma_v)
      .def("gamma", &DgpConfig::gamma);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](Eigen::VectorXd y, Eigen::MatrixXd x, Eigen::MatrixXd z) {
             Dataset d;
             d.y = std::move(y);
             d.x = std::move(x);
             d.z = std::move(z);
             d.validate();
             return d;
           }),
           py::arg("y"), py::arg("x"), py::arg("z"))
      .def_readonly("y", &Dataset::y)
      .def_readonly("x", &Dataset::x)
      .def_readonly("z", &Dataset::z)
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("g", &Dataset::g)
      .def_property_readonly("k", &Dataset::k);

  m.def("materialize_pi", &materialize_pi, py::arg("scheme"), py::arg("k"),
        py::arg("n"));
  m.def("generate_instruments", &generate_instruments, py::arg("design"),
        py::arg("n"), py::arg("k"), py::arg("seed"));
  m.def("simulate_dataset", &simulate_dataset, py::arg("config"),
        py::arg("seed"));

  // --- estimators ---
  py::class_<EigenSystem>(m, "EigenSystem")
      .def_readonly("eigenvalues", &EigenSystem::eigenvalues)
      .def_readonly("eigenvectors", &EigenSystem::eigenvectors)
      .def_readonly("source_dim", &EigenSystem::source_dim);

  py::class_<RegularizationScheme>(m, "RegularizationScheme")
      .def_static("tikhonov", &RegularizationScheme::tikhonov, py::arg("alpha"))
      .def_static("spectral_cutoff", &RegularizationScheme::spectral_cutoff,
                  py::arg("threshold"))
      .def_static("principal_components",
                  &RegularizationScheme::principal_components, py::arg("m"))
      .def_static("landweber", &RegularizationScheme::landweber,
                  py::arg("iterations"), py::arg("step"))
      .def_property_readonly("kind", &RegularizationScheme::kind_name)
      .def_readonly("alpha", &RegularizationScheme::alpha)
      .def_readonly("threshold", &RegularizationScheme::threshold)
      .def_readonly("m", &RegularizationScheme::m)
      .def_readonly("iterations", &RegularizationScheme::iterations)
      .def_readonly("step", &RegularizationScheme::step);

  py::class_<EstimatorResult>(m, "EstimatorResult")
      .def_readonly("delta_hat", &EstimatorResult::delta_hat)
      .def_readonly("method", &EstimatorResult::method)
      .def_readonly("scheme", &EstimatorResult::scheme)
      .def_readonly("first_stage_fitted", &EstimatorResult::first_stage_fitted)
      .def_readonly("diagnostics", &EstimatorResult::diagnostics);

  m.def("eigensystem_of_gram", &eigensystem_of_gram, py::arg("z"));
  m.def("filter_factors", &filter_factors, py::arg("eigs"), py::arg("scheme"));
  m.def("projection_apply", &projection_apply, py::arg("z"), py::arg("v"));
  m.def("ols", &ols, py::arg("data"));
  m.def("tsls", &tsls, py::arg("data"));
  m.def("tsls_regularized", &tsls_regularized, py::arg("data"),
        py::arg("scheme"));
  m.def("select_alpha", &select_alpha, py::arg("data"), py::arg("scheme_kind"),
        py::arg("grid"));

  // --- diagnostics ---
  py::class_<EffectiveCountReport>(m, "EffectiveCountReport")
      .def_readonly("threshold", &EffectiveCountReport::threshold)
      .def_readonly("count_effective", &EffectiveCountReport::count_effective)
      .def_readonly("count_irrelevant", &EffectiveCountReport::count_irrelevant)
      .def_readonly("indices_effective",
                    &EffectiveCountReport::indices_effective);

  py::class_<CauchyGapReport>(m, "CauchyGapReport")
      .def_readonly("k_grid", &CauchyGapReport::k_grid)
      .def_readonly("q_values", &CauchyGapReport::q_values)
      .def_readonly("gaps", &CauchyGapReport::gaps)
      .def_readonly("verdict", &CauchyGapReport::verdict);

  py::class_<SpectrumReport>(m, "SpectrumReport")
      .def_readonly("eigenvalues", &SpectrumReport::eigenvalues)
      .def_readonly("tail_mass", &SpectrumReport::tail_mass)
      .def_readonly("flatness", &SpectrumReport::flatness)
      .def_readonly("decay_fit", &SpectrumReport::decay_fit)
      .def_readonly("nuclear_estimate", &SpectrumReport::nuclear_estimate);

  m.def("effective_count", &effective_count, py::arg("pi"), py::arg("n"),
        py::arg("c"));
  m.def("q_sequence",
        py::overload_cast<const Eigen::MatrixXd&, const Eigen::VectorXd&,
                          const std::vector<int>&>(&q_sequence),
        py::arg("z"), py::arg("pi"), py::arg("k_grid"));
  m.def("covariance_spectrum", &covariance_spectrum, py::arg("z"),
        py::arg("weights") = std::nullopt);
  m.def("assumption3_checks", &assumption3_checks, py::arg("data"),
        py::arg("pi"));
  m.def("default_k_grid", &default_k_grid, py::arg("k"));

  // --- montecarlo ---
  py::class_<CellStats>(m, "CellStats")
      .def_readonly("mean_bias", &CellStats::mean_bias)
      .def_readonly("median_bias", &CellStats::median_bias)
      .def_readonly("mad", &CellStats::mad)
      .def_readonly("mse", &CellStats::mse)
      .def_readonly("decile_range", &CellStats::decile_range)
      .def_readonly("failure_count", &CellStats::failure_count)
      .def_readonly("n_success", &CellStats::n_success);

  py::class_<ReplicationStats>(m, "ReplicationStats")
      .def_readonly("estimator_labels", &ReplicationStats::estimator_labels)
      .def_readonly("n_values", &ReplicationStats::n_values)
      .def_readonly("cells", &ReplicationStats::cells)
      .def("cell", &ReplicationStats::cell, py::arg("label"), py::arg("n"),
           py::return_value_policy::copy);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_static("from_dict", &scenario_from_dict, py::arg("d"))
      .def_readonly("replications", &ScenarioConfig::replications)
      .def_readonly("master_seed", &ScenarioConfig::master_seed);

  m.def("summarize", &summarize, py::arg("delta_table"), py::arg("delta_true"),
        py::arg("failure_count") = 0);
  m.def(
      "run_scenario",
      [](const ScenarioConfig& c, int threads) {
        py::gil_scoped_release release;
        return run_scenario(c, threads);
      },
      py::arg("config"), py::arg("threads") = 1);
}
