#include "ivspectral/report.hpp"

#include <sstream>

#include "ivspectral/errors.hpp"
#include "ivspectral/io.hpp"
#include "ivspectral/version.hpp"

namespace ivspectral {

using nlohmann::json;

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json cell_stats_to_json(const CellStats& s) {
  json j;
  j["mean_bias"] = vector_to_json(s.mean_bias);
  j["median_bias"] = vector_to_json(s.median_bias);
  j["mad"] = vector_to_json(s.mad);
  j["mse"] = vector_to_json(s.mse);
  j["decile_range"] = vector_to_json(s.decile_range);
  j["failure_count"] = s.failure_count;
  j["n_success"] = s.n_success;
  return j;
}

std::string number_cell(const json& v) {
  if (v.is_null()) return "nan";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return format_double(v.get<double>());
}

}  // namespace

json estimator_result_to_json(const std::string& label,
                              const EstimatorResult& result) {
  json j;
  j["label"] = label;
  j["method"] = result.method;
  j["delta_hat"] = vector_to_json(result.delta_hat);
  j["scheme"] = result.scheme ? scheme_to_json(*result.scheme) : json(nullptr);
  j["diagnostics"] = result.diagnostics;
  return j;
}

json replication_stats_to_json(const ReplicationStats& stats) {
  json rows = json::array();
  for (std::size_t ni = 0; ni < stats.n_values.size(); ++ni) {
    for (std::size_t ei = 0; ei < stats.estimator_labels.size(); ++ei) {
      json row;
      row["estimator"] = stats.estimator_labels[ei];
      row["n"] = stats.n_values[ni];
      row["stats"] = cell_stats_to_json(stats.cells[ni][ei]);
      rows.push_back(row);
    }
  }
  return rows;
}

json diagnostics_to_json(const DiagnosticsReport& report) {
  json j;
  {
    json e;
    e["threshold"] = report.effective_count.threshold;
    e["count_effective"] = report.effective_count.count_effective;
    e["count_irrelevant"] = report.effective_count.count_irrelevant;
    e["indices_effective"] = report.effective_count.indices_effective;
    j["effective_count"] = e;
  }
  {
    json c;
    c["k_grid"] = report.cauchy_gap.k_grid;
    json q = json::array();
    for (const auto& m : report.cauchy_gap.q_values) q.push_back(matrix_to_json(m));
    c["q_values"] = q;
    c["gaps"] = report.cauchy_gap.gaps;
    c["verdict"] = report.cauchy_gap.verdict;
    j["cauchy_gap"] = c;
  }
  {
    json s;
    s["eigenvalues"] = vector_to_json(report.spectrum.eigenvalues);
    json tails;
    for (const auto& [m, v] : report.spectrum.tail_mass)
      tails[std::to_string(m)] = v;
    s["tail_mass"] = tails;
    s["flatness"] = report.spectrum.flatness;
    s["decay_fit"] = report.spectrum.decay_fit;
    s["nuclear_estimate"] = report.spectrum.nuclear_estimate;
    j["spectrum"] = s;
  }
  j["assumption3"] = report.assumption3;
  return j;
}

json build_report(const RunConfig& config, json results, json diagnostics,
                  std::uint64_t seed) {
  json j;
  j["config"] = config_to_json(config);
  j["results"] = std::move(results);
  j["diagnostics"] = std::move(diagnostics);
  j["version"] = kVersion;
  j["seed"] = seed;
  return j;
}

std::string render_report_json(const json& report) {
  return report.dump(2) + "\n";
}

std::string render_report_csv(const json& report) {
  const std::string command = report["config"]["command"].get<std::string>();
  std::ostringstream out;

  if (command == "simulate") {
    out << "estimator,n,coordinate,mean_bias,median_bias,mad,mse,decile_range,"
           "failure_count,n_success\n";
    for (const auto& row : report["results"]) {
      const json& s = row["stats"];
      const std::size_t g = s["mean_bias"].size();
      for (std::size_t j = 0; j < g; ++j) {
        out << row["estimator"].get<std::string>() << ','
            << row["n"].get<long long>() << ',' << j << ','
            << number_cell(s["mean_bias"][j]) << ','
            << number_cell(s["median_bias"][j]) << ','
            << number_cell(s["mad"][j]) << ',' << number_cell(s["mse"][j]) << ','
            << number_cell(s["decile_range"][j]) << ','
            << s["failure_count"].get<long long>() << ','
            << s["n_success"].get<long long>() << '\n';
      }
    }
    return out.str();
  }

  if (command == "estimate") {
    out << "label,method,coordinate,delta_hat,condition_number,effective_dof\n";
    for (const auto& row : report["results"]) {
      const json& d = row["diagnostics"];
      const std::size_t g = row["delta_hat"].size();
      for (std::size_t j = 0; j < g; ++j) {
        out << row["label"].get<std::string>() << ','
            << row["method"].get<std::string>() << ',' << j << ','
            << number_cell(row["delta_hat"][j]) << ','
            << (d.contains("condition_number")
                    ? number_cell(d["condition_number"])
                    : "")
            << ','
            << (d.contains("effective_dof") ? number_cell(d["effective_dof"])
                                            : "")
            << '\n';
      }
    }
    return out.str();
  }

  if (command == "diagnose") {
    out << "section,key,index,value\n";
    const json& d = report["diagnostics"];
    auto scalar = [&](const char* section, const char* key, const json& v) {
      out << section << ',' << key << ",," << number_cell(v) << '\n';
    };
    auto list = [&](const char* section, const char* key, const json& arr) {
      for (std::size_t i = 0; i < arr.size(); ++i)
        out << section << ',' << key << ',' << i << ',' << number_cell(arr[i])
            << '\n';
    };
    const json& e = d["effective_count"];
    scalar("effective_count", "threshold", e["threshold"]);
    scalar("effective_count", "count_effective", e["count_effective"]);
    scalar("effective_count", "count_irrelevant", e["count_irrelevant"]);
    list("effective_count", "indices_effective", e["indices_effective"]);
    const json& c = d["cauchy_gap"];
    list("cauchy_gap", "k_grid", c["k_grid"]);
    for (std::size_t i = 0; i < c["q_values"].size(); ++i) {
      const json& m = c["q_values"][i];
      for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t cc = 0; cc < m[r].size(); ++cc)
          out << "cauchy_gap,q_values[" << i << "](" << r << ';' << cc << "),,"
              << number_cell(m[r][cc]) << '\n';
    }
    list("cauchy_gap", "gaps", c["gaps"]);
    out << "cauchy_gap,verdict,," << c["verdict"].get<std::string>() << '\n';
    const json& s = d["spectrum"];
    list("spectrum", "eigenvalues", s["eigenvalues"]);
    for (const auto& item : s["tail_mass"].items())
      out << "spectrum,tail_mass," << item.key() << ','
          << number_cell(item.value()) << '\n';
    scalar("spectrum", "flatness", s["flatness"]);
    scalar("spectrum", "decay_fit", s["decay_fit"]);
    scalar("spectrum", "nuclear_estimate", s["nuclear_estimate"]);
    for (const auto& item : d["assumption3"].items())
      scalar("assumption3", item.key().c_str(), item.value());
    return out.str();
  }

  throw config_error("unknown command '" + command + "' in report");
}

}  // namespace ivspectral
