// ivspectral: simulate / estimate / diagnose workflows for instrumental
// variable estimators with spectral regularization.
//
// Note on scales: regularization parameters act on the eigenvalues of the
// unnormalized Gram matrix Z'Z, so a Tikhonov alpha grows with
// N * (instrument scale)^2.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "ivspectral/commands.hpp"
#include "ivspectral/errors.hpp"
#include "ivspectral/io.hpp"
#include "ivspectral/version.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string data_path;
  std::string out_path;
  std::string format = "json";
  long long seed = -1;  // -1: keep the config's master_seed
  int threads = 1;
};

int run(const std::string& command, const CliArgs& args) {
  using namespace ivspectral;
  RunConfig config = parse_config(read_text_file(args.config_path), command);
  config.input_path = args.data_path;
  config.output_path = args.out_path;
  config.output_format = args.format;
  if (args.seed >= 0) {
    if (config.scenario)
      config.scenario->master_seed = static_cast<std::uint64_t>(args.seed);
  }
  if (args.threads < 1) throw config_error("--threads must be >= 1");

  nlohmann::json report = run_command(config, args.threads);
  write_text_file(config.output_path, render_report(config, report));
  return 0;
}

int error_exit(const std::string& type, const std::string& message,
               const std::string& out_path, int code) {
  nlohmann::json record;
  record["error"]["type"] = type;
  record["error"]["message"] = message;
  record["version"] = ivspectral::kVersion;
  const std::string text = record.dump(2) + "\n";
  std::cerr << text;
  if (!out_path.empty()) {
    try {
      ivspectral::write_text_file(out_path, text);
    } catch (...) {
      // stderr record already emitted
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ivspectral: instrumental-variable estimation with spectral "
               "regularization, many-instruments diagnostics and Monte Carlo "
               "experiments"};
  app.set_version_flag("--version", ivspectral::kVersion);
  app.require_subcommand(1);

  CliArgs args;
  auto add_common = [&](CLI::App* sub, bool needs_data) {
    sub->add_option("--config", args.config_path, "configuration document (JSON)")
        ->required();
    if (needs_data)
      sub->add_option("--data", args.data_path,
                      "input CSV with header y,x1..xG,z1..zK")
          ->required();
    sub->add_option("--out", args.out_path, "report output path")->required();
    sub->add_option("--format", args.format, "report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", args.seed, "override the scenario master seed");
  };

  CLI::App* sim = app.add_subcommand("simulate", "run a Monte Carlo scenario");
  add_common(sim, false);
  sim->add_option("--threads", args.threads,
                  "worker threads (stats are identical for any count)");

  CLI::App* est = app.add_subcommand("estimate", "estimate from a CSV dataset");
  add_common(est, true);

  CLI::App* diag = app.add_subcommand("diagnose",
                                      "many-instruments diagnostics for a dataset");
  add_common(diag, true);

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, args);
  } catch (const ivspectral::config_error& e) {
    return error_exit("config_error", e.what(), args.out_path, 2);
  } catch (const ivspectral::data_error& e) {
    return error_exit("data_error", e.what(), args.out_path, 3);
  } catch (const ivspectral::numeric_error& e) {
    return error_exit("numeric_error", e.what(), args.out_path, 4);
  } catch (const std::exception& e) {
    return error_exit("internal_error", e.what(), args.out_path, 1);
  }
}
