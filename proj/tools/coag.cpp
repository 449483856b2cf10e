// coag: run one experiment scenario from a JSON config.
//
//   coag run <scenario> --config <path> [--out <dir>] [--gamma <g>] [--horizon <T>] [--fibres <Q>]
//
// Writes report.json, one CSV per table and one SVG per plot into the output directory.
// Exit status: 0 when every verdict passes, 1 when a verdict fails, 2 on usage or
// configuration errors, 3 when the computation itself fails.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coag/errors.hpp"
#include "coag/experiments.hpp"
#include "coag/report_io.hpp"
#include "coag/svg_plot.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Diagonal-kernel coagulation lab"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario");
  std::string scenario;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<double> gamma;
  std::optional<double> horizon;
  std::optional<int> fibres;
  run->add_option("scenario", scenario,
                  "stationary-validate | converge-constant-m0 | oscillate | uniqueness | oracle-compare")
      ->required();
  run->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--gamma", gamma, "homogeneity gamma < 1");
  run->add_option("--horizon", horizon, "final time T");
  run->add_option("--fibres", fibres, "number of fibres Q");

  CLI11_PARSE(app, argc, argv);

  coag::ExperimentConfig config;
  try {
    config = coag::load_config(config_path);
    config.scenario = coag::scenario_from_string(scenario);
    if (out_dir) config.output_dir = *out_dir;
    if (gamma) config.gamma = *gamma;
    if (horizon) config.horizon = *horizon;
    if (fibres) config.fibres = *fibres;
    config.validate();
  } catch (const coag::Error& e) {
    std::cerr << "coag: " << e.what() << '\n';
    return 2;
  }

  try {
    auto report = coag::run_scenario(config);
    const auto plots = coag::emit_plots(report, config.output_dir);
    if (!plots.warning.empty()) std::cerr << "coag: warning: " << plots.warning << '\n';
    coag::write_report(report, config.output_dir);

    for (const auto& v : report.verdicts) {
      std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << v.value << ' '
                << v.comparison << ' ';
      if (v.comparison == "band") std::cout << v.target << " +- ";
      std::cout << v.tolerance << '\n';
    }
    std::cout << "wrote " << report.files.size() << " files to " << config.output_dir.string()
              << '\n';
    return report.all_passed() ? 0 : 1;
  } catch (const coag::ProfileError& e) {
    std::cerr << "coag: profile construction failed: " << e.what() << '\n';
    return 3;
  } catch (const coag::WindowError& e) {
    std::cerr << "coag: " << e.what() << '\n';
    return 3;
  } catch (const coag::Error& e) {
    std::cerr << "coag: " << e.what() << '\n';
    return 3;
  }
}
