#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coag/diagnostics.hpp"
#include "coag/initial_data.hpp"
#include "coag/stationary_profile.hpp"

namespace coag {

enum class Scenario {
  StationaryValidate,
  ConvergeConstantM0,
  Oscillate,
  Uniqueness,
  OracleCompare,
};

Scenario scenario_from_string(const std::string& name);
std::string to_string(Scenario scenario);

/// Thresholds used by the verdicts. Every one is a calibration choice and is echoed
/// into the report next to the value it judged.
struct Tolerances {
  double sigma_residual = 1e-12;
  double identity_residual = 1e-5;
  double lattice_deviation = 1e-6;
  double mass_law = 1e-6;
  double clamp_total = 1e-10;
  double jump_relation = 1e-9;
  double lyapunov_ode_p90 = 1e-3;
  double lyapunov_slack = 1e-12;
  /// The dissipation identity is judged only where L >= this factor times the trace defect.
  double lyapunov_resolution = 1e3;
  double convergence_ratio = 0.01;
  double recurrence_ratio = 1e-3;
  double floor_factor = 10.0;
  double mu_relative = 0.02;
  double m0_formula = 1e-6;
  double uniqueness_sup = 1e-4;
  double oracle_sup = 5e-3;
  double oracle_slope = 1.0;
  double oracle_slope_band = 0.2;
  double oracle_mass_drift = 1e-3;
  double representation_mass = 1e-3;
  double change_of_variables = 1e-9;
  double collapse_sup = 5e-3;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::StationaryValidate;
  double gamma = 0.0;
  double horizon = 30.0;
  int fibres = 64;
  /// Minimal fibre window; widened automatically to what the data and trace need.
  std::optional<std::pair<int, int>> k_window;
  double dt_max = 1.0 / 256.0;
  /// Grid step of the oracle.
  double dx = 1.0 / 256.0;
  /// Grid step of the stationary profile table.
  double profile_dx = 1.0 / 1024.0;
  double profile_a = 1.0;
  InitialDataSpec initial;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  /// Time between distance samples.
  double sample_interval = 0.25;
  /// Number of theta samples for the lattice-sum check.
  int lattice_samples = 64;
  /// Uniqueness: the second profile uses a * 2^{sigma * shift} and a * ratio.
  double uniqueness_shift = 1.0;
  double uniqueness_ratio = 3.0;
  /// Oracle: refinement levels are 2 dx, dx, dx/2, ... (oracle_levels entries); the sup
  /// verdict is judged at dx. Grid domain [oracle_x_left, oracle_x_right].
  int oracle_levels = 3;
  double oracle_x_left = -40.0;
  double oracle_x_right = 12.0;
  Tolerances tolerances;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

/// Parses a JSON config. Unknown keys are rejected so typos do not pass silently.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

struct Verdict {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  /// How value is judged against tolerance: "<", "<=", ">", "band" (|value - target| <= tolerance).
  std::string comparison = "<";
  double target = 0.0;
  /// The statement of the theory the verdict operationalizes.
  std::string anchor;
};

Verdict make_verdict(std::string name, double value, std::string comparison, double tolerance,
                     std::string anchor, double target = 0.0);

/// Column-oriented numeric table, written as CSV.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Curve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string name;
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Curve> curves;
};

struct ExperimentReport {
  Scenario scenario = Scenario::StationaryValidate;
  ExperimentConfig config;
  std::vector<Verdict> verdicts;
  std::map<std::string, double> summary;
  std::vector<Table> tables;
  std::vector<Plot> plots;
  /// Files written by write_report / emit_plots, relative to the output directory.
  std::vector<std::string> files;

  bool all_passed() const noexcept;
  bool empty() const noexcept { return verdicts.empty() && tables.empty() && plots.empty(); }
};

/// Builds fibres at the given phases, each window wide enough for the data and for the
/// stationary trace with the fibre's own mass.
std::vector<FibreState> build_fibre_set(const InitialCondition& ic,
                                        const StationaryProfile& profile,
                                        const std::vector<double>& thetas,
                                        std::optional<std::pair<int, int>> min_window = {});

/// Advances every fibre to time t in parallel.
void evolve_set(std::vector<FibreState>& fibres, double t, const EvolveOptions& options = {});

/// (1/Q) sum_j e^{alpha (1 - psi_j)} sum_k e^{alpha k} |a_k - b_k| for two sets at equal phases.
double set_difference(std::span<const FibreState> a, std::span<const FibreState> b);

/// Shift minimizing one fibre's weighted distance to the stationary trace, searched in
/// [lo, hi] by a scan followed by golden-section refinement.
double best_fit_shift(const FibreState& fibre, const StationaryProfile& profile, double lo,
                      double hi);

ExperimentReport run_stationary_validate(const ExperimentConfig& config);
ExperimentReport run_converge_constant_m0(const ExperimentConfig& config);
ExperimentReport run_oscillate(const ExperimentConfig& config);
ExperimentReport run_uniqueness(const ExperimentConfig& config);
ExperimentReport run_oracle_compare(const ExperimentConfig& config);
ExperimentReport run_scenario(const ExperimentConfig& config);

}  // namespace coag
