#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "coag/model_geometry.hpp"

namespace coag {

/// Residual of the exponent equation (1 + ln2 s / alpha)(1 - e^{-alpha}) - 2 (1 - e^{-alpha} 2^{-s}).
double sigma_residual(const ModelParams& params, double sigma) noexcept;

/// Unique positive root of sigma_residual. Scans (0, 64] for a sign change and
/// bisects to machine precision; throws ProfileError if no bracket exists.
double sigma_root(const ModelParams& params);

struct ShootingOptions {
  /// Grid step; 1/dx must be an integer so the unit delay is an exact index offset.
  double dx = 1.0 / 1024.0;
  /// Start of the table. Defaults to the largest grid point with
  /// a 2^{sigma x} < seed_threshold * plateau.
  std::optional<double> x_start;
  /// Hard stop of the integration. Defaults to x_start + 512.
  std::optional<double> x_end;
  double seed_threshold = 1e-8;
  /// Integration stops (and the table ends with an exact zero) once h drops below this.
  double underflow = 1e-16;
  /// Values below -negative_tolerance before underflow mean dx is too coarse.
  double negative_tolerance = 1e-12;
  /// Below this value the table continues with the integral form instead of the ODE.
  double tail_switch = 1e-6;
};

/// Unnormalized output of the shooting: the profile seeded with constant `a`.
struct RawProfile {
  ModelParams params;
  double a = 1.0;
  double sigma = 0.0;
  double x0 = 0.0;
  double dx = 0.0;
  std::vector<double> values;
  /// h'(x_i) from the stationary equation.
  std::vector<double> slopes;
};

/// Integrates the stationary delay equation left to right by the method of steps.
///
/// The first unit interval is seeded from the two-term asymptotics
/// plateau - a 2^{sigma x}; afterwards classical RK4 with the delayed value
/// read from the table (cubic Hermite at half steps).
RawProfile shoot_profile(const ModelParams& params, double a, const ShootingOptions& options = {});

/// Non-owning view of a tabulated profile on a uniform grid.
struct ProfileTableView {
  ModelParams params;
  double x0 = 0.0;
  double dx = 0.0;
  std::span<const double> values;
};

/// Constants of the fitted double-exponential tail bound h(x) <= C exp(-L 2^x).
struct TailFit {
  double C = 0.0;
  double L = 0.0;
  double x_from = 0.0;
  double x_to = 0.0;
};

/// Normalized stationary profile, immutable after construction.
///
/// Evaluation uses cubic Hermite interpolation with slopes from the stationary
/// equation. Left of the table the asymptotic form is used, right of it the
/// profile is zero.
class StationaryProfile {
 public:
  /// Rebuilds slopes and the tail fit from tabulated values (used by normalize and import).
  StationaryProfile(ModelParams params, double x0, double dx, std::vector<double> values,
                    double sigma, double a, double shift_applied);

  const ModelParams& params() const noexcept { return params_; }
  double x0() const noexcept { return x0_; }
  double dx() const noexcept { return dx_; }
  int cells_per_unit() const noexcept { return cells_per_unit_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> slopes() const noexcept { return slopes_; }
  double sigma() const noexcept { return sigma_; }
  double a() const noexcept { return a_; }
  double plateau() const noexcept { return params_.plateau(); }
  double shift_applied() const noexcept { return shift_; }
  const TailFit& tail() const noexcept { return tail_; }

  double x_at(std::size_t i) const noexcept { return x0_ + static_cast<double>(i) * dx_; }
  double x_last() const noexcept { return x_at(values_.size() - 1); }
  bool in_table(double x) const noexcept { return x >= x0_ && x <= x_last(); }
  ProfileTableView table() const noexcept { return {params_, x0_, dx_, values_}; }

  double operator()(double x) const noexcept;
  double derivative(double x) const noexcept;
  /// Asymptotic left extension plateau - a 2^{sigma (x + shift)}.
  double left_extension(double x) const noexcept;

  /// Trapezoid mass of e^{alpha x} h over the table plus the exact left tail.
  double weighted_mass() const noexcept;
  /// nu(theta) = sum_k e^{alpha (k + theta)} h(k + theta).
  double lattice_sum(double theta) const noexcept;

 private:
  ModelParams params_;
  double x0_;
  double dx_;
  int cells_per_unit_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  double sigma_;
  double a_;
  double shift_;
  TailFit tail_;
};

/// Weighted mass of a raw profile (table plus exact left tail).
double raw_weighted_mass(const RawProfile& raw);

/// Translates the raw profile by lambda = ln M / alpha so that its weighted mass is one.
/// Only x0 moves; grid values are untouched.
StationaryProfile normalize(const RawProfile& raw);

/// shoot_profile followed by normalize.
StationaryProfile build_profile(const ModelParams& params, double a = 1.0,
                                const ShootingOptions& options = {});

/// Least-squares fit of ln h against -2^x on [x_to - span, x_to] where x_to is the
/// last positive table point; C is raised to the envelope over the window.
TailFit fit_tail(const ProfileTableView& table, double span = 2.0);

struct IdentityCheck {
  double max_residual = 0.0;
  double worst_x = 0.0;
  std::size_t points = 0;
};

/// Checks e^{alpha x} h(x) = int_{x-1}^{x} h^2(t) e^{alpha t} dt at every grid point
/// with x - 1 inside the table and h(x) > 0. Residuals are relative to e^{alpha x} h(x).
/// The integral uses composite Simpson when 1/dx is even, trapezoid otherwise.
IdentityCheck validate_integral_identity(const ProfileTableView& table);

enum class Side { Right, LeftLimit };

struct FibreTrace {
  int k_min = 0;
  std::vector<double> phi;
  /// Number of entries that fell left of the table and used the asymptotic extension.
  std::size_t left_extended = 0;

  int k_max() const noexcept { return k_min + static_cast<int>(phi.size()) - 1; }
};

/// Values h(k + 1 - lambda - psi_value) for k in [k_min, k_max].
FibreTrace trace_at_phase(const StationaryProfile& profile, double lambda, double psi_value,
                          int k_min, int k_max);

/// Stationary fibre trace at time t. With Side::LeftLimit the phase at a jump time is 1.
FibreTrace fibre_trace(const StationaryProfile& profile, double theta, double lambda, double t,
                       int k_min, int k_max, Side side = Side::Right);

/// Index range outside of which e^{alpha k} times the trace is below `threshold`.
std::pair<int, int> trace_window(const StationaryProfile& profile, double lambda,
                                 double threshold = 1e-14);

/// CSV (x, hbar) plus a JSON sidecar with the scalar metadata.
void export_profile(const StationaryProfile& profile, const std::filesystem::path& csv_path,
                    const std::filesystem::path& json_path);
StationaryProfile import_profile(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& json_path);

}  // namespace coag
