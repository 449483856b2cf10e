#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "coag/fibre_dynamics.hpp"
#include "coag/stationary_profile.hpp"

namespace coag {

/// lambda = ln(m0) / alpha; nullopt for a vacuous fibre (m0 == 0).
/// Throws InvalidArgument for negative or non-finite masses.
std::optional<double> lambda_of(double m0_value, const ModelParams& params);

/// Comparison of one fibre snapshot with the stationary trace shifted by lambda.
struct DiagnosticsSample {
  double theta = 0.0;
  double t = 0.0;
  /// sum_k e^{alpha k} (w_k)_+
  double L = 0.0;
  /// Dissipation sum_k e^{alpha k} (phi_k + trace_k) w_k [s+(w_k) - s+(w_{k+1})]
  double D = 0.0;
  /// sum_k e^{alpha k} |w_k|
  double dist = 0.0;
  /// sum_k e^{alpha k} w_k (zero when the masses match, then dist = 2 L)
  double signed_sum = 0.0;
  /// Fibre weighted mass sum_k e^{alpha k} phi_k
  double mass = 0.0;
  /// Trace weighted mass over the same index range
  double trace_mass = 0.0;
  double tail_N = 0.0;
};

/// Evaluates L, D, dist for phi (indices from k_min, phase psi_value) against the trace
/// h(k + 1 - lambda - psi). The index range is widened to cover the trace support.
DiagnosticsSample compare_to_trace(const ModelParams& params, int k_min,
                                   std::span<const double> phi, double psi_value,
                                   const StationaryProfile& profile, double lambda,
                                   int tail_N = 8);

DiagnosticsSample compare_to_trace(const FibreState& state, const StationaryProfile& profile,
                                   double lambda, int tail_N = 8);
DiagnosticsSample compare_to_trace(const FibreSample& sample, const ModelParams& params,
                                   double theta, const StationaryProfile& profile, double lambda,
                                   int tail_N = 8);

/// L for the mass-matched trace lambda(theta) = ln m0 / alpha (zero-mass fibres give
/// their own weighted mass).
double lyapunov(const FibreState& state, const StationaryProfile& profile);
double dissipation(const FibreState& state, const StationaryProfile& profile);

/// L and D directly from difference and sum arrays (w_k = phi_k - trace_k,
/// s_k = phi_k + trace_k), indices starting at k_min.
double lyapunov_from_difference(const ModelParams& params, int k_min, std::span<const double> w);
double dissipation_from_difference(const ModelParams& params, int k_min,
                                   std::span<const double> w, std::span<const double> s);

struct LyapunovSeriesPoint {
  double t = 0.0;
  double L = 0.0;
  double D = 0.0;
  /// Weighted defect of the stationary trace at this time (see trace_defect); 0 if unknown.
  double defect = 0.0;
};

/// sum_k e^{alpha k} |f(trace)_k - d/dt trace_k| over the fibre window and trace support,
/// with f the fibre right-hand side. The exact trace solves the fibre system, so this is
/// the amount by which the tabulated profile fails to, and it bounds how well
/// dL/dt = alpha L - D can be observed.
double trace_defect(const FibreState& state, const StationaryProfile& profile, double lambda);

struct LyapunovOdeCheck {
  double max_residual = 0.0;
  double p90_residual = 0.0;
  std::size_t points = 0;
  /// Interior points left out because L < resolution * defect.
  std::size_t unresolved = 0;
};

/// Relative residuals |(L[i+1] - L[i-1]) / (t[i+1] - t[i-1]) - (alpha L - D)| / L at the
/// interior points of a uniformly sampled, jump-free series. Points with
/// L < resolution * defect are skipped and counted in *unresolved.
std::vector<double> lyapunov_ode_residuals(std::span<const LyapunovSeriesPoint> series,
                                           const ModelParams& params, double resolution = 0.0,
                                           std::size_t* unresolved = nullptr);

/// Max and 90th percentile of lyapunov_ode_residuals.
LyapunovOdeCheck lyapunov_ode_check(std::span<const LyapunovSeriesPoint> series,
                                    const ModelParams& params, double resolution = 0.0);

/// Max and 90th percentile of an already pooled residual set.
LyapunovOdeCheck summarize_residuals(std::vector<double> residuals, std::size_t unresolved = 0);

/// True when the sequence is nonincreasing up to `relative_slack` of its first value.
bool nonincreasing(std::span<const double> sequence, double relative_slack = 1e-12);

struct ScatteredPoint {
  double x = 0.0;
  double h = 0.0;
};

/// Places every fibre value at x = k + 1 - psi(t, theta) and returns the points sorted by x.
std::vector<ScatteredPoint> reconstruct_h(std::span<const FibreState> fibres);

/// Midpoint-rule fibre labels theta_j = (j + 1/2) / Q.
std::vector<double> midpoint_thetas(int Q);

/// Weighted L1 distance of the reconstructed solution to h(x - mu(t, x)):
/// mean over fibres of e^{alpha (1 - psi)} sum_k e^{alpha k} |phi_k - trace_k|.
/// Vacuous fibres contribute their own weighted mass.
double theorem1_distance(std::span<const FibreState> fibres, const StationaryProfile& profile);

/// Same quadrature against a single shift h(x - lambda) for every fibre.
double shift_distance(std::span<const FibreState> fibres, const StationaryProfile& profile,
                      double lambda);

/// Per-fibre integrand of theorem1_distance.
double fibre_distance_term(const FibreState& fibre, const StationaryProfile& profile);

/// mu(t, x) = ln(m0(Theta(t, x))) / alpha; nullopt where the fibre mass vanishes.
std::optional<double> mu_of(double t, double x, const std::function<double(double)>& m0,
                            const ModelParams& params);

}  // namespace coag
