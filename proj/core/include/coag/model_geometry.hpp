#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <span>

namespace coag {

/// Homogeneity of the diagonal kernel and the quantities derived from it.
///
/// Only `gamma` is an input; `alpha = (1 - gamma) ln 2` is always recomputed
/// from it. Construction rejects gamma >= 1.
class ModelParams {
 public:
  explicit ModelParams(double gamma = 0.0);

  double gamma() const noexcept { return gamma_; }
  double alpha() const noexcept { return alpha_; }
  /// e^{-alpha}, the weight of the delayed quadratic term.
  double decay() const noexcept { return decay_; }
  /// Left plateau of the stationary profile, alpha / (1 - e^{-alpha}).
  double plateau() const noexcept { return alpha_ / (1.0 - decay_); }

 private:
  double gamma_;
  double alpha_;
  double decay_;
};

/// v - floor(v), clamped so the result never equals 1.0.
double unit_fraction(double v) noexcept;

/// Fibre label of the point (t, x): fractional part of t + x.
inline double theta_of(double t, double x) noexcept { return unit_fraction(t + x); }

/// Sawtooth phase of fibre theta at time t: fractional part of t - theta.
/// Right-continuous, jumps from 1 to 0 at t = n + theta.
inline double psi(double t, double theta) noexcept { return unit_fraction(t - theta); }

/// Exact time on a fibre clock: t = period + frac with frac in [0, 1).
/// Jump times n + theta are represented as {n, theta} and never accumulated.
struct FibreClock {
  std::int64_t period = 0;
  double frac = 0.0;

  double value() const noexcept { return static_cast<double>(period) + frac; }
  static FibreClock from(double t) noexcept;

  friend bool operator==(const FibreClock&, const FibreClock&) = default;
  friend std::partial_ordering operator<=>(const FibreClock& a, const FibreClock& b) noexcept {
    if (a.period != b.period) return a.period <=> b.period;
    return a.frac <=> b.frac;
  }
};

/// b - a in time units.
double clock_difference(const FibreClock& b, const FibreClock& a) noexcept;
/// Phase psi(t, theta) evaluated from an exact clock.
double psi_of_clock(const FibreClock& clock, double theta) noexcept;

/// A point of the self-similar variables (tau, eta) with the value of G there.
struct SelfSimilarPoint {
  double tau;
  double eta;
  double G;
};

/// A point of the scaling-variable description (t, x) with the value of h there.
struct ScalingPoint {
  double t;
  double x;
  double h;
};

/// A point of the original variables (tau, xi) with the number density F there.
struct OriginalPoint {
  double tau;
  double xi;
  double F;
};

/// tau = e^{alpha t}, eta = x + t, G = e^{-alpha t} h / alpha.
SelfSimilarPoint h_to_G(double t, double x, double h_value, const ModelParams& params) noexcept;
/// Inverse of h_to_G; throws InvalidArgument for tau <= 0.
ScalingPoint G_to_h(double tau, double eta, double G_value, const ModelParams& params);
/// xi = 2^eta, F = 2^{-eta (1 + gamma)} G.
OriginalPoint G_to_F(double tau, double eta, double G_value, const ModelParams& params) noexcept;
/// Inverse of G_to_F; throws InvalidArgument for xi <= 0.
SelfSimilarPoint F_to_G(double tau, double xi, double F_value, const ModelParams& params);

/// Trapezoid quadrature of e^{alpha x} h(x) on a uniform grid starting at x0.
struct WeightedMass {
  double value = 0.0;
  /// Largest weighted end value e^{alpha x} h relative to the total.
  double boundary_fraction = 0.0;
  /// Set when boundary_fraction exceeds the tolerance (mass may be leaking).
  bool leak_suspected = false;
};

WeightedMass mass_integral_h(std::span<const double> h, double x0, double dx,
                             const ModelParams& params, double boundary_tolerance = 1e-10);

}  // namespace coag
