#include "coag/model_geometry.hpp"

#include <algorithm>
#include <numbers>

#include "coag/errors.hpp"

namespace coag {

ModelParams::ModelParams(double gamma) : gamma_(gamma) {
  if (!std::isfinite(gamma) || gamma >= 1.0) {
    throw InvalidArgument("homogeneity gamma must be finite and < 1");
  }
  alpha_ = (1.0 - gamma_) * std::numbers::ln2;
  decay_ = std::exp(-alpha_);
}

double unit_fraction(double v) noexcept {
  double f = v - std::floor(v);
  // v slightly below an integer can round to exactly 1.0
  if (f >= 1.0 || f < 0.0) f = 0.0;
  return f;
}

FibreClock FibreClock::from(double t) noexcept {
  const double whole = std::floor(t);
  FibreClock c{static_cast<std::int64_t>(whole), t - whole};
  if (c.frac >= 1.0) {
    c.period += 1;
    c.frac = 0.0;
  }
  return c;
}

double clock_difference(const FibreClock& b, const FibreClock& a) noexcept {
  return static_cast<double>(b.period - a.period) + (b.frac - a.frac);
}

double psi_of_clock(const FibreClock& clock, double theta) noexcept {
  const double d = clock.frac - theta;
  return d >= 0.0 ? unit_fraction(d) : unit_fraction(d + 1.0);
}

SelfSimilarPoint h_to_G(double t, double x, double h_value, const ModelParams& params) noexcept {
  const double a = params.alpha();
  return {std::exp(a * t), x + t, std::exp(-a * t) * h_value / a};
}

ScalingPoint G_to_h(double tau, double eta, double G_value, const ModelParams& params) {
  if (!(tau > 0.0)) throw InvalidArgument("G_to_h: tau must be positive");
  const double a = params.alpha();
  const double t = std::log(tau) / a;
  return {t, eta - t, a * G_value * tau};
}

OriginalPoint G_to_F(double tau, double eta, double G_value, const ModelParams& params) noexcept {
  return {tau, std::exp2(eta), G_value * std::exp2(-eta * (1.0 + params.gamma()))};
}

SelfSimilarPoint F_to_G(double tau, double xi, double F_value, const ModelParams& params) {
  if (!(xi > 0.0)) throw InvalidArgument("F_to_G: cluster size must be positive");
  const double eta = std::log2(xi);
  return {tau, eta, F_value * std::exp2(eta * (1.0 + params.gamma()))};
}

WeightedMass mass_integral_h(std::span<const double> h, double x0, double dx,
                             const ModelParams& params, double boundary_tolerance) {
  if (!(dx > 0.0)) throw InvalidArgument("mass_integral_h: dx must be positive");
  WeightedMass out;
  if (h.empty()) return out;
  const double a = params.alpha();
  double sum = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double w = std::exp(a * (x0 + static_cast<double>(i) * dx)) * h[i];
    sum += (i == 0 || i + 1 == h.size()) ? 0.5 * w : w;
  }
  out.value = sum * dx;
  const double left = std::exp(a * x0) * std::abs(h.front());
  const double right =
      std::exp(a * (x0 + static_cast<double>(h.size() - 1) * dx)) * std::abs(h.back());
  const double edge = std::max(left, right);
  if (out.value != 0.0) {
    out.boundary_fraction = edge / std::abs(out.value);
  } else if (edge > 0.0) {
    out.boundary_fraction = 1.0;
  }
  out.leak_suspected = out.boundary_fraction > boundary_tolerance;
  return out;
}

}  // namespace coag
