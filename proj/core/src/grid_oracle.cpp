#include "coag/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coag/errors.hpp"

namespace coag {

namespace {

void grid_rhs(const GridState& s, std::span<const double> h, std::span<double> out,
              const GridOptions& opt) {
  // h_x + alpha h = e^{-alpha x} (e^{alpha x} h)_x, upwinded as a whole. The weighted
  // sum of the transport term then telescopes and the weighted mass is conserved up to
  // the boundary flux, where a separate alpha h term would leak alpha^2 dx / 2 per unit time.
  const double lift = opt.linear_growth ? std::exp(s.params.alpha() * s.dx) : 1.0;
  const double decay = s.params.decay();
  const double inv_dx = 1.0 / s.dx;
  const std::size_t n = h.size();
  const auto P = static_cast<std::size_t>(s.P);
  for (std::size_t i = 0; i < n; ++i) {
    const double right = i + 1 < n ? h[i + 1] : 0.0;
    double r = (lift * right - h[i]) * inv_dx;
    if (opt.coagulation) {
      const double delayed = i >= P ? h[i - P] : s.left_pad;
      r += decay * delayed * delayed - h[i] * h[i];
    }
    out[i] = r;
  }
}

}  // namespace

GridState make_grid_state(const InitialData& h0, double x_left, double x_right, double dx,
                          const ModelParams& params, double left_pad) {
  const double inv = std::round(1.0 / dx);
  if (!(dx > 0.0) || std::abs(1.0 / dx - inv) > 1e-9 * inv) {
    throw InvalidArgument("make_grid_state: 1/dx must be an integer");
  }
  if (!(x_right > x_left + 1.0)) throw InvalidArgument("make_grid_state: domain too small");
  if (!(left_pad >= 0.0) || !std::isfinite(left_pad)) {
    throw InvalidArgument("make_grid_state: left_pad must be finite and nonnegative");
  }
  GridState s{
      .params = params, .dx = dx, .P = static_cast<int>(inv), .h = {}, .t = 0.0, .left_pad = left_pad};
  s.x0 = std::floor(x_left / dx) * dx;
  const auto n = static_cast<std::size_t>(std::ceil((x_right - s.x0) / dx)) + 1;
  s.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = h0(s.x_at(i));
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("make_grid_state: initial data must be finite and nonnegative");
    }
    s.h[i] = v;
  }
  return s;
}

void step_grid(GridState& s, double dt, const GridOptions& opt) {
  if (!(dt > 0.0)) throw InvalidArgument("step_grid: dt must be positive");
  if (dt > s.dx * (1.0 + 1e-12)) throw InvalidArgument("step_grid: CFL violation, dt > dx");
  const std::size_t n = s.h.size();
  thread_local std::vector<double> k1, k2, k3, k4, tmp;
  for (auto* v : {&k1, &k2, &k3, &k4, &tmp}) v->resize(n);
  grid_rhs(s, s.h, k1, opt);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = s.h[i] + 0.5 * dt * k1[i];
  grid_rhs(s, tmp, k2, opt);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = s.h[i] + 0.5 * dt * k2[i];
  grid_rhs(s, tmp, k3, opt);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = s.h[i] + dt * k3[i];
  grid_rhs(s, tmp, k4, opt);
  for (std::size_t i = 0; i < n; ++i) {
    double v = s.h[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (v < 0.0) {
      if (v < -opt.negative_tolerance) {
        throw InstabilityError("step_grid: negative overshoot " + std::to_string(v));
      }
      v = 0.0;
    }
    s.h[i] = v;
  }
  s.t += dt;
}

void evolve_grid(GridState& s, double horizon, double dt, const GridOptions& opt) {
  // count steps from the start so t lands exactly on the horizon
  const double span = horizon - s.t;
  if (span <= 0.0) return;
  const auto steps = static_cast<long>(std::ceil(span / dt - 1e-9));
  const double t_start = s.t;
  for (long j = 0; j < steps; ++j) {
    const double target = j + 1 == steps ? horizon : t_start + static_cast<double>(j + 1) * dt;
    step_grid(s, target - s.t, opt);
    s.t = target;
  }
}

WeightedMass grid_weighted_mass(const GridState& s) {
  return mass_integral_h(s.h, s.x0, s.dx, s.params);
}

double grid_value_at(const GridState& s, double x) {
  const double u = (x - s.x0) / s.dx;
  const double nearest = std::round(u);
  if (std::abs(u - nearest) < 1e-9) {
    if (nearest < 0.0 || nearest > static_cast<double>(s.h.size() - 1)) return 0.0;
    return s.h[static_cast<std::size_t>(nearest)];
  }
  if (u < 0.0 || u > static_cast<double>(s.h.size() - 1)) return 0.0;
  const auto i = static_cast<std::size_t>(u);
  const double f = u - static_cast<double>(i);
  return (1.0 - f) * s.h[i] + f * s.h[i + 1];
}

FibreGridDiscrepancy compare_with_fibres(const GridState& grid, std::span<const FibreState> fibres,
                                         double x_min) {
  FibreGridDiscrepancy out;
  if (fibres.empty()) return out;
  const double alpha = grid.params.alpha();
  for (const auto& f : fibres) {
    const double offset = 1.0 - f.psi();
    for (int k = f.k_min; k <= f.k_max(); ++k) {
      const double x = k + offset;
      if (x < x_min || x < grid.x0 || x > grid.x_last()) continue;
      const double u = (x - grid.x0) / grid.dx;
      if (std::abs(u - std::round(u)) >= 1e-9) ++out.interpolated;
      const double diff = std::abs(f.at(k) - grid_value_at(grid, x));
      out.sup = std::max(out.sup, diff);
      out.weighted_l1 += std::exp(alpha * x) * diff;
      ++out.points;
    }
  }
  out.weighted_l1 /= static_cast<double>(fibres.size());
  return out;
}

OriginalSnapshot to_original_variables(const GridState& s) {
  OriginalSnapshot out;
  const std::size_t n = s.h.size();
  out.eta.resize(n);
  out.xi.resize(n);
  out.G.resize(n);
  out.F.resize(n);
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = h_to_G(s.t, s.x_at(i), s.h[i], s.params);
    const auto o = G_to_F(g.tau, g.eta, g.G, s.params);
    out.tau = g.tau;
    out.eta[i] = g.eta;
    out.G[i] = g.G;
    out.xi[i] = o.xi;
    out.F[i] = o.F;
    const double integrand = o.xi * o.F * o.xi * std::numbers::ln2;
    mass += (i == 0 || i + 1 == n) ? 0.5 * integrand : integrand;
  }
  if (n == 0) out.tau = std::exp(s.params.alpha() * s.t);
  out.mass_original = mass * s.dx;
  out.mass_h = grid_weighted_mass(s).value;
  return out;
}

}  // namespace coag
