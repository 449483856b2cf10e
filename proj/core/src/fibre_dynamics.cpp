#include "coag/fibre_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "coag/errors.hpp"

namespace coag {

namespace {

double weight_scale(const FibreState& s) noexcept { return std::max(1.0, s.m0); }

// RK4 right side in the rho variables: g(t) (e^{-alpha} rho_{k-1}^2 - rho_k^2).
void rho_rhs(double decay, double factor, std::span<const double> rho, std::span<double> out) {
  double prev = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = rho[i];
    out[i] = factor * (decay * prev * prev - r * r);
    prev = r;
  }
}

void extend_right_if_needed(FibreState& s) {
  const double alpha = s.params.alpha();
  const double limit = s.threshold * weight_scale(s);
  auto weight = [&](int k) { return std::exp(alpha * k) * s.at(k); };
  int guard = 0;
  while (weight(s.k_max()) > limit || weight(s.k_max() - 1) > limit) {
    s.phi.insert(s.phi.end(), 4, 0.0);
    if (++guard > 1024) throw WindowError("fibre window grew without bound", s.k_min, s.k_max());
  }
}

}  // namespace

double FibreState::c0() const noexcept { return std::max(C0, params.plateau()); }

double FibreState::weighted_mass() const noexcept {
  const double alpha = params.alpha();
  double sum = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    sum += std::exp(alpha * (k_min + static_cast<int>(i))) * phi[i];
  }
  return sum;
}

double FibreState::expected_mass() const noexcept {
  return std::exp(params.alpha() * (psi() - 1.0)) * m0;
}

std::pair<int, int> required_window(const InitialData& h0, double theta, const ModelParams& params,
                                    double threshold, int search) {
  const double alpha = params.alpha();
  auto weight = [&](int k) { return std::exp(alpha * (k + theta)) * std::abs(h0(k + theta)); };
  int k_peak = 0;
  double peak = 0.0;
  for (int k = -search; k <= search; ++k) {
    const double w = weight(k);
    if (w > peak) {
      peak = w;
      k_peak = k;
    }
  }
  const double limit = threshold * std::max(1.0, peak);
  // a window edge needs two consecutive sub-threshold entries beyond it
  int k_hi = k_peak;
  for (int k = search; k > k_peak; --k) {
    if (weight(k) > limit) {
      k_hi = k;
      break;
    }
  }
  int k_lo = k_peak;
  for (int k = -search; k < k_peak; ++k) {
    if (weight(k) > limit) {
      k_lo = k;
      break;
    }
  }
  return {k_lo - 2, k_hi + 2};
}

FibreState init_fibre(const InitialData& h0, double theta, int k_min, int k_max,
                      const ModelParams& params, double threshold) {
  if (!(theta >= 0.0 && theta < 1.0)) throw InvalidArgument("init_fibre: theta must be in [0,1)");
  if (k_max < k_min + 2) throw InvalidArgument("init_fibre: window needs at least 3 entries");
  FibreState s{.params = params, .theta = theta, .threshold = threshold};
  s.k_min = k_min;
  s.left_limit = theta == 0.0;
  s.phi.resize(static_cast<std::size_t>(k_max - k_min + 1));
  const double alpha = params.alpha();
  for (int k = k_min; k <= k_max; ++k) {
    const double v = h0(k + theta);
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("init_fibre: initial data must be finite and nonnegative");
    }
    s.phi[static_cast<std::size_t>(k - k_min)] = v;
    s.m0 += std::exp(alpha * (k + theta)) * v;
    s.C0 = std::max(s.C0, v);
  }
  const double limit = threshold * weight_scale(s);
  auto weight = [&](int k) { return std::exp(alpha * (k + theta)) * s.at(k); };
  if (weight(k_max) > limit || weight(k_max - 1) > limit || weight(k_min) > limit) {
    const auto [lo, hi] = required_window(h0, theta, params, threshold);
    throw WindowError("init_fibre: boundary weight above threshold; window [" +
                          std::to_string(k_min) + "," + std::to_string(k_max) +
                          "] too small, need about [" + std::to_string(lo) + "," +
                          std::to_string(hi) + "]",
                      std::min(lo, k_min), std::max(hi, k_max));
  }
  const int floor_from_bound =
      static_cast<int>(std::floor(std::log(threshold / s.c0()) / alpha)) + 1;
  s.k_floor = std::min(k_min, floor_from_bound);
  return s;
}

void ode_rhs(const ModelParams& params, std::span<const double> phi, std::span<double> out) {
  const double alpha = params.alpha();
  const double decay = params.decay();
  double prev = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double p = phi[i];
    out[i] = alpha * p + decay * prev * prev - p * p;
    prev = p;
  }
}

std::vector<double> ode_rhs(const FibreState& state) {
  std::vector<double> out(state.phi.size());
  ode_rhs(state.params, state.phi, out);
  return out;
}

void step(FibreState& s, double dt, IntegratorMode mode) {
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
  if (s.left_limit) throw InvalidArgument("step: pending jump must be applied first");
  extend_right_if_needed(s);

  thread_local std::vector<double> y, k1, k2, k3, k4, tmp;
  const std::size_t n = s.phi.size();
  for (auto* v : {&y, &k1, &k2, &k3, &k4, &tmp}) v->resize(n);

  const double alpha = s.params.alpha();
  const double decay = s.params.decay();
  const double psi0 = s.psi();

  if (mode == IntegratorMode::Direct) {
    std::copy(s.phi.begin(), s.phi.end(), y.begin());
    ode_rhs(s.params, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    ode_rhs(s.params, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    ode_rhs(s.params, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    ode_rhs(s.params, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      s.phi[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  } else {
    const double to_rho = std::exp(-alpha * (psi0 - 1.0));
    for (std::size_t i = 0; i < n; ++i) y[i] = to_rho * s.phi[i];
    auto g = [&](double offset) { return std::exp(alpha * (psi0 + offset - 1.0)); };
    rho_rhs(decay, g(0.0), y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    rho_rhs(decay, g(0.5 * dt), tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    rho_rhs(decay, g(0.5 * dt), tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    rho_rhs(decay, g(dt), tmp, k4);
    const double to_phi = g(dt);
    for (std::size_t i = 0; i < n; ++i) {
      s.phi[i] = to_phi * (y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
  }

  const double bound = 2.0 * s.c0();
  for (double& v : s.phi) {
    if (!(std::abs(v) <= bound)) {
      throw InstabilityError("step: value " + std::to_string(v) + " exceeds 2 c0 = " +
                             std::to_string(bound));
    }
    if (v < 0.0) {
      s.clamp_total += -v;
      v = 0.0;
    }
  }

  s.clock.frac += dt;
  if (s.clock.frac >= 1.0) {
    s.clock.period += 1;
    s.clock.frac -= 1.0;
  }
}

void apply_jump(FibreState& s) {
  if (!s.left_limit) throw InvalidArgument("apply_jump: state is not at a jump time");
  s.k_min -= 1;
  const double alpha = s.params.alpha();
  const double limit = s.threshold * weight_scale(s);
  while (s.k_min < s.k_floor && !s.phi.empty()) {
    if (std::exp(alpha * s.k_min) * s.phi.front() > limit) {
      throw WindowError("apply_jump: left entry carries weight; extend the window", s.k_min,
                        s.k_max());
    }
    s.phi.erase(s.phi.begin());
    s.k_min += 1;
  }
  s.left_limit = false;
}

void evolve(FibreState& s, double horizon, const EvolveOptions& options,
            const SampleObserver& observer) {
  if (!(options.dt_max > 0.0)) throw InvalidArgument("evolve: dt_max must be positive");
  auto observe = [&](SampleKind kind) {
    if (observer) observer(s, kind);
  };
  const FibreClock end = FibreClock::from(horizon);
  const double theta = s.theta;
  const double mid_frac = theta + 0.5 < 1.0 ? theta + 0.5 : theta - 0.5;
  auto next_at = [&](double frac) {
    return s.clock.frac < frac ? FibreClock{s.clock.period, frac}
                               : FibreClock{s.clock.period + 1, frac};
  };
  const double spacing = options.sample_spacing;
  std::int64_t uniform_index = 0;
  if (spacing > 0.0) {
    uniform_index = static_cast<std::int64_t>(std::floor(s.time() / spacing)) + 1;
  }

  if (options.sample_initial) observe(SampleKind::Initial);

  for (;;) {
    if (s.left_limit) {
      if (s.clock > end) break;
      if (options.sample_jumps) observe(SampleKind::PreJump);
      apply_jump(s);
      if (options.sample_jumps) observe(SampleKind::PostJump);
    }
    if (!(s.clock < end)) break;

    const FibreClock jump = next_at(theta);
    const FibreClock mid = next_at(mid_frac);
    FibreClock target = std::min(jump, end);
    if (options.sample_midperiod) target = std::min(target, mid);
    FibreClock uniform{};
    if (spacing > 0.0) {
      uniform = FibreClock::from(static_cast<double>(uniform_index) * spacing);
      target = std::min(target, uniform);
    }

    while (s.clock < target) {
      const double remaining = clock_difference(target, s.clock);
      if (remaining <= options.dt_max * (1.0 + 1e-9)) {
        step(s, remaining, options.mode);
        s.clock = target;
      } else {
        step(s, options.dt_max, options.mode);
      }
    }

    if (target == jump) s.left_limit = true;
    if (options.sample_midperiod && target == mid) observe(SampleKind::MidPeriod);
    if (spacing > 0.0 && target == uniform) {
      // at a jump time the uniform sample is the right limit, taken after the jump
      if (!s.left_limit) observe(SampleKind::Uniform);
      ++uniform_index;
      if (s.left_limit) {
        if (options.sample_jumps) observe(SampleKind::PreJump);
        apply_jump(s);
        if (options.sample_jumps) observe(SampleKind::PostJump);
        observe(SampleKind::Uniform);
      }
    }
  }
  if (options.sample_final) observe(SampleKind::Final);
}

FibreSample snapshot(const FibreState& s, SampleKind kind) {
  return FibreSample{s.time(), s.psi(), kind, s.k_min, s.phi, s.weighted_mass(),
                     s.expected_mass()};
}

FibreTrajectory evolve_recorded(FibreState& state, double horizon, const EvolveOptions& options) {
  FibreTrajectory traj{state.theta, {}};
  evolve(state, horizon, options,
         [&](const FibreState& s, SampleKind kind) { traj.samples.push_back(snapshot(s, kind)); });
  return traj;
}

double tail_mass(const FibreState& s, int N) {
  const double alpha = s.params.alpha();
  double sum = 0.0;
  for (int k = s.k_min; k <= s.k_max(); ++k) {
    if (std::abs(k) >= N) sum += std::exp(alpha * k) * s.at(k);
  }
  return sum;
}

bool sup_bound_check(const FibreState& s, double C0) {
  const double c0 = std::max(C0, s.params.plateau());
  const double peak = s.phi.empty() ? 0.0 : *std::max_element(s.phi.begin(), s.phi.end());
  return peak <= c0 * (1.0 + 1e-10);
}

void write_trajectory_csv(std::ostream& os, const FibreTrajectory& trajectory, bool header) {
  if (header) os << "theta,t,k,phi\n";
  char buf[128];
  for (const auto& sample : trajectory.samples) {
    for (std::size_t i = 0; i < sample.phi.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g\n", trajectory.theta, sample.t,
                    sample.k_min + static_cast<int>(i), sample.phi[i]);
      os << buf;
    }
  }
}

const char* to_string(SampleKind kind) noexcept {
  switch (kind) {
    case SampleKind::Initial: return "initial";
    case SampleKind::PreJump: return "pre-jump";
    case SampleKind::PostJump: return "post-jump";
    case SampleKind::MidPeriod: return "mid-period";
    case SampleKind::Uniform: return "uniform";
    case SampleKind::Final: return "final";
  }
  return "unknown";
}

}  // namespace coag
