#include "coag/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "coag/errors.hpp"

namespace coag {

namespace {

inline double sign_plus(double v) noexcept { return v > 0.0 ? 1.0 : 0.0; }

}  // namespace

std::optional<double> lambda_of(double m0_value, const ModelParams& params) {
  if (!(m0_value >= 0.0) || !std::isfinite(m0_value)) {
    throw InvalidArgument("lambda_of: fibre mass must be finite and nonnegative");
  }
  if (m0_value == 0.0) return std::nullopt;
  return std::log(m0_value) / params.alpha();
}

double lyapunov_from_difference(const ModelParams& params, int k_min, std::span<const double> w) {
  const double alpha = params.alpha();
  double L = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) L += std::exp(alpha * (k_min + static_cast<int>(i))) * w[i];
  }
  return L;
}

double dissipation_from_difference(const ModelParams& params, int k_min,
                                   std::span<const double> w, std::span<const double> s) {
  const double alpha = params.alpha();
  double D = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double next = i + 1 < w.size() ? w[i + 1] : 0.0;
    const double bracket = sign_plus(w[i]) - sign_plus(next);
    if (bracket != 0.0) D += std::exp(alpha * (k_min + static_cast<int>(i))) * s[i] * w[i] * bracket;
  }
  return D;
}

DiagnosticsSample compare_to_trace(const ModelParams& params, int k_min,
                                   std::span<const double> phi, double psi_value,
                                   const StationaryProfile& profile, double lambda, int tail_N) {
  const int k_max = k_min + static_cast<int>(phi.size()) - 1;
  const auto [trace_lo, trace_hi] = trace_window(profile, lambda);
  (void)trace_lo;
  const int hi = std::max(k_max, trace_hi);
  const auto trace = trace_at_phase(profile, lambda, psi_value, k_min, hi);
  const std::size_t n = trace.phi.size();

  thread_local std::vector<double> w, s;
  w.resize(n);
  s.resize(n);
  DiagnosticsSample out;
  out.t = 0.0;
  const double alpha = params.alpha();
  for (std::size_t i = 0; i < n; ++i) {
    const double p = i < phi.size() ? phi[i] : 0.0;
    const double b = trace.phi[i];
    w[i] = p - b;
    s[i] = p + b;
    const int k = k_min + static_cast<int>(i);
    const double weight = std::exp(alpha * k);
    out.dist += weight * std::abs(w[i]);
    out.signed_sum += weight * w[i];
    out.mass += weight * p;
    out.trace_mass += weight * b;
    if (std::abs(k) >= tail_N) out.tail_N += weight * p;
  }
  out.L = lyapunov_from_difference(params, k_min, w);
  out.D = dissipation_from_difference(params, k_min, w, s);
  return out;
}

DiagnosticsSample compare_to_trace(const FibreState& state, const StationaryProfile& profile,
                                   double lambda, int tail_N) {
  auto out = compare_to_trace(state.params, state.k_min, state.phi, state.psi(), profile, lambda,
                              tail_N);
  out.theta = state.theta;
  out.t = state.time();
  return out;
}

DiagnosticsSample compare_to_trace(const FibreSample& sample, const ModelParams& params,
                                   double theta, const StationaryProfile& profile, double lambda,
                                   int tail_N) {
  auto out = compare_to_trace(params, sample.k_min, sample.phi, sample.psi, profile, lambda, tail_N);
  out.theta = theta;
  out.t = sample.t;
  return out;
}

double lyapunov(const FibreState& state, const StationaryProfile& profile) {
  const auto lambda = lambda_of(state.m0, state.params);
  if (!lambda) return state.weighted_mass();
  return compare_to_trace(state, profile, *lambda).L;
}

double dissipation(const FibreState& state, const StationaryProfile& profile) {
  const auto lambda = lambda_of(state.m0, state.params);
  if (!lambda) return 0.0;
  return compare_to_trace(state, profile, *lambda).D;
}

double trace_defect(const FibreState& state, const StationaryProfile& profile, double lambda) {
  const double alpha = state.params.alpha();
  const double decay = state.params.decay();
  const double base = 1.0 - lambda - state.psi();
  const int hi = std::max(state.k_max(), trace_window(profile, lambda).second);
  double defect = 0.0;
  double previous = profile(state.k_min - 1 + base);
  for (int k = state.k_min; k <= hi; ++k) {
    const double x = k + base;
    const double b = profile(x);
    // psi grows at unit speed, so d/dt hbar(k + 1 - lambda - psi) = -hbar'(x)
    const double rhs = alpha * b + decay * previous * previous - b * b;
    defect += std::exp(alpha * k) * std::abs(rhs + profile.derivative(x));
    previous = b;
  }
  return defect;
}

std::vector<double> lyapunov_ode_residuals(std::span<const LyapunovSeriesPoint> series,
                                           const ModelParams& params, double resolution,
                                           std::size_t* unresolved) {
  std::vector<double> residuals;
  if (series.size() < 3) return residuals;
  const double alpha = params.alpha();
  residuals.reserve(series.size() - 2);
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    const auto& p = series[i];
    if (!(p.L > 0.0) || p.L < resolution * p.defect) {
      if (unresolved) ++*unresolved;
      continue;
    }
    const double span = series[i + 1].t - series[i - 1].t;
    const double derivative = (series[i + 1].L - series[i - 1].L) / span;
    residuals.push_back(std::abs(derivative - (alpha * p.L - p.D)) / p.L);
  }
  return residuals;
}

LyapunovOdeCheck summarize_residuals(std::vector<double> residuals, std::size_t unresolved) {
  LyapunovOdeCheck out;
  out.unresolved = unresolved;
  out.points = residuals.size();
  if (residuals.empty()) return out;
  out.max_residual = *std::max_element(residuals.begin(), residuals.end());
  const auto rank =
      static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(residuals.size()))) - 1;
  std::nth_element(residuals.begin(), residuals.begin() + static_cast<std::ptrdiff_t>(rank),
                   residuals.end());
  out.p90_residual = residuals[rank];
  return out;
}

LyapunovOdeCheck lyapunov_ode_check(std::span<const LyapunovSeriesPoint> series,
                                    const ModelParams& params, double resolution) {
  std::size_t unresolved = 0;
  auto residuals = lyapunov_ode_residuals(series, params, resolution, &unresolved);
  return summarize_residuals(std::move(residuals), unresolved);
}

bool nonincreasing(std::span<const double> sequence, double relative_slack) {
  if (sequence.empty()) return true;
  const double slack = relative_slack * std::abs(sequence.front());
  for (std::size_t i = 1; i < sequence.size(); ++i) {
    if (sequence[i] > sequence[i - 1] + slack) return false;
  }
  return true;
}

std::vector<ScatteredPoint> reconstruct_h(std::span<const FibreState> fibres) {
  std::vector<ScatteredPoint> points;
  for (const auto& f : fibres) {
    const double offset = 1.0 - f.psi();
    for (int k = f.k_min; k <= f.k_max(); ++k) points.push_back({k + offset, f.at(k)});
  }
  std::sort(points.begin(), points.end(),
            [](const ScatteredPoint& a, const ScatteredPoint& b) { return a.x < b.x; });
  return points;
}

std::vector<double> midpoint_thetas(int Q) {
  if (Q < 1) throw InvalidArgument("midpoint_thetas: need at least one fibre");
  std::vector<double> out(static_cast<std::size_t>(Q));
  for (int j = 0; j < Q; ++j) out[static_cast<std::size_t>(j)] = (j + 0.5) / Q;
  return out;
}

double fibre_distance_term(const FibreState& fibre, const StationaryProfile& profile) {
  const double weight = std::exp(fibre.params.alpha() * (1.0 - fibre.psi()));
  const auto lambda = lambda_of(fibre.m0, fibre.params);
  if (!lambda) return weight * fibre.weighted_mass();
  return weight * compare_to_trace(fibre, profile, *lambda).dist;
}

namespace {

// Terms are computed in parallel but summed in fibre order so results do not depend
// on the thread count.
template <class Term>
double ordered_mean(std::span<const FibreState> fibres, Term term) {
  if (fibres.empty()) return 0.0;
  const auto n = static_cast<std::ptrdiff_t>(fibres.size());
  std::vector<double> terms(fibres.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const auto i = static_cast<std::size_t>(j);
    terms[i] = term(fibres[i]);
  }
  double sum = 0.0;
  for (double v : terms) sum += v;
  return sum / static_cast<double>(fibres.size());
}

}  // namespace

double theorem1_distance(std::span<const FibreState> fibres, const StationaryProfile& profile) {
  return ordered_mean(fibres,
                      [&](const FibreState& f) { return fibre_distance_term(f, profile); });
}

double shift_distance(std::span<const FibreState> fibres, const StationaryProfile& profile,
                      double lambda) {
  return ordered_mean(fibres, [&](const FibreState& f) {
    const double weight = std::exp(f.params.alpha() * (1.0 - f.psi()));
    return weight * compare_to_trace(f, profile, lambda).dist;
  });
}

std::optional<double> mu_of(double t, double x, const std::function<double(double)>& m0,
                            const ModelParams& params) {
  return lambda_of(m0(theta_of(t, x)), params);
}

}  // namespace coag
