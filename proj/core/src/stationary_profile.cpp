#include "coag/stationary_profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "coag/errors.hpp"

namespace coag {

namespace {

int cells_for_dx(double dx) {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw InvalidArgument("grid step must be positive");
  const double inv = 1.0 / dx;
  const double rounded = std::round(inv);
  if (rounded < 1.0 || std::abs(inv - rounded) > 1e-9 * rounded) {
    throw InvalidArgument("1/dx must be an integer");
  }
  return static_cast<int>(rounded);
}

// Right side of the stationary equation solved for h'.
inline double stationary_slope(double h, double h_delayed, double alpha, double decay) noexcept {
  return -alpha * h - decay * h_delayed * h_delayed + h * h;
}

inline double hermite(double h0, double h1, double d0, double d1, double dx, double s) noexcept {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * h0 + (s3 - 2 * s2 + s) * dx * d0 + (-2 * s3 + 3 * s2) * h1 +
         (s3 - s2) * dx * d1;
}

inline double hermite_derivative(double h0, double h1, double d0, double d1, double dx,
                                 double s) noexcept {
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * h0 + (6 * s2 - 6 * s) * -h1) / dx + (3 * s2 - 4 * s + 1) * d0 +
         (3 * s2 - 2 * s) * d1;
}

double left_tail_mass(const ModelParams& params, double sigma, double a_eff, double x0) {
  // int_{-inf}^{x0} e^{alpha x} (c - a_eff 2^{sigma x}) dx
  const double alpha = params.alpha();
  const double rate = alpha + sigma * std::numbers::ln2;
  return params.plateau() * std::exp(alpha * x0) / alpha -
         a_eff * std::exp(rate * x0) / rate;
}

double table_mass(const ModelParams& params, double x0, double dx, std::span<const double> v) {
  return mass_integral_h(v, x0, dx, params, std::numeric_limits<double>::infinity()).value;
}

// Forward shooting keeps only absolute accuracy, so once h is tiny its relative error
// grows without bound. Past the switch point the table is extended with
//   e^{alpha x} h(x) = int_{x-1}^{x} e^{alpha t} h(t)^2 dt,
// a sum of positive terms, using the fourth-order Gregory rule. The unknown endpoint
// enters quadratically and is taken from the small root.
void continue_tail(RawProfile& out, const ShootingOptions& options) {
  const int P = cells_for_dx(out.dx);
  const double dx = out.dx;
  const double alpha = out.params.alpha();
  const double decay = out.params.decay();
  auto& h = out.values;
  auto& d = out.slopes;
  const auto n = static_cast<std::size_t>(P);

  std::vector<double> w(n + 1, 1.0);
  if (P >= 6) {
    const double ends[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
    for (std::size_t k = 0; k < 3; ++k) {
      w[k] = ends[k];
      w[n - k] = ends[k];
    }
  } else {
    w[0] = w[n] = 0.5;
  }

  const double x_end = options.x_end.value_or(out.x0 + 512.0);
  for (std::size_t i = h.size();; ++i) {
    const double x = out.x0 + static_cast<double>(i) * dx;
    if (x > x_end) break;
    const std::size_t j0 = i - n;
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = out.x0 + static_cast<double>(j0 + k) * dx;
      const double v = h[j0 + k];
      sum += w[k] * std::exp(alpha * (t - x)) * v * v;
    }
    sum *= dx;
    const double b = w[n] * dx;
    const double disc = 1.0 - 4.0 * b * sum;
    if (!(disc > 0.0)) throw ProfileError("shoot_profile: tail continuation failed");
    const double next = 2.0 * sum / (1.0 + std::sqrt(disc));
    const double hd = h[j0 + 1];
    if (next < options.underflow) {
      h.push_back(0.0);
      d.push_back(stationary_slope(0.0, hd, alpha, decay));
      break;
    }
    h.push_back(next);
    d.push_back(stationary_slope(next, hd, alpha, decay));
  }
}

}  // namespace

double sigma_residual(const ModelParams& params, double sigma) noexcept {
  const double alpha = params.alpha();
  const double d = params.decay();
  return (1.0 + std::numbers::ln2 * sigma / alpha) * (1.0 - d) -
         2.0 * (1.0 - d * std::exp2(-sigma));
}

double sigma_root(const ModelParams& params) {
  constexpr double sigma_max = 64.0;
  constexpr double scan = 0.25;
  double lo = 0.0;
  double f_lo = sigma_residual(params, lo);
  double hi = 0.0;
  bool bracketed = false;
  for (double s = scan; s <= sigma_max; s += scan) {
    const double f = sigma_residual(params, s);
    if ((f_lo < 0.0) != (f < 0.0)) {
      hi = s;
      bracketed = true;
      break;
    }
    lo = s;
    f_lo = f;
  }
  if (!bracketed) throw ProfileError("sigma_root: no sign change on (0, 64]");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = sigma_residual(params, mid);
    if (f == 0.0) return mid;
    if ((f < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
    }
  }
  return std::abs(sigma_residual(params, lo)) <= std::abs(sigma_residual(params, hi)) ? lo : hi;
}

RawProfile shoot_profile(const ModelParams& params, double a, const ShootingOptions& options) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ProfileError("shoot_profile: a must be positive");
  const int P = cells_for_dx(options.dx);
  const double dx = options.dx;
  const double alpha = params.alpha();
  const double decay = params.decay();
  const double c = params.plateau();
  const double sigma = sigma_root(params);
  const double seed_limit = options.seed_threshold * c;

  double x_start = 0.0;
  if (options.x_start) {
    x_start = *options.x_start;
  } else {
    const double xs = std::log2(seed_limit / a) / sigma;
    x_start = std::floor(xs / dx) * dx;
  }
  if (!(a * std::exp2(sigma * x_start) < seed_limit)) {
    throw ProfileError("shoot_profile: x_start is not in the asymptotic regime");
  }
  const double x_end = options.x_end.value_or(x_start + 512.0);

  RawProfile out{params, a, sigma, x_start, dx, {}, {}};
  auto& h = out.values;
  auto& d = out.slopes;
  auto x_at = [&](long i) { return x_start + static_cast<double>(i) * dx; };
  auto asymptotic = [&](double x) { return c - a * std::exp2(sigma * x); };

  // seed [x_start, x_start + 1]
  for (long i = 0; i <= P; ++i) h.push_back(asymptotic(x_at(i)));
  for (long i = 0; i <= P; ++i) {
    const double hd = asymptotic(x_at(i) - 1.0);
    d.push_back(stationary_slope(h[i], hd, alpha, decay));
  }

  for (long i = P;; ++i) {
    if (x_at(i + 1) > x_end) break;
    const long j = i - P;
    const double hd0 = h[j];
    const double hd1 = h[j + 1];
    const double hdm = hermite(hd0, hd1, d[j], d[j + 1], dx, 0.5);
    const double hi = h[i];
    const double k1 = stationary_slope(hi, hd0, alpha, decay);
    const double k2 = stationary_slope(hi + 0.5 * dx * k1, hdm, alpha, decay);
    const double k3 = stationary_slope(hi + 0.5 * dx * k2, hdm, alpha, decay);
    const double k4 = stationary_slope(hi + dx * k3, hd1, alpha, decay);
    double next = hi + dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(next) || next > 2.0 * c) {
      throw ProfileError("shoot_profile: blow-up, seed constant or x_start invalid");
    }
    if (next < options.underflow) {
      if (next < -options.negative_tolerance) {
        throw ProfileError("shoot_profile: negative values before underflow, dx too coarse");
      }
      h.push_back(0.0);
      d.push_back(stationary_slope(0.0, hd1, alpha, decay));
      break;
    }
    h.push_back(next);
    d.push_back(stationary_slope(next, hd1, alpha, decay));
    if (next < options.tail_switch) {
      continue_tail(out, options);
      break;
    }
  }
  return out;
}

StationaryProfile::StationaryProfile(ModelParams params, double x0, double dx,
                                     std::vector<double> values, double sigma, double a,
                                     double shift_applied)
    : params_(params),
      x0_(x0),
      dx_(dx),
      cells_per_unit_(cells_for_dx(dx)),
      values_(std::move(values)),
      sigma_(sigma),
      a_(a),
      shift_(shift_applied) {
  if (values_.size() < static_cast<std::size_t>(cells_per_unit_) + 2) {
    throw ProfileError("profile table shorter than one unit interval");
  }
  const double alpha = params_.alpha();
  const double decay = params_.decay();
  slopes_.resize(values_.size());
  const auto P = static_cast<std::size_t>(cells_per_unit_);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double hd = i >= P ? values_[i - P] : left_extension(x_at(i) - 1.0);
    slopes_[i] = stationary_slope(values_[i], hd, alpha, decay);
  }
  tail_ = fit_tail(table());
}

double StationaryProfile::left_extension(double x) const noexcept {
  return params_.plateau() - a_ * std::exp2(sigma_ * (x + shift_));
}

double StationaryProfile::operator()(double x) const noexcept {
  if (x < x0_) return left_extension(x);
  const double u = (x - x0_) / dx_;
  const double last = static_cast<double>(values_.size() - 1);
  if (u >= last) return u == last ? values_.back() : 0.0;
  const auto i = static_cast<std::size_t>(u);
  const double s = u - static_cast<double>(i);
  return hermite(values_[i], values_[i + 1], slopes_[i], slopes_[i + 1], dx_, s);
}

double StationaryProfile::derivative(double x) const noexcept {
  if (x < x0_) {
    return -a_ * sigma_ * std::numbers::ln2 * std::exp2(sigma_ * (x + shift_));
  }
  const double u = (x - x0_) / dx_;
  const double last = static_cast<double>(values_.size() - 1);
  if (u >= last) return 0.0;
  const auto i = static_cast<std::size_t>(u);
  const double s = u - static_cast<double>(i);
  return hermite_derivative(values_[i], values_[i + 1], slopes_[i], slopes_[i + 1], dx_, s);
}

double StationaryProfile::weighted_mass() const noexcept {
  return table_mass(params_, x0_, dx_, values_) +
         left_tail_mass(params_, sigma_, a_ * std::exp2(sigma_ * shift_), x0_);
}

double StationaryProfile::lattice_sum(double theta) const noexcept {
  const double alpha = params_.alpha();
  // below k_lo the plateau contribution is under 1e-20
  const int k_lo = static_cast<int>(std::floor(std::log(1e-20 / plateau()) / alpha)) - 1;
  const int k_hi = static_cast<int>(std::ceil(x_last())) + 1;
  double sum = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double x = k + theta;
    sum += std::exp(alpha * x) * (*this)(x);
  }
  return sum;
}

double raw_weighted_mass(const RawProfile& raw) {
  return table_mass(raw.params, raw.x0, raw.dx, raw.values) +
         left_tail_mass(raw.params, raw.sigma, raw.a, raw.x0);
}

StationaryProfile normalize(const RawProfile& raw) {
  const double M = raw_weighted_mass(raw);
  if (!(M > 0.0) || !std::isfinite(M)) {
    throw ProfileError("normalize: weighted mass must be positive and finite");
  }
  const double lambda = std::log(M) / raw.params.alpha();
  return StationaryProfile(raw.params, raw.x0 - lambda, raw.dx, raw.values, raw.sigma, raw.a,
                           lambda);
}

StationaryProfile build_profile(const ModelParams& params, double a,
                                const ShootingOptions& options) {
  return normalize(shoot_profile(params, a, options));
}

TailFit fit_tail(const ProfileTableView& table, double span) {
  TailFit fit;
  const auto& v = table.values;
  std::size_t last = v.size();
  while (last > 0 && !(v[last - 1] > 0.0)) --last;
  if (last < 3) return fit;
  --last;
  const auto cells = static_cast<std::size_t>(std::llround(span / table.dx));
  const std::size_t first = last > cells ? last - cells : 0;
  // ln h = ln C - L u,  u = 2^x
  double su = 0, sy = 0, suu = 0, suy = 0;
  double n = 0;
  for (std::size_t i = first; i <= last; ++i) {
    const double u = std::exp2(table.x0 + static_cast<double>(i) * table.dx);
    const double y = std::log(v[i]);
    su += u;
    sy += y;
    suu += u * u;
    suy += u * y;
    n += 1;
  }
  const double denom = n * suu - su * su;
  if (denom == 0.0) return fit;
  const double slope = (n * suy - su * sy) / denom;
  fit.L = -slope;
  double logC = -std::numeric_limits<double>::infinity();
  for (std::size_t i = first; i <= last; ++i) {
    const double u = std::exp2(table.x0 + static_cast<double>(i) * table.dx);
    logC = std::max(logC, std::log(v[i]) + fit.L * u);
  }
  fit.C = std::exp(logC);
  fit.x_from = table.x0 + static_cast<double>(first) * table.dx;
  fit.x_to = table.x0 + static_cast<double>(last) * table.dx;
  return fit;
}

IdentityCheck validate_integral_identity(const ProfileTableView& table) {
  const int P = cells_for_dx(table.dx);
  const auto& v = table.values;
  const double alpha = table.params.alpha();
  const double dx = table.dx;
  IdentityCheck out;
  if (v.size() <= static_cast<std::size_t>(P)) return out;

  std::vector<double> f(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    f[i] = std::exp(alpha * (table.x0 + static_cast<double>(i) * dx)) * v[i] * v[i];
  }
  const bool simpson = P % 2 == 0;
  for (std::size_t i = static_cast<std::size_t>(P); i < v.size(); ++i) {
    if (!(v[i] > 0.0)) continue;
    const std::size_t j0 = i - static_cast<std::size_t>(P);
    double integral = 0.0;
    if (simpson) {
      for (std::size_t j = j0; j <= i; ++j) {
        const std::size_t offset = j - j0;
        const double w = (offset == 0 || j == i) ? 1.0 : (offset % 2 == 1 ? 4.0 : 2.0);
        integral += w * f[j];
      }
      integral *= dx / 3.0;
    } else {
      for (std::size_t j = j0; j <= i; ++j) integral += (j == j0 || j == i) ? 0.5 * f[j] : f[j];
      integral *= dx;
    }
    const double lhs = std::exp(alpha * (table.x0 + static_cast<double>(i) * dx)) * v[i];
    const double r = std::abs(lhs - integral) / lhs;
    ++out.points;
    if (r > out.max_residual) {
      out.max_residual = r;
      out.worst_x = table.x0 + static_cast<double>(i) * dx;
    }
  }
  return out;
}

FibreTrace trace_at_phase(const StationaryProfile& profile, double lambda, double psi_value,
                          int k_min, int k_max) {
  FibreTrace out;
  out.k_min = k_min;
  if (k_max < k_min) return out;
  out.phi.resize(static_cast<std::size_t>(k_max - k_min + 1));
  const double base = 1.0 - lambda - psi_value;
  for (int k = k_min; k <= k_max; ++k) {
    const double x = static_cast<double>(k) + base;
    if (x < profile.x0()) ++out.left_extended;
    out.phi[static_cast<std::size_t>(k - k_min)] = profile(x);
  }
  return out;
}

FibreTrace fibre_trace(const StationaryProfile& profile, double theta, double lambda, double t,
                       int k_min, int k_max, Side side) {
  double phase = psi(t, theta);
  if (side == Side::LeftLimit && phase == 0.0) phase = 1.0;
  return trace_at_phase(profile, lambda, phase, k_min, k_max);
}

std::pair<int, int> trace_window(const StationaryProfile& profile, double lambda,
                                 double threshold) {
  const double alpha = profile.params().alpha();
  const int k_lo = static_cast<int>(std::floor(std::log(threshold / profile.plateau()) / alpha));
  // trace entry k samples x in (k - lambda, k + 1 - lambda]
  const int k_hi = static_cast<int>(std::ceil(profile.x_last() + lambda));
  return {k_lo, std::max(k_lo, k_hi)};
}

void export_profile(const StationaryProfile& profile, const std::filesystem::path& csv_path,
                    const std::filesystem::path& json_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw Error("cannot open " + csv_path.string());
  csv << "x,hbar\n";
  char buf[96];
  for (std::size_t i = 0; i < profile.values().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", profile.x_at(i), profile.values()[i]);
    csv << buf;
  }
  nlohmann::json j;
  j["gamma"] = profile.params().gamma();
  j["alpha"] = profile.params().alpha();
  j["sigma"] = profile.sigma();
  j["a"] = profile.a();
  j["shift_applied"] = profile.shift_applied();
  j["x0"] = profile.x0();
  j["dx"] = profile.dx();
  j["plateau"] = profile.plateau();
  j["tail"] = {{"C", profile.tail().C}, {"L", profile.tail().L}};
  std::ofstream js(json_path);
  if (!js) throw Error("cannot open " + json_path.string());
  js << j.dump(2) << '\n';
}

StationaryProfile import_profile(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& json_path) {
  std::ifstream js(json_path);
  if (!js) throw Error("cannot open " + json_path.string());
  const auto j = nlohmann::json::parse(js);
  std::ifstream csv(csv_path);
  if (!csv) throw Error("cannot open " + csv_path.string());
  std::string line;
  std::getline(csv, line);
  std::vector<double> values;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error("malformed profile CSV row: " + line);
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  return StationaryProfile(ModelParams(j.at("gamma").get<double>()), j.at("x0").get<double>(),
                           j.at("dx").get<double>(), std::move(values),
                           j.at("sigma").get<double>(), j.at("a").get<double>(),
                           j.at("shift_applied").get<double>());
}

}  // namespace coag
