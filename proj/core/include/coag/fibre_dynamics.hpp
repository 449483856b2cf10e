#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "coag/model_geometry.hpp"

namespace coag {

/// Initial data h0(x) sampled along fibres.
using InitialData = std::function<double(double)>;

/// Default boundary threshold on e^{alpha k} phi_k.
inline constexpr double kWindowThreshold = 1e-14;

/// One theta-fibre: phi_k(t) = h(t, k + 1 - psi(t, theta)) on an index window.
struct FibreState {
  ModelParams params;
  double theta = 0.0;
  FibreClock clock;
  /// phi holds the left limit at the jump time `clock`; the jump is still pending.
  bool left_limit = false;
  int k_min = 0;
  /// Entries left of k_floor are dropped after a jump (their weight is below threshold).
  int k_floor = 0;
  std::vector<double> phi;
  /// Fibre mass sum_k e^{alpha (k + theta)} h0(k + theta).
  double m0 = 0.0;
  /// Sup of the initial data on this fibre.
  double C0 = 0.0;
  /// Sum of magnitudes of negative roundoff clamped to zero.
  double clamp_total = 0.0;
  double threshold = kWindowThreshold;

  int k_max() const noexcept { return k_min + static_cast<int>(phi.size()) - 1; }
  double at(int k) const noexcept {
    return (k < k_min || k > k_max()) ? 0.0 : phi[static_cast<std::size_t>(k - k_min)];
  }
  double time() const noexcept { return clock.value(); }
  /// Phase; 1 while the left limit at a jump time is held.
  double psi() const noexcept { return left_limit ? 1.0 : psi_of_clock(clock, theta); }
  /// Uniform bound max{C0, alpha / (1 - e^{-alpha})}.
  double c0() const noexcept;
  /// sum_k e^{alpha k} phi_k
  double weighted_mass() const noexcept;
  /// e^{alpha (psi - 1)} m0, the value weighted_mass() must track.
  double expected_mass() const noexcept;
};

/// Smallest index window [k_min, k_max] outside of which e^{alpha (k + theta)} h0(k + theta)
/// stays below `threshold` (scanned up to `search` indices each way).
std::pair<int, int> required_window(const InitialData& h0, double theta, const ModelParams& params,
                                    double threshold = kWindowThreshold, int search = 4096);

/// phi_k(0) = h0(k + theta). For theta = 0 the state starts as the left limit at the
/// jump time t = 0. Throws WindowError if the boundary weights exceed the threshold.
FibreState init_fibre(const InitialData& h0, double theta, int k_min, int k_max,
                      const ModelParams& params, double threshold = kWindowThreshold);

/// rhs_k = alpha phi_k + e^{-alpha} phi_{k-1}^2 - phi_k^2, with phi_{k_min - 1} = 0.
void ode_rhs(const ModelParams& params, std::span<const double> phi, std::span<double> out);
std::vector<double> ode_rhs(const FibreState& state);

enum class IntegratorMode {
  /// RK4 on phi directly.
  Direct,
  /// RK4 on rho_k = e^{-alpha (psi - 1)} phi_k, whose weighted mass is exactly m0.
  Rho,
};

/// One classical RK4 step of length dt. The caller guarantees no jump time is crossed.
/// Negative roundoff is clamped and accounted; throws InstabilityError if any value
/// exceeds 2 c0. Extends the window to the right when the boundary weight requires it.
void step(FibreState& state, double dt, IntegratorMode mode = IntegratorMode::Direct);

/// Index shift at a jump time: new phi_k = old phi_{k+1} (pure relabeling, k_min
/// decreases by one). Throws WindowError if a dropped left entry carries weight.
void apply_jump(FibreState& state);

enum class SampleKind { Initial, PreJump, PostJump, MidPeriod, Uniform, Final };

using SampleObserver = std::function<void(const FibreState&, SampleKind)>;

struct EvolveOptions {
  double dt_max = 1.0 / 256.0;
  IntegratorMode mode = IntegratorMode::Direct;
  bool sample_initial = true;
  bool sample_jumps = true;
  bool sample_midperiod = true;
  bool sample_final = true;
  /// Additional samples at multiples of this spacing (0 disables).
  double sample_spacing = 0.0;
};

/// Advances to absolute time `horizon`, landing exactly on every jump time n + theta.
/// A jump falling exactly on the horizon is applied (states are right-continuous).
void evolve(FibreState& state, double horizon, const EvolveOptions& options = {},
            const SampleObserver& observer = {});

struct FibreSample {
  double t = 0.0;
  double psi = 0.0;
  SampleKind kind = SampleKind::Initial;
  int k_min = 0;
  std::vector<double> phi;
  double weighted_mass = 0.0;
  double expected_mass = 0.0;
};

struct FibreTrajectory {
  double theta = 0.0;
  std::vector<FibreSample> samples;
};

FibreSample snapshot(const FibreState& state, SampleKind kind);

/// evolve() with every observed state recorded.
FibreTrajectory evolve_recorded(FibreState& state, double horizon,
                                const EvolveOptions& options = {});

/// sum over |k| >= N of e^{alpha k} phi_k
double tail_mass(const FibreState& state, int N);

/// max_k phi_k <= max{C0, plateau} (1 + 1e-10)
bool sup_bound_check(const FibreState& state, double C0);

/// Streams samples as rows `theta,t,k,phi`.
void write_trajectory_csv(std::ostream& os, const FibreTrajectory& trajectory,
                          bool header = true);

const char* to_string(SampleKind kind) noexcept;

}  // namespace coag
