#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "coag/fibre_dynamics.hpp"
#include "coag/stationary_profile.hpp"

namespace coag {

/// Named initial-data families, each with a known fibre mass m0(theta).
///
///   shifted-profile    h0(x) = h(x - shift)                              m0 = e^{alpha shift}
///   modulated-profile  h0(x) = h(x - shift) (1 + eps sin 2 pi x)         m0 = e^{alpha shift} (1 + eps sin 2 pi theta)
///   random-modulated   h0(x) = h(x - shift) (1 + eps r(x)), r 1-periodic m0 = e^{alpha shift} (1 + eps r(theta))
///   perturbed-profile  h0(x) = h(x - shift) + eps (g(x) - e^{alpha} g(x + 1)),
///                      g(x) = h(x - shift) exp(-(x - center)^2 / (2 width^2))  m0 = e^{alpha shift}
///   gaussian-bump      h0(x) = amplitude exp(-(x - center)^2 / (2 width^2))  m0 by lattice sum
///   compact-block      h0(x) = amplitude on [center - width/2, center + width/2)  m0 by lattice sum
enum class Family {
  ShiftedProfile,
  ModulatedProfile,
  RandomModulated,
  PerturbedProfile,
  GaussianBump,
  CompactBlock,
};

struct InitialDataSpec {
  Family family = Family::ShiftedProfile;
  double shift = 0.0;
  double epsilon = 0.2;
  double center = 0.0;
  double width = 0.5;
  double amplitude = 1.0;
  /// Number of random harmonics of r (random-modulated only).
  int harmonics = 3;
  std::uint64_t seed = 1;
};

Family family_from_string(const std::string& name);
std::string to_string(Family family);

/// A sampler h0 together with its fibre mass m0(theta).
struct InitialCondition {
  InitialDataSpec spec;
  InitialData h0;
  std::function<double(double)> m0;
  /// True when m0 is the same for every theta.
  bool constant_m0 = false;
};

/// Throws InvalidArgument if the parameters would make h0 negative.
InitialCondition make_initial_condition(const InitialDataSpec& spec,
                                        std::shared_ptr<const StationaryProfile> profile);

/// sum_k e^{alpha (k + theta)} h0(k + theta) over |k| <= reach.
double lattice_mass(const InitialData& h0, double theta, const ModelParams& params,
                    int reach = 512);

}  // namespace coag
