#include "coag/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "coag/errors.hpp"

namespace coag {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct RandomPeriodic {
  std::vector<double> amplitude;
  std::vector<double> phase;

  double operator()(double x) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < amplitude.size(); ++j) {
      sum += amplitude[j] * std::sin(kTwoPi * static_cast<double>(j + 1) * x + phase[j]);
    }
    return sum;
  }
};

// Amplitudes sum to one so |r| <= 1.
RandomPeriodic make_random_periodic(int harmonics, std::uint64_t seed) {
  if (harmonics < 1) throw InvalidArgument("random-modulated needs at least one harmonic");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomPeriodic r;
  double total = 0.0;
  for (int j = 0; j < harmonics; ++j) {
    r.amplitude.push_back(0.1 + unit(rng));
    r.phase.push_back(kTwoPi * unit(rng));
    total += r.amplitude.back();
  }
  for (double& a : r.amplitude) a /= total;
  return r;
}

}  // namespace

Family family_from_string(const std::string& name) {
  if (name == "shifted-profile") return Family::ShiftedProfile;
  if (name == "modulated-profile") return Family::ModulatedProfile;
  if (name == "random-modulated") return Family::RandomModulated;
  if (name == "perturbed-profile") return Family::PerturbedProfile;
  if (name == "gaussian-bump") return Family::GaussianBump;
  if (name == "compact-block") return Family::CompactBlock;
  throw InvalidArgument("unknown initial-data family: " + name);
}

std::string to_string(Family family) {
  switch (family) {
    case Family::ShiftedProfile: return "shifted-profile";
    case Family::ModulatedProfile: return "modulated-profile";
    case Family::RandomModulated: return "random-modulated";
    case Family::PerturbedProfile: return "perturbed-profile";
    case Family::GaussianBump: return "gaussian-bump";
    case Family::CompactBlock: return "compact-block";
  }
  return "unknown";
}

double lattice_mass(const InitialData& h0, double theta, const ModelParams& params, int reach) {
  const double alpha = params.alpha();
  double sum = 0.0;
  for (int k = -reach; k <= reach; ++k) sum += std::exp(alpha * (k + theta)) * h0(k + theta);
  return sum;
}

InitialCondition make_initial_condition(const InitialDataSpec& spec,
                                        std::shared_ptr<const StationaryProfile> profile) {
  if (!profile) throw InvalidArgument("make_initial_condition: profile required");
  const ModelParams params = profile->params();
  const double alpha = params.alpha();
  const double shift = spec.shift;
  const double eps = spec.epsilon;
  const double base_mass = std::exp(alpha * shift);
  InitialCondition ic{spec, {}, {}, false};

  switch (spec.family) {
    case Family::ShiftedProfile:
      ic.h0 = [profile, shift](double x) { return (*profile)(x - shift); };
      ic.m0 = [base_mass](double) { return base_mass; };
      ic.constant_m0 = true;
      break;
    case Family::ModulatedProfile:
      if (!(std::abs(eps) < 1.0)) throw InvalidArgument("modulated-profile needs |epsilon| < 1");
      ic.h0 = [profile, shift, eps](double x) {
        return (*profile)(x - shift) * (1.0 + eps * std::sin(kTwoPi * x));
      };
      ic.m0 = [base_mass, eps](double theta) {
        return base_mass * (1.0 + eps * std::sin(kTwoPi * theta));
      };
      ic.constant_m0 = eps == 0.0;
      break;
    case Family::RandomModulated: {
      if (!(std::abs(eps) < 1.0)) throw InvalidArgument("random-modulated needs |epsilon| < 1");
      const auto r = make_random_periodic(spec.harmonics, spec.seed);
      ic.h0 = [profile, shift, eps, r](double x) {
        return (*profile)(x - shift) * (1.0 + eps * r(x));
      };
      ic.m0 = [base_mass, eps, r](double theta) { return base_mass * (1.0 + eps * r(theta)); };
      ic.constant_m0 = eps == 0.0;
      break;
    }
    case Family::PerturbedProfile: {
      const double lift = std::exp(alpha);
      if (!(eps >= 0.0 && eps * lift <= 1.0)) {
        throw InvalidArgument("perturbed-profile needs 0 <= epsilon <= e^{-alpha}");
      }
      if (!(spec.width > 0.0)) throw InvalidArgument("perturbed-profile needs width > 0");
      const double c = spec.center;
      const double w = spec.width;
      auto g = [profile, shift, c, w](double x) {
        const double z = (x - c) / w;
        return (*profile)(x - shift) * std::exp(-0.5 * z * z);
      };
      ic.h0 = [profile, shift, eps, lift, g](double x) {
        return (*profile)(x - shift) + eps * (g(x) - lift * g(x + 1.0));
      };
      ic.m0 = [base_mass](double) { return base_mass; };
      ic.constant_m0 = true;
      break;
    }
    case Family::GaussianBump: {
      if (!(spec.amplitude >= 0.0) || !(spec.width > 0.0)) {
        throw InvalidArgument("gaussian-bump needs amplitude >= 0 and width > 0");
      }
      const double A = spec.amplitude;
      const double c = spec.center;
      const double w = spec.width;
      ic.h0 = [A, c, w](double x) {
        const double z = (x - c) / w;
        return A * std::exp(-0.5 * z * z);
      };
      ic.m0 = [h0 = ic.h0, params](double theta) { return lattice_mass(h0, theta, params); };
      ic.constant_m0 = A == 0.0;
      break;
    }
    case Family::CompactBlock: {
      if (!(spec.amplitude >= 0.0) || !(spec.width > 0.0)) {
        throw InvalidArgument("compact-block needs amplitude >= 0 and width > 0");
      }
      const double A = spec.amplitude;
      const double lo = spec.center - 0.5 * spec.width;
      const double hi = spec.center + 0.5 * spec.width;
      ic.h0 = [A, lo, hi](double x) { return (x >= lo && x < hi) ? A : 0.0; };
      ic.m0 = [A, lo, hi, alpha](double theta) {
        double sum = 0.0;
        for (double k = std::ceil(lo - theta); k + theta < hi; k += 1.0) {
          sum += std::exp(alpha * (k + theta));
        }
        return A * sum;
      };
      ic.constant_m0 = A == 0.0;
      break;
    }
  }
  return ic;
}

}  // namespace coag
