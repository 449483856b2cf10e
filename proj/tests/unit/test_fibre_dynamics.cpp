#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "coag/errors.hpp"
#include "coag/fibre_dynamics.hpp"
#include "oracles.hpp"

using namespace coag;
using coag::testing::shared_profile;

namespace {

FibreState profile_fibre(double theta, double lambda = 0.0) {
  const auto prof = shared_profile();
  const InitialData h0 = [prof, lambda](double x) { return (*prof)(x - lambda); };
  const auto [lo, hi] = required_window(h0, theta, prof->params());
  return init_fibre(h0, theta, lo, hi, prof->params());
}

FibreState manual_state(int k_min, std::vector<double> phi, double theta = 0.5) {
  FibreState s;
  s.params = ModelParams(0.0);
  s.theta = theta;
  s.k_min = k_min;
  s.k_floor = k_min - 64;
  s.phi = std::move(phi);
  s.clock = FibreClock::from(theta);
  s.left_limit = true;
  s.C0 = *std::max_element(s.phi.begin(), s.phi.end());
  return s;
}

}  // namespace

TEST(InitFibre, ProfileDataHasUnitMass) {
  for (double th : {0.0, 0.1, 0.5, 0.93}) EXPECT_NEAR(profile_fibre(th).m0, 1.0, 1e-6);
}

TEST(InitFibre, ShiftedProfileMassIsExponentialInShift) {
  const double alpha = ModelParams(0.0).alpha();
  for (double lambda : {-1.5, 0.3, 2.0}) {
    EXPECT_NEAR(profile_fibre(0.4, lambda).m0, std::exp(alpha * lambda),
                1e-6 * std::exp(alpha * lambda));
  }
}

TEST(InitFibre, InitialWeightedSumCarriesPhaseFactor) {
  for (double th : {0.2, 0.7}) {
    const auto s = profile_fibre(th);
    EXPECT_NEAR(s.psi(), 1.0 - th, 1e-15);
    EXPECT_NEAR(s.weighted_mass(), std::exp(-s.params.alpha() * th) * s.m0, 1e-14);
  }
}

TEST(InitFibre, ZeroDataHasZeroMass) {
  const auto s = init_fibre([](double) { return 0.0; }, 0.3, -5, 5, ModelParams(0.0));
  EXPECT_EQ(s.m0, 0.0);
  EXPECT_EQ(s.weighted_mass(), 0.0);
}

TEST(InitFibre, SmallWindowIsRejectedWithEstimate) {
  const auto prof = shared_profile();
  const InitialData h0 = [prof](double x) { return (*prof)(x); };
  try {
    init_fibre(h0, 0.5, -3, 1, prof->params());
    FAIL() << "expected WindowError";
  } catch (const WindowError& e) {
    EXPECT_LT(e.required_k_min(), -3);
    EXPECT_GE(e.required_k_max(), 1);
    EXPECT_NO_THROW(init_fibre(h0, 0.5, e.required_k_min(), e.required_k_max(), prof->params()));
  }
}

TEST(InitFibre, RejectsNegativeData) {
  EXPECT_THROW(init_fibre([](double) { return -1.0; }, 0.3, -5, 5, ModelParams(0.0)),
               InvalidArgument);
}

TEST(OdeRhs, Examples) {
  const ModelParams p(0.0);
  std::vector<double> phi(4, 0.0), out(4, 1.0);
  ode_rhs(p, phi, out);
  for (double v : out) EXPECT_EQ(v, 0.0);

  phi = {1.0, 0.0, 0.0};
  out.assign(3, 0.0);
  ode_rhs(p, phi, out);
  EXPECT_NEAR(out[0], std::numbers::ln2 - 1.0, 1e-15);
  EXPECT_NEAR(out[1], 0.5, 1e-15);
  EXPECT_EQ(out[2], 0.0);
}

TEST(OdeRhs, WeightedSumGrowsAtRateAlpha) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.4);
  for (double g : {0.0, 0.5}) {
    const ModelParams p(g);
    const int k_min = -6;
    std::vector<double> phi(14);
    for (auto& v : phi) v = u(rng);
    phi.back() = 0.0;  // the boundary term vanishes
    std::vector<double> out(phi.size());
    ode_rhs(p, phi, out);
    double lhs = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const double w = std::exp(p.alpha() * (k_min + static_cast<int>(i)));
      lhs += w * out[i];
      mass += w * phi[i];
    }
    EXPECT_NEAR(lhs, p.alpha() * mass, 1e-12);
  }
}

TEST(Step, ZeroStateIsUnchanged) {
  auto s = init_fibre([](double) { return 0.0; }, 0.3, -5, 5, ModelParams(0.0));
  step(s, 1.0 / 256.0);
  for (double v : s.phi) EXPECT_EQ(v, 0.0);
}

TEST(Step, DifferenceQuotientApproachesRhs) {
  const auto s0 = profile_fibre(0.5, 0.3);
  const auto rhs = ode_rhs(s0);
  double previous_error = 1e300;
  for (double dt : {1e-2, 1e-3, 1e-4}) {
    auto s = s0;
    step(s, dt);
    double err = 0.0;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
      err = std::max(err, std::abs((s.phi[i] - s0.phi[i]) / dt - rhs[i]));
    }
    EXPECT_LT(err, previous_error);
    EXPECT_LT(err, 10.0 * dt);
    previous_error = err;
  }
}

TEST(Step, OnePeriodKeepsMassLaw) {
  for (auto mode : {IntegratorMode::Direct, IntegratorMode::Rho}) {
    auto s = init_fibre(
        [](double x) { return 0.9 * std::exp(-(x - 0.3) * (x - 0.3)); }, 0.25, -60, 12,
        ModelParams(0.0));
    evolve(s, 1.0, {.dt_max = 1.0 / 256.0, .mode = mode});
    EXPECT_LT(std::abs(s.weighted_mass() - s.expected_mass()) / s.m0, 1e-8);
  }
}

TEST(Step, RefusesPendingJump) {
  auto s = profile_fibre(0.0);
  EXPECT_TRUE(s.left_limit);
  EXPECT_THROW(step(s, 0.01), InvalidArgument);
}

TEST(Step, FlagsInstability) {
  auto s = manual_state(0, {0.0, 10.0, 0.0, 0.0, 0.0});
  s.left_limit = false;
  s.C0 = 0.1;
  EXPECT_THROW(step(s, 0.01), InstabilityError);
}

TEST(Jump, ShiftsIndicesDownByOne) {
  auto s = manual_state(-1, {0.2, 0.5, 0.1});
  const double before = s.weighted_mass();
  apply_jump(s);
  EXPECT_EQ(s.k_min, -2);
  EXPECT_DOUBLE_EQ(s.at(-2), 0.2);
  EXPECT_DOUBLE_EQ(s.at(-1), 0.5);
  EXPECT_DOUBLE_EQ(s.at(0), 0.1);
  EXPECT_EQ(s.at(1), 0.0);
  EXPECT_FALSE(s.left_limit);
  EXPECT_NEAR(s.weighted_mass() / before, std::exp(-s.params.alpha()), 1e-15);
}

TEST(Jump, ZeroStateIsUnchanged) {
  auto s = manual_state(-3, {0.0, 0.0, 0.0, 0.0});
  apply_jump(s);
  for (double v : s.phi) EXPECT_EQ(v, 0.0);
}

TEST(Jump, RefusesToDropLeftMass) {
  auto s = manual_state(-1, {0.2, 0.5, 0.1});
  s.k_floor = -1;
  EXPECT_THROW(apply_jump(s), WindowError);
}

TEST(Jump, RequiresJumpTime) {
  auto s = manual_state(-1, {0.2, 0.5, 0.1});
  s.left_limit = false;
  EXPECT_THROW(apply_jump(s), InvalidArgument);
}

TEST(Evolve, StationaryDataStaysOnTrace) {
  const auto prof = shared_profile();
  auto s = profile_fibre(0.0);
  double worst = 0.0;
  std::size_t samples = 0;
  evolve(s, 5.0, {.dt_max = 1.0 / 256.0, .sample_spacing = 1.0 / 8.0},
         [&](const FibreState& st, SampleKind) {
           const auto side = st.left_limit ? Side::LeftLimit : Side::Right;
           const auto tr = fibre_trace(*prof, 0.0, 0.0, st.time(), st.k_min, st.k_max(), side);
           // the truncated left edge sees no inflow, so compare in the e^{alpha x} weighted sup
           const double alpha = st.params.alpha();
           for (int k = st.k_min; k <= st.k_max(); ++k) {
             const double diff = std::abs(st.at(k) - tr.phi[static_cast<std::size_t>(k - st.k_min)]);
             worst = std::max(worst, std::exp(alpha * (k + st.theta)) * diff);
           }
           ++samples;
         });
  EXPECT_GT(samples, 40u);
  EXPECT_LT(worst, 1e-6);
}

TEST(Evolve, ZeroDataStaysZero) {
  auto s = init_fibre([](double) { return 0.0; }, 0.6, -5, 5, ModelParams(0.0));
  evolve(s, 7.5);
  for (double v : s.phi) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(s.weighted_mass(), 0.0);
}

TEST(Evolve, MassLawHoldsAtEverySample) {
  for (double th : {0.0, 0.3, 0.85}) {
    auto s = init_fibre([](double x) { return 1.2 * std::exp(-2.0 * (x - 0.5) * (x - 0.5)); }, th,
                        -60, 12, ModelParams(0.0));
    double worst = 0.0;
    evolve(s, 10.0, {.dt_max = 1.0 / 256.0, .sample_spacing = 0.25},
           [&](const FibreState& st, SampleKind) {
             worst = std::max(worst, std::abs(st.weighted_mass() - st.expected_mass()) / st.m0);
           });
    EXPECT_LT(worst, 1e-6) << "theta=" << th;
  }
}

TEST(Evolve, LandsExactlyOnJumpTimes) {
  auto s = profile_fibre(0.3);
  std::vector<FibreClock> jumps;
  // label times 0.3, 1.3, 2.3 and 3.3 fall inside [0, 3.5]
  evolve(s, 3.5, {}, [&](const FibreState& st, SampleKind kind) {
    if (kind == SampleKind::PreJump) jumps.push_back(st.clock);
  });
  ASSERT_EQ(jumps.size(), 4u);
  for (std::size_t n = 0; n < jumps.size(); ++n) {
    EXPECT_EQ(jumps[n].period, static_cast<std::int64_t>(n));
    EXPECT_EQ(jumps[n].frac, 0.3);
  }
}

TEST(Evolve, NonnegativeAndBoundedOnRandomData) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    const double c = 0.5 + 1.5 * u(rng), center = 4.0 * u(rng) - 2.0;
    auto s = init_fibre([=](double x) { return c * std::exp(-(x - center) * (x - center)); },
                        u(rng), -70, 14, ModelParams(0.0));
    bool ok = true;
    evolve(s, 6.0, {.sample_spacing = 0.125}, [&](const FibreState& st, SampleKind) {
      ok = ok && sup_bound_check(st, st.C0);
      ok = ok && std::all_of(st.phi.begin(), st.phi.end(), [](double v) { return v >= 0.0; });
    });
    EXPECT_TRUE(ok) << "trial " << trial;
  }
}

TEST(Evolve, PreservesOrderOfRandomPairs) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const double th = u(rng);
    const double c = 0.3 + u(rng), bump = 0.5 * u(rng), center = 2.0 * u(rng) - 1.0;
    const InitialData lower = [=](double x) { return c * std::exp(-x * x); };
    const InitialData upper = [=](double x) {
      return lower(x) + bump * std::exp(-2.0 * (x - center) * (x - center));
    };
    auto a = init_fibre(lower, th, -70, 14, ModelParams(0.0));
    auto b = init_fibre(upper, th, -70, 14, ModelParams(0.0));
    for (double t = 0.5; t <= 6.0; t += 0.5) {
      evolve(a, t);
      evolve(b, t);
      const int lo = std::min(a.k_min, b.k_min), hi = std::max(a.k_max(), b.k_max());
      for (int k = lo; k <= hi; ++k) ASSERT_LE(a.at(k), b.at(k) + 1e-13) << "t=" << t;
    }
  }
}

TEST(Evolve, ReconstructionIsContinuousAcrossJumps) {
  auto s = init_fibre([](double x) { return 0.8 * std::exp(-(x + 0.5) * (x + 0.5)); }, 0.4, -70,
                      14, ModelParams(0.0));
  std::vector<std::pair<double, double>> before, after;
  evolve(s, 2.5, {}, [&](const FibreState& st, SampleKind kind) {
    if (kind != SampleKind::PreJump && kind != SampleKind::PostJump) return;
    auto& dest = kind == SampleKind::PreJump ? before : after;
    dest.clear();
    for (int k = st.k_min; k <= st.k_max(); ++k) dest.emplace_back(k + 1.0 - st.psi(), st.at(k));
    if (kind == SampleKind::PostJump) {
      // same physical points, same values
      for (const auto& [x, v] : before) {
        const auto it = std::find_if(after.begin(), after.end(),
                                     [x = x](const auto& p) { return std::abs(p.first - x) < 1e-12; });
        if (it == after.end()) {
          EXPECT_LT(v, 1e-14);
          continue;
        }
        EXPECT_EQ(it->second, v);
      }
    }
  });
}

TEST(Evolve, RhoModeAgreesWithDirectMode) {
  auto a = profile_fibre(0.6, 0.4);
  auto b = a;
  // perturb so the dynamics are not trivial
  for (auto* s : {&a, &b}) s->phi[s->phi.size() / 2] *= 1.2;
  evolve(a, 3.0, {.mode = IntegratorMode::Direct});
  evolve(b, 3.0, {.mode = IntegratorMode::Rho});
  for (int k = a.k_min; k <= a.k_max(); ++k) EXPECT_NEAR(a.at(k), b.at(k), 1e-8);
}

TEST(TailMass, Examples) {
  const auto s = profile_fibre(0.5);
  const int beyond = std::max(-s.k_min, s.k_max()) + 1;
  EXPECT_EQ(tail_mass(s, beyond), 0.0);
  EXPECT_NEAR(tail_mass(s, s.k_min), s.weighted_mass(), 1e-15);
  // the left plateau contributes about 2 c e^{-alpha N} for large N
  EXPECT_GT(tail_mass(s, 8), tail_mass(s, 20));
  EXPECT_LT(tail_mass(s, 20), 4.0 * s.params.plateau() * std::exp(-20.0 * s.params.alpha()));
}

TEST(SupBound, Examples) {
  const ModelParams p(0.0);
  auto s = init_fibre([](double x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; }, 0.5, -4, 4, p);
  EXPECT_NEAR(s.c0(), 2.0 * std::numbers::ln2, 1e-15);
  bool ok = true;
  evolve(s, 6.0, {.sample_spacing = 0.125},
         [&](const FibreState& st, SampleKind) { ok = ok && sup_bound_check(st, 1.0); });
  EXPECT_TRUE(ok);

  auto zero = init_fibre([](double) { return 0.0; }, 0.5, -4, 4, p);
  EXPECT_TRUE(sup_bound_check(zero, 0.0));

  s.phi[s.phi.size() / 2] = 10.0;
  EXPECT_FALSE(sup_bound_check(s, 1.0));
}

TEST(Trajectory, CsvHasOneRowPerEntry) {
  auto s = profile_fibre(0.5);
  const auto traj = evolve_recorded(s, 1.0);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  std::size_t expected = 1;
  for (const auto& smp : traj.samples) expected += smp.phi.size();
  const auto text = os.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), expected);
  EXPECT_EQ(text.rfind("theta,t,k,phi", 0), 0u);
}
