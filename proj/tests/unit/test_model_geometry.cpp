#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "coag/errors.hpp"
#include "coag/model_geometry.hpp"

using namespace coag;

namespace {

// Distance on the unit circle, so 0.999999 and 0 count as close.
double circular_gap(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

}  // namespace

TEST(ModelParams, AlphaIsRecomputedFromGamma) {
  for (double g : {-2.0, -0.5, 0.0, 0.25, 0.5, 0.9}) {
    const ModelParams p(g);
    EXPECT_DOUBLE_EQ(p.alpha(), (1.0 - g) * std::numbers::ln2);
    EXPECT_GT(p.alpha(), 0.0);
    EXPECT_DOUBLE_EQ(p.decay(), std::exp(-p.alpha()));
  }
}

TEST(ModelParams, RejectsGammaAtOrAboveOne) {
  EXPECT_THROW(ModelParams(1.0), InvalidArgument);
  EXPECT_THROW(ModelParams(3.0), InvalidArgument);
  EXPECT_THROW(ModelParams(std::nan("")), InvalidArgument);
}

TEST(ModelParams, PlateauBalancesLinearAndQuadraticTerms) {
  for (double g : {0.0, 0.5, -1.0}) {
    const ModelParams p(g);
    const double c = p.plateau();
    EXPECT_NEAR(p.alpha() * c + (p.decay() - 1.0) * c * c, 0.0, 1e-14);
  }
  EXPECT_NEAR(ModelParams(0.0).plateau(), 2.0 * std::numbers::ln2, 1e-15);
}

TEST(FibreLabel, Examples) {
  EXPECT_NEAR(theta_of(1.25, 0.5), 0.75, 1e-15);
  EXPECT_EQ(theta_of(2.0, 3.0), 0.0);
  EXPECT_NEAR(theta_of(0.3, -0.5), 0.8, 1e-15);
}

TEST(FibrePhase, Examples) {
  EXPECT_NEAR(psi(0.0, 0.3), 0.7, 1e-15);
  // 2.3 - 0.3 rounds just below 2, so the phase sits at the circle's seam
  EXPECT_LT(circular_gap(psi(2.3, 0.3), 0.0), 1e-14);
  EXPECT_EQ(psi(2.25, 0.25), 0.0);
  EXPECT_NEAR(psi(2.8, 0.3), 0.5, 1e-14);
}

TEST(FibrePhase, StaysInHalfOpenUnitInterval) {
  EXPECT_LT(unit_fraction(-1e-17), 1.0);
  EXPECT_GE(unit_fraction(-1e-17), 0.0);
  EXPECT_EQ(unit_fraction(5.0), 0.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 10000; ++i) {
    const double v = unit_fraction(u(rng));
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(FibreLabel, PeriodicInTimeAndSpace) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::uniform_int_distribution<int> n(-5, 5);
  for (int i = 0; i < 2000; ++i) {
    const double t = u(rng), x = u(rng);
    const int m = n(rng);
    EXPECT_LT(circular_gap(theta_of(t + m, x), theta_of(t, x)), 1e-12);
    EXPECT_LT(circular_gap(theta_of(t, x + m), theta_of(t, x)), 1e-12);
    // the label depends on t and x only through t + x
    EXPECT_LT(circular_gap(theta_of(t + 0.5, x - 0.5), theta_of(t, x)), 1e-12);
  }
}

TEST(FibrePhase, FibrePositionsCarryTheirLabel) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(0.0, 40.0), uth(0.0, 1.0);
  std::uniform_int_distribution<int> uk(-30, 30);
  for (int i = 0; i < 5000; ++i) {
    const double t = ut(rng), th = uth(rng);
    const int k = uk(rng);
    const double x = k + 1.0 - psi(t, th);
    EXPECT_LT(circular_gap(theta_of(t, x), th), 1e-11) << "t=" << t << " theta=" << th;
  }
}

TEST(FibrePhase, OnePeriodicAndJumpsToZeroAtLabelTimes) {
  for (double th : {0.0, 0.1, 0.5, 0.9}) {
    for (int n = 0; n < 6; ++n) {
      EXPECT_LT(circular_gap(psi(n + th, th), 0.0), 1e-12);
      EXPECT_NEAR(psi(n + th + 0.25, th), 0.25, 1e-12);
      EXPECT_NEAR(psi(n + th + 0.999, th), 0.999, 1e-11);
    }
  }
}

TEST(FibreClock, RoundTripAndOrdering) {
  const auto a = FibreClock::from(3.25);
  EXPECT_EQ(a.period, 3);
  EXPECT_DOUBLE_EQ(a.frac, 0.25);
  EXPECT_DOUBLE_EQ(a.value(), 3.25);
  const FibreClock b{4, 0.1};
  EXPECT_LT(a, b);
  EXPECT_GT(b, a);
  EXPECT_NEAR(clock_difference(b, a), 0.85, 1e-15);
  EXPECT_EQ(FibreClock::from(-0.5).period, -1);
}

TEST(FibreClock, PhaseMatchesFloatingPhase) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ut(0.0, 100.0), uth(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double t = ut(rng), th = uth(rng);
    EXPECT_LT(circular_gap(psi_of_clock(FibreClock::from(t), th), psi(t, th)), 1e-12);
  }
  // exact jump time is phase zero without accumulated roundoff
  EXPECT_EQ(psi_of_clock(FibreClock{17, 0.3}, 0.3), 0.0);
}

TEST(ChangeOfVariables, Examples) {
  const ModelParams p(0.0);
  const auto g = h_to_G(0.0, 1.0, p.alpha(), p);
  EXPECT_DOUBLE_EQ(g.tau, 1.0);
  EXPECT_DOUBLE_EQ(g.eta, 1.0);
  EXPECT_DOUBLE_EQ(g.G, 1.0);

  const auto back = F_to_G(1.0, 4.0, 1.0, p);
  EXPECT_DOUBLE_EQ(back.eta, 2.0);
  EXPECT_DOUBLE_EQ(back.G, 4.0);
  const auto f = G_to_F(1.0, 2.0, 4.0, p);
  EXPECT_DOUBLE_EQ(f.xi, 4.0);
  EXPECT_DOUBLE_EQ(f.F, 1.0);

  const auto o = G_to_F(g.tau, 0.0, h_to_G(0.0, 0.0, p.alpha(), p).G, p);
  EXPECT_DOUBLE_EQ(o.tau, 1.0);
  EXPECT_DOUBLE_EQ(o.xi, 1.0);
  EXPECT_DOUBLE_EQ(o.F, 1.0);
}

TEST(ChangeOfVariables, RoundTripsOnRandomPoints) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ut(0.0, 10.0), ux(-15.0, 15.0), uh(0.0, 3.0),
      ug(-1.0, 0.9);
  for (int i = 0; i < 2000; ++i) {
    const ModelParams p(ug(rng));
    const double t = ut(rng), x = ux(rng), h = uh(rng);
    const auto s = h_to_G(t, x, h, p);
    const auto o = G_to_F(s.tau, s.eta, s.G, p);
    const auto s2 = F_to_G(o.tau, o.xi, o.F, p);
    const auto r = G_to_h(s2.tau, s2.eta, s2.G, p);
    EXPECT_NEAR(r.t, t, 1e-12 * (1.0 + t));
    EXPECT_NEAR(r.x, x, 1e-11 * (1.0 + std::abs(x) + t));
    EXPECT_NEAR(r.h, h, 1e-12 * (1.0 + h));
  }
}

TEST(ChangeOfVariables, RejectsNonpositiveTimeAndSize) {
  const ModelParams p(0.0);
  EXPECT_THROW(G_to_h(0.0, 1.0, 1.0, p), InvalidArgument);
  EXPECT_THROW(G_to_h(-1.0, 1.0, 1.0, p), InvalidArgument);
  EXPECT_THROW(F_to_G(1.0, 0.0, 1.0, p), InvalidArgument);
}

TEST(WeightedMassIntegral, ZeroDataHasZeroMass) {
  const std::vector<double> h(100, 0.0);
  const auto m = mass_integral_h(h, -1.0, 0.02, ModelParams(0.0));
  EXPECT_EQ(m.value, 0.0);
  EXPECT_FALSE(m.leak_suspected);
}

TEST(WeightedMassIntegral, NarrowHatApproachesUnitMass) {
  const ModelParams p(0.0);
  for (double width : {0.1, 0.01, 0.001}) {
    const double dx = width / 100.0;
    std::vector<double> h;
    const double x0 = -2.0 * width;
    for (int i = 0; i <= 400; ++i) {
      const double x = x0 + i * dx;
      h.push_back(std::max(0.0, 1.0 - std::abs(x) / width) / width);
    }
    const auto m = mass_integral_h(h, x0, dx, p);
    // exact mass of the hat is (cosh(a w) - 1) * 2 / (a w)^2, which tends to 1
    const double aw = p.alpha() * width;
    EXPECT_NEAR(m.value, 2.0 * (std::cosh(aw) - 1.0) / (aw * aw), 1e-6);
    EXPECT_NEAR(m.value, 1.0, width);
  }
}

TEST(WeightedMassIntegral, FlagsMassAtTheBoundary) {
  const std::vector<double> h(50, 1.0);
  const auto m = mass_integral_h(h, 0.0, 0.1, ModelParams(0.0));
  EXPECT_TRUE(m.leak_suspected);
  EXPECT_GT(m.boundary_fraction, 0.01);
}

TEST(WeightedMassIntegral, ExponentialDataMatchesClosedForm) {
  // h = e^{-2 alpha x} on [0, 10]: integral of e^{-alpha x} is (1 - e^{-10 alpha}) / alpha
  const ModelParams p(0.5);
  const double dx = 1.0 / 1024.0;
  std::vector<double> h;
  for (int i = 0; i <= 10240; ++i) h.push_back(std::exp(-2.0 * p.alpha() * i * dx));
  const auto m = mass_integral_h(h, 0.0, dx, p, 1.0);
  EXPECT_NEAR(m.value, (1.0 - std::exp(-10.0 * p.alpha())) / p.alpha(), 1e-6);
}
