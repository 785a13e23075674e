#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lsim/bloch.hpp"
#include "lsim/eit.hpp"
#include "lsim/ensemble.hpp"
#include "test_support.hpp"

using namespace lsim;

using testing_support::numeric_steady_state;

TEST(SteadyState, PerfectTransparencyOnTwoPhotonResonance) {
  MediumParams p;
  const cplx r = steady_state_coherence(p, 0.0, 10.0, 100.0);
  EXPECT_EQ(std::abs(r), 0.0);
}

TEST(SteadyState, NoCouplingGivesBareLorentzian) {
  MediumParams p;
  p.gamma13_khz = 2.0;
  const double dp = 0.7, ep = 0.3;
  const cplx r = steady_state_coherence(p, dp, ep, 0.0);
  const cplx i{0, 1};
  const cplx expect = -(i * angular(ep) / 2.0) / (angular(p.gamma13_khz) + i * angular(dp));
  EXPECT_NEAR(std::abs(r - expect), 0.0, 1e-15);
}

TEST(SteadyState, AutlerTownesDoublet) {
  MediumParams p;
  const double oc = 100.0;
  const auto g = linear_grid(-100.0, 100.0, 4001);
  const auto s = susceptibility_spectrum(p, g, 1.0, oc);
  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < g.size(); ++i)
    if (s.chi_im[i] > s.chi_im[i - 1] && s.chi_im[i] > s.chi_im[i + 1]) peaks.push_back(g[i]);
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_NEAR(peaks[0], -oc / 2, 0.5);
  EXPECT_NEAR(peaks[1], oc / 2, 0.5);
}

TEST(SteadyState, StrongProbeIsRegimeError) {
  try {
    steady_state_coherence({}, 0.0, 30.0, 100.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::regime);
  }
}

TEST(SteadyState, AgreesWithLongTimeEvolution) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto s = testing_support::random_steady_point(rng);
    const cplx a = steady_state_coherence(s.params, s.delta_p, s.probe, s.coupling, s.delta_c);
    const cplx n = numeric_steady_state(s.params, s.delta_p, s.probe, s.coupling, s.delta_c);
    EXPECT_LE(std::abs(a - n), 1e-4) << "point " << k;
    EXPECT_LE(std::abs(a - n), 2e-3 * std::abs(a)) << "point " << k;
  }
}

TEST(SteadyState, LineCentreTransparentNumerically) {
  MediumParams p;
  p.gamma13_khz = p.gamma23_khz = 10.0;
  p.Gamma31_khz = p.Gamma32_khz = 2.0;
  EXPECT_LT(std::abs(steady_state_coherence(p, 0.0, 2.0, 100.0).imag()), 1e-6);
  EXPECT_LT(std::abs(numeric_steady_state(p, 0.0, 2.0, 100.0, 0.0).imag()), 1e-6);
}

TEST(Susceptibility, ZeroDetuningGridIsTransparent) {
  const double g[] = {0.0};
  const auto s = susceptibility_spectrum({}, g, 1.0, 100.0);
  EXPECT_EQ(s.chi_im[0], 0.0);
}

TEST(Susceptibility, ParityAboutLineCentre) {
  MediumParams p;
  p.gamma12_khz = 0.2;
  const auto g = linear_grid(-200.0, 200.0, 401);
  const auto s = susceptibility_spectrum(p, g, 1.0, 120.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t j = g.size() - 1 - i;
    ASSERT_NEAR(s.chi_im[i], s.chi_im[j], 1e-10);
    ASSERT_NEAR(s.chi_re[i], -s.chi_re[j], 1e-10);
  }
}

TEST(Susceptibility, PassiveMediumNeverAmplifies) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    MediumParams p;
    p.gamma12_khz = u(rng);
    p.gamma13_khz = 0.5 + 5 * u(rng);
    const auto g = linear_grid(-300.0, 300.0, 301);
    const auto s = susceptibility_spectrum(p, g, 1.0, 20 + 200 * u(rng), -30 + 60 * u(rng));
    for (double v : s.chi_im) ASSERT_GE(v, -1e-9);
  }
}

TEST(Susceptibility, LinearInDensity) {
  MediumParams p;
  p.gamma12_khz = 0.1;
  const auto g = linear_grid(-50.0, 50.0, 11);
  const auto a = susceptibility_spectrum(p, g, 1.0, 80.0);
  p.n_density_rel = 2.0;
  const auto b = susceptibility_spectrum(p, g, 1.0, 80.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_DOUBLE_EQ(b.chi_re[i], 2 * a.chi_re[i]);
    EXPECT_DOUBLE_EQ(b.chi_im[i], 2 * a.chi_im[i]);
  }
}

TEST(Susceptibility, TransparencyDepthGrowsWithSpinDecoherence) {
  const double g[] = {0.0};
  double prev = -1.0;
  for (int k = 0; k < 10; ++k) {
    MediumParams p;
    p.gamma12_khz = 0.1 * k;
    const double v = susceptibility_spectrum(p, g, 1.0, 100.0).chi_im[0];
    EXPECT_GT(v, prev);
    prev = v;
  }
}

namespace {

GroupDelay delay_for(const MediumParams& p, double oc) {
  const auto g = linear_grid(-10.0, 10.0, 21);
  return group_delay(susceptibility_spectrum(p, g, 1.0, oc), p);
}

}  // namespace

TEST(GroupDelay, MatchesDispersionSlopeFormula) {
  MediumParams p;
  const double oc = 200.0;
  // tau = 2 kappa L n / Omega_C^2, angular units
  const double expect = 2.0 * angular(p.coupling_const) * p.length_mm / std::pow(angular(oc), 2);
  EXPECT_NEAR(delay_for(p, oc).delay_us, expect, 1e-6 * expect);
}

TEST(GroupDelay, NoCouplingConstantLeavesVacuumTransit) {
  MediumParams p;
  p.coupling_const = 0.0;
  const auto gd = delay_for(p, 100.0);
  EXPECT_EQ(gd.delay_us, 0.0);
  EXPECT_NEAR(gd.total_us(), 3.0 / speed_of_light_mm_per_us, 1e-18);
  EXPECT_EQ(gd.v_g_rel, 1.0);
}

TEST(GroupDelay, ProportionalToLength) {
  MediumParams p;
  const double a = delay_for(p, 150.0).delay_us;
  p.length_mm *= 2;
  EXPECT_NEAR(delay_for(p, 150.0).delay_us, 2 * a, 1e-12 * a);
}

TEST(GroupDelay, ProportionalToDensity) {
  MediumParams p;
  p.gamma12_khz = 0.05;
  const double a = delay_for(p, 150.0).delay_us;
  p.n_density_rel = 3.7;
  EXPECT_NEAR(delay_for(p, 150.0).delay_us, 3.7 * a, 1e-9 * a);
}

TEST(GroupDelay, DoublingCouplingQuartersDelay) {
  MediumParams p;
  EXPECT_NEAR(delay_for(p, 100.0).delay_us / delay_for(p, 200.0).delay_us, 4.0, 0.04);
}

TEST(GroupDelay, CoarseGridIsResolutionError) {
  const auto g = linear_grid(-200.0, 200.0, 9);
  try {
    group_delay(susceptibility_spectrum({}, g, 1.0, 100.0), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resolution);
  }
}

TEST(GroupDelay, LineCentreMustBeOnGrid) {
  const auto g = linear_grid(1.0, 11.0, 11);
  EXPECT_THROW(group_delay(susceptibility_spectrum({}, g, 1.0, 100.0), {}), Error);
}

TEST(PowerLaw, RecoversExponent) {
  const double x[] = {1.0, 2.0, 4.0, 8.0};
  double y[4];
  for (int i = 0; i < 4; ++i) y[i] = 3.0 * std::pow(x[i], -2.0);
  EXPECT_NEAR(fit_power_law_exponent(x, y), -2.0, 1e-12);
  const double bad[] = {1.0, -1.0, 1.0, 1.0};
  EXPECT_THROW(fit_power_law_exponent(x, bad), Error);
}
