#include <gtest/gtest.h>

#include <cmath>

#include "lsim/fwm.hpp"

using namespace lsim;

namespace {

// State left in the medium by the standard 10 us preparation, at t = 35 us.
const DensityMatrix& stored_state() {
  static const DensityMatrix rho = [] {
    PulseSequence s{{{Transition::probe, 50.0, 0.0, 10.0},
                     {Transition::coupling, 100.0, 0.0, 10.0, EdgeShape::square, 0.0, 0.0, 180.0}},
                    35.0};
    return evolve(DensityMatrix::ground(0), s, {}, 0.0, 0.01, {100, false}).final_state;
  }();
  return rho;
}

Pulse readout(double khz) {
  return {Transition::coupling, khz, 35.0, 45.0, EdgeShape::square, 0.0, 0.0, 180.0};
}

}  // namespace

TEST(SlopeReversals, CountsTurningPointsAboveFloor) {
  const double mono[] = {0, 1, 2, 3, 4};
  EXPECT_EQ(count_slope_reversals(mono, 1e-6), 0u);
  const double bump[] = {0, 1, 2, 1, 0, 1};
  EXPECT_EQ(count_slope_reversals(bump, 1e-6), 2u);
  const double jitter[] = {0, 1, 2, 2 - 1e-9, 3};
  EXPECT_EQ(count_slope_reversals(jitter, 1e-6), 0u);
}

TEST(Readout, NoStoredCoherenceEmitsNothing) {
  const auto r = readout_conversion(DensityMatrix::ground(0), readout(80.0), {}, 0.01);
  for (double v : r.series[Channel::e_d_arb]) ASSERT_EQ(v, 0.0);
  EXPECT_FALSE(r.oscillation_detected);
}

TEST(Readout, ZeroFieldLeavesSpinCoherenceAlone) {
  const auto r = readout_conversion(stored_state(), readout(0.0), {}, 0.01);
  const auto& re = r.series[Channel::re_rho12];
  for (double v : re) ASSERT_NEAR(v, re.front(), 1e-15);
  EXPECT_THROW(verify_conversion_law(r), Error);
}

TEST(Readout, TimesAreAbsolute) {
  const auto r = readout_conversion(stored_state(), readout(80.0), {}, 0.01);
  EXPECT_NEAR(r.series.t_us.front(), 35.0, 1e-12);
  EXPECT_NEAR(r.series.t_us.back(), 45.0, 1e-9);
}

TEST(Readout, ProbeTransitionPulseRejected) {
  Pulse p = readout(80.0);
  p.transition = Transition::probe;
  try {
    readout_conversion(stored_state(), p, {}, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::input);
  }
}

TEST(Readout, WeakFieldDoesNotOscillateStrongFieldDoes) {
  EXPECT_FALSE(readout_conversion(stored_state(), readout(20.0), {}, 0.01).oscillation_detected);
  EXPECT_TRUE(readout_conversion(stored_state(), readout(140.0), {}, 0.01).oscillation_detected);
}

TEST(Readout, DepletesStoredCoherenceAndEmits) {
  for (double khz : {20.0, 80.0, 140.0}) {
    const auto r = readout_conversion(stored_state(), readout(khz), {}, 0.01);
    const auto& s = r.series;
    const auto& re = s[Channel::re_rho12];
    const auto& im = s[Channel::im_rho13];
    EXPECT_LE(std::abs(re.back()), std::abs(re.front())) << khz;
    double integral = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i)
      integral += 0.5 * (im[i] + im[i - 1]) * (s.t_us[i] - s.t_us[i - 1]);
    EXPECT_GT(integral, 0.0) << khz;
    EXPECT_LE(r.max_trace_error, 1e-9);
  }
}

TEST(ConversionLaw, SyntheticDerivativePair) {
  ReadoutResult r;
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.01 * i;
    r.series.append(t, DensityMatrix::pure({1.0, 0.0, 0.0}));
    r.series[Channel::re_rho12].back() = std::cos(t);
    r.series[Channel::e_d_arb].back() = std::sin(t);
  }
  const auto fit = verify_conversion_law(r);
  EXPECT_NEAR(fit.pearson_r, 1.0, 1e-9);
  EXPECT_NEAR(fit.scale, 1.0, 1e-4);
  EXPECT_LT(fit.max_residual, 1e-4);
}

TEST(ConversionLaw, HoldsForModerateReadout) {
  auto r = readout_conversion(stored_state(), readout(80.0), {}, 0.01);
  const auto fit = verify_conversion_law(r);
  EXPECT_GE(fit.pearson_r, 0.99);
  EXPECT_GT(fit.scale, 0.0);
}

TEST(Sweep, EveryPointObeysConversionLaw) {
  const double omegas[] = {20, 40, 60, 80, 100, 120, 140};
  const auto rs = sweep_readout(stored_state(), omegas, readout(0.0), {}, 0.01);
  ASSERT_EQ(rs.size(), 7u);
  std::size_t transitions = 0;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    EXPECT_EQ(rs[k].omega_a_khz, omegas[k]);
    ASSERT_TRUE(rs[k].conversion_fit);
    EXPECT_GE(rs[k].conversion_fit->pearson_r, 0.99) << omegas[k];
    if (k > 0 && rs[k].oscillation_detected != rs[k - 1].oscillation_detected) ++transitions;
  }
  EXPECT_EQ(transitions, 1u);
}

TEST(Sweep, EmptyAndDuplicateValues) {
  EXPECT_TRUE(sweep_readout(stored_state(), {}, readout(0.0), {}, 0.01).empty());
  const double twice[] = {80, 80};
  const auto rs = sweep_readout(stored_state(), twice, readout(0.0), {}, 0.01);
  EXPECT_EQ(rs[0].series.channels, rs[1].series.channels);
}

TEST(Detector, SquaresEmission) {
  TimeSeries ts;
  ts.append(0.0, DensityMatrix::ground(0));
  ts.append(1.0, DensityMatrix::ground(0));
  ts[Channel::e_d_arb] = {-2.0, 3.0};
  const auto I = detector_intensity(ts);
  EXPECT_EQ(I, (std::vector<double>{4.0, 9.0}));
  ts[Channel::e_d_arb].clear();
  try {
    detector_intensity(ts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::schema);
  }
}

TEST(PhaseMatching, CollinearBeamsAreMatched) {
  const WaveVector k{0, 0, 1.0e7};
  const auto pm = phase_match(k, k, k, 1.0e7);
  EXPECT_EQ(pm.k_d.kz, 1.0e7);
  EXPECT_EQ(pm.mismatch, 0.0);
}

TEST(PhaseMatching, ConservesTransverseMomentum) {
  const double k = 1.0e7;
  const auto pm = phase_match(WaveVector::in_plane(k, 0.035), WaveVector::in_plane(k, 0.0),
                              WaveVector::in_plane(k, 0.070), k);
  EXPECT_NEAR(pm.k_d.kx, k * (std::sin(0.035) + std::sin(0.070)), 1e-6);
  EXPECT_GT(pm.mismatch, 0.0);
}

TEST(PhaseMatching, LinearInWaveVectors) {
  const WaveVector c{1, 2, 3}, p{0.5, -1, 2}, a{3, 0, 1};
  const auto one = phase_match(c, p, a, 0.0).k_d;
  const auto two = phase_match(2.0 * c, 2.0 * p, 2.0 * a, 0.0).k_d;
  EXPECT_DOUBLE_EQ(two.kx, 2 * one.kx);
  EXPECT_DOUBLE_EQ(two.ky, 2 * one.ky);
  EXPECT_DOUBLE_EQ(two.kz, 2 * one.kz);
}
