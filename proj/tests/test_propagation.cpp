#include <gtest/gtest.h>

#include <cmath>

#include "lsim/propagation.hpp"
#include "test_support.hpp"

using namespace lsim;
using testing_support::narrowband_cases;
using testing_support::run_slow_light;

namespace {

PulseSequence cw_coupling(double khz, double until) {
  return {{Pulse{Transition::coupling, khz, 0.0, until, EdgeShape::square, 0.0, 0.0, 180.0}}, until};
}

Envelope short_probe() { return gaussian_envelope(60.0, 0.05, 20.0, 8.0, 2.0); }

}  // namespace

TEST(Envelope, GaussianHasRequestedWidth) {
  const auto e = gaussian_envelope(40.0, 0.01, 20.0, 6.0, 3.0);
  const auto I = e.intensity();
  EXPECT_NEAR(I[2000], 9.0, 1e-12);
  EXPECT_NEAR(I[2300], 4.5, 1e-9);  // half maximum 3 us from the centre
  EXPECT_NEAR(e.energy(), 9.0 * 6.0 * std::sqrt(std::numbers::pi / (4 * std::log(2.0))), 1e-6);
}

TEST(Envelope, ValidationCatchesBadGrids) {
  Envelope e{{0.0, 1.0, 3.0}, {1.0, 1.0, 1.0}};
  EXPECT_THROW(e.validate(), Error);
  e.t_us = {0.0, 1.0};
  e.field_khz = {1.0, 1.0};
  EXPECT_THROW(e.validate(), Error);
}

TEST(Propagation, NoCouplingConstantMeansNoChange) {
  MediumParams m;
  m.coupling_const = 0.0;
  const auto in = short_probe();
  const auto r = propagate_pulse(in, cw_coupling(200.0, 60.0), m, {64});
  ASSERT_EQ(r.output.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i)
    ASSERT_LE(std::abs(r.output.field_khz[i] - in.field_khz[i]), 1e-12);
  EXPECT_EQ(r.z_mm.size(), 65u);
}

TEST(Propagation, DefaultSlowLightIsDelayedAndMostlyTransmitted) {
  const auto in = gaussian_envelope(80.0, 0.05, 20.0, 8.0, 2.0);
  const auto r = propagate_pulse(in, cw_coupling(200.0, 80.0), {}, {});
  EXPECT_GE(r.node_energy.back() / r.node_energy.front(), 0.9);
  const double d = extract_delay(in.t_us, in.intensity(), r.output.intensity(), DelayMethod::peak);
  EXPECT_GT(d, 10.0);
  EXPECT_LE(r.max_trace_error, 1e-9);
}

TEST(Propagation, NarrowbandDelaysMatchDispersion) {
  for (const auto& c : narrowband_cases) {
    const auto r = run_slow_light(c);
    EXPECT_NEAR(r.measured_us / r.predicted_us, 1.0, 0.10) << "omega_c " << c.omega_c_khz;
    EXPECT_NEAR(r.predicted_us, c.target_delay_us, 0.01 * c.target_delay_us);
    EXPECT_TRUE(r.energy_monotone);
    EXPECT_GE(r.energy_ratio, 0.9);
  }
}

TEST(Propagation, DoublingLengthDoublesDelay) {
  const auto& c = narrowband_cases[0];
  const auto a = run_slow_light(c, 1.0);
  const auto b = run_slow_light(c, 2.0);
  EXPECT_NEAR(b.measured_us / a.measured_us, 2.0, 0.10);
}

TEST(Propagation, SlabRefinementConverges) {
  const auto& c = narrowband_cases[1];
  const auto a = run_slow_light(c, 1.0, 1);
  const auto b = run_slow_light(c, 1.0, 2);
  EXPECT_NEAR(a.measured_us, b.measured_us, 0.02 * b.measured_us);
  EXPECT_NEAR(a.energy_ratio, b.energy_ratio, 0.02);
}

TEST(Propagation, SnapshotsCoverEveryNode) {
  const auto in = short_probe();
  PropagationOptions opt;
  opt.snapshot_index = 400;
  MediumParams m;
  m.gamma13_khz = m.gamma23_khz = 10.0;
  const auto r = propagate_pulse(in, cw_coupling(200.0, 60.0), m, {128}, opt);
  ASSERT_EQ(r.snapshots.size(), 129u);
  for (const auto& s : r.snapshots) ASSERT_TRUE(validate_density_matrix(s, 1e-9).ok);
  const auto avg = medium_average(r.snapshots);
  EXPECT_NEAR(avg.trace().real(), 1.0, 1e-9);
  // the stored spin coherence shrinks along the cell as the probe is absorbed
  EXPECT_GT(std::abs(r.snapshots.front()(0, 1)), std::abs(r.snapshots.back()(0, 1)));
}

TEST(Propagation, MediumAverageIsTrapezoid) {
  const DensityMatrix nodes[] = {DensityMatrix::diag(1, 0, 0), DensityMatrix::diag(0, 1, 0),
                                 DensityMatrix::diag(0, 0, 1)};
  const auto avg = medium_average(nodes);
  EXPECT_DOUBLE_EQ(avg(0, 0).real(), 0.25);
  EXPECT_DOUBLE_EQ(avg(1, 1).real(), 0.5);
  EXPECT_DOUBLE_EQ(avg(2, 2).real(), 0.25);
  EXPECT_THROW(medium_average(std::span(nodes, 1)), Error);
}

TEST(Propagation, StrongProbeIsRegimeError) {
  const auto in = gaussian_envelope(60.0, 0.05, 20.0, 8.0, 60.0);
  try {
    propagate_pulse(in, cw_coupling(200.0, 60.0), {}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::regime);
  }
}

TEST(Propagation, TooFewSlabsIsConfigErrorNamingTheNeed) {
  try {
    propagate_pulse(short_probe(), cw_coupling(200.0, 60.0), {}, {64});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    EXPECT_NE(std::string(e.what()).find("need n_z >= 1005"), std::string::npos) << e.what();
  }
  EXPECT_THROW(PropagationGrid{1}.validate(), Error);
}

TEST(ExtractDelay, IdenticalSeriesGiveZero) {
  const auto e = gaussian_envelope(40.0, 0.1, 20.0, 5.0, 1.0);
  const auto I = e.intensity();
  EXPECT_NEAR(extract_delay(e.t_us, I, I, DelayMethod::peak), 0.0, 1e-12);
  EXPECT_NEAR(extract_delay(e.t_us, I, I, DelayMethod::centroid), 0.0, 1e-12);
}

TEST(ExtractDelay, RecoversKnownShift) {
  const auto a = gaussian_envelope(60.0, 0.1, 20.0, 5.0, 1.0);
  const auto b = gaussian_envelope(60.0, 0.1, 27.0, 5.0, 0.5);
  EXPECT_NEAR(extract_delay(a.t_us, a.intensity(), b.intensity(), DelayMethod::peak), 7.0, 1e-3);
  EXPECT_NEAR(extract_delay(a.t_us, a.intensity(), b.intensity(), DelayMethod::centroid), 7.0,
              1e-6);
}

TEST(ExtractDelay, CentroidThroughExponentialFilter) {
  // first-order low-pass with time constant tau shifts the centroid by tau
  const double tau = 3.0, h = 0.01;
  const auto a = gaussian_envelope(80.0, h, 20.0, 4.0, 1.0);
  const auto in = a.intensity();
  std::vector<double> out(in.size(), 0.0);
  for (std::size_t i = 1; i < in.size(); ++i)
    out[i] = out[i - 1] + h / tau * (0.5 * (in[i] + in[i - 1]) - out[i - 1]);
  EXPECT_NEAR(extract_delay(a.t_us, in, out, DelayMethod::centroid), tau, 0.01);
}

TEST(ExtractDelay, FlatOutputIsDetectionError) {
  const auto a = gaussian_envelope(40.0, 0.1, 20.0, 5.0, 1.0);
  const std::vector<double> flat(a.size(), 1e-3);
  try {
    extract_delay(a.t_us, a.intensity(), flat, DelayMethod::peak);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::detection);
  }
}
