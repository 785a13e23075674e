#pragma once

// Shared test helpers, including independent oracles that do not reuse the
// library's right-hand side.

#include <bit>
#include <cmath>
#include <random>

#include "lsim/bloch.hpp"
#include "lsim/eit.hpp"
#include "lsim/ensemble.hpp"
#include "lsim/propagation.hpp"

namespace testing_support {

using lsim::cplx;

/// Random valid density matrix: a mixture of three random pure states.
inline lsim::DensityMatrix random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  lsim::DensityMatrix rho;
  double wsum = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double w = u(rng) + 1e-3;
    wsum += w;
    rho += w * lsim::DensityMatrix::pure({cplx{g(rng), g(rng)}, cplx{g(rng), g(rng)},
                                          cplx{g(rng), g(rng)}});
  }
  rho *= 1.0 / wsum;
  return rho;
}

/// Spin-coherence rate written out term by term (rad/us):
///   d rho12/dt = -i(Om_C/2) rho13 + i(E_P/2) rho32 - i(dP - dC + dinh) rho12 - g12 rho12
inline cplx spin_coherence_rate(const lsim::DensityMatrix& rho, const lsim::LiouvillianInputs& in) {
  const double w = 2.0 * 3.14159265358979323846 * 1e-3;
  const cplx i{0.0, 1.0};
  const cplx om_c = in.coupling_khz * w, e_p = in.probe_khz * w;
  const double d2 = (in.delta_p_khz - in.delta_c_khz + in.delta_inh_khz) * w;
  const double g12 = in.params.gamma12_khz * w;
  return -i * (om_c / 2.0) * rho(0, 2) + i * (e_p / 2.0) * rho(2, 1) - i * d2 * rho(0, 1) -
         g12 * rho(0, 1);
}

/// Long CW evolution from |1> under fixed probe and coupling; returns rho13.
inline cplx numeric_steady_state(const lsim::MediumParams& p, double dp, double ep, double oc,
                                 double dc, double duration = 500.0) {
  using lsim::Transition, lsim::EdgeShape;
  const lsim::PulseSequence s{
      {{Transition::probe, ep, 0.0, duration, EdgeShape::square, 0.0, dp},
       {Transition::coupling, oc, 0.0, duration, EdgeShape::square, 0.0, dc}},
      duration};
  return lsim::evolve(lsim::DensityMatrix::ground(0), s, p, 0.0, 0.02, {1000, false})
      .final_state(0, 2);
}

/// Random weak-probe steady-state point with optical decay into both ground
/// states. The probe is kept at Omega_C/1000: near the Autler-Townes peaks,
/// optical pumping into |2> already shifts rho13 by several percent at 1/100.
struct SteadyPoint {
  lsim::MediumParams params;
  double delta_p, probe, coupling, delta_c;
};

inline SteadyPoint random_steady_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SteadyPoint s;
  s.params.gamma12_khz = 0.5 * u(rng);
  s.params.gamma13_khz = 5.0 + 10.0 * u(rng);
  s.params.gamma23_khz = 5.0 + 10.0 * u(rng);
  s.params.Gamma31_khz = s.params.Gamma32_khz = 1.0 + 2.0 * u(rng);
  s.coupling = 50.0 + 150.0 * u(rng);
  s.probe = s.coupling / 1000.0;
  s.delta_p = -60.0 + 120.0 * u(rng);
  s.delta_c = -20.0 + 40.0 * u(rng);
  return s;
}

/// Slow-light case whose spectrum sits well inside the transparency window, so
/// first-order dispersion predicts the pulse delay.
struct NarrowbandCase {
  double omega_c_khz;
  double gamma13_khz;
  double target_delay_us;
  double fwhm_us;  // intensity FWHM
};

inline constexpr NarrowbandCase narrowband_cases[] = {
    {300, 10, 8, 24}, {250, 10, 6, 24}, {400, 10, 10, 24}, {200, 10, 4, 30}, {350, 10, 12, 30}};

struct SlowLightRun {
  double predicted_us = 0.0;
  double measured_us = 0.0;
  double energy_ratio = 0.0;
  bool energy_monotone = true;
  std::size_t n_z = 0;
};

/// Propagates a Gaussian pulse through the case's medium. length_scale
/// stretches the cell at fixed coupling constant; nz_factor refines z.
/// dt_us is halved as needed to keep the coupling Rabi phase per step below 0.1.
inline SlowLightRun run_slow_light(const NarrowbandCase& c, double length_scale = 1.0,
                                   std::size_t nz_factor = 1, double dt_us = 0.05) {
  lsim::MediumParams m;
  m.gamma13_khz = m.gamma23_khz = c.gamma13_khz;
  const double oc = lsim::angular(c.omega_c_khz);
  m.coupling_const = c.target_delay_us * oc * oc / (2.0 * m.length_mm * lsim::angular(1.0));
  m.length_mm *= length_scale;

  const auto grid = lsim::linear_grid(-5.0, 5.0, 11);
  SlowLightRun out;
  out.predicted_us =
      lsim::group_delay(lsim::susceptibility_spectrum(m, grid, 0.1, c.omega_c_khz), m).delay_us;

  while (lsim::angular(c.omega_c_khz) * dt_us >= 0.1) dt_us /= 2;
  const double center = 2.5 * c.fwhm_us;
  const double window = center + out.predicted_us + 3.0 * c.fwhm_us;
  const auto in = lsim::gaussian_envelope(window, dt_us, center, c.fwhm_us, c.omega_c_khz / 50.0);
  const lsim::PulseSequence cs{{lsim::Pulse{lsim::Transition::coupling, c.omega_c_khz, 0.0, window,
                                            lsim::EdgeShape::square, 0.0, 0.0, 180.0}},
                               window};
  // smallest power of two meeting the per-slab absorption limit
  const double alpha = m.coupling_const / (2.0 * m.gamma13_khz);
  const auto need = static_cast<std::size_t>(std::ceil(alpha * m.length_mm));
  out.n_z = std::bit_ceil(std::max<std::size_t>(need, 64)) * nz_factor;

  const auto r = lsim::propagate_pulse(in, cs, m, {out.n_z});
  out.measured_us = lsim::extract_delay(in.t_us, in.intensity(), r.output.intensity(),
                                        lsim::DelayMethod::peak);
  out.energy_ratio = r.node_energy.back() / r.node_energy.front();
  for (std::size_t j = 1; j < r.node_energy.size(); ++j)
    if (r.node_energy[j] > r.node_energy[j - 1] * (1.0 + 1e-12)) out.energy_monotone = false;
  return out;
}

}  // namespace testing_support
