#pragma once

// Single-member Lambda-system master equation and its RK4 integrator.
//
// Rotating-frame RWA Hamiltonian (angular units, hbar = 1):
//   H22 = -(dP - dC + dinh),  H33 = -dP,
//   H13 = -E_P/2,  H31 = -conj(E_P)/2,  H32 = -Om_C/2,  H23 = -conj(Om_C)/2
// so that
//   d rho12/dt = -i(Om_C/2) rho13 + i(E_P/2) rho32 - i(dP - dC + dinh) rho12 - g12 rho12.
// Relaxation: rho13, rho23, rho12 dephase at g13, g23, g12; |3> decays to |1>
// at G31 and to |2> at G32.

#include <cmath>
#include <string>

#include "lsim/core.hpp"

namespace lsim {

struct LiouvillianInputs {
  cplx probe_khz{};     // E_P
  cplx coupling_khz{};  // Om_C (or the read-out Om_A)
  double delta_p_khz = 0.0;
  double delta_c_khz = 0.0;
  double delta_inh_khz = 0.0;
  MediumParams params{};
};

namespace detail {

/// Everything the right-hand side needs, pre-converted to rad/us.
struct Rates {
  double g12, g13, g23, G31, G32;

  explicit Rates(const MediumParams& p)
      : g12(angular(p.gamma12_khz)),
        g13(angular(p.gamma13_khz)),
        g23(angular(p.gamma23_khz)),
        G31(angular(p.Gamma31_khz)),
        G32(angular(p.Gamma32_khz)) {}
};

struct AngularDrive {
  cplx probe;     // E_P, rad/us
  cplx coupling;  // Om_C, rad/us
  double h22;     // -(dP - dC + dinh)
  double h33;     // -dP
};

inline AngularDrive to_angular(const Drive& d, double delta_inh_khz) {
  return {d.probe * angular(1.0), d.coupling * angular(1.0),
          -angular(d.delta_p_khz - d.delta_c_khz + delta_inh_khz), -angular(d.delta_p_khz)};
}

inline DensityMatrix rhs(const DensityMatrix& rho, const AngularDrive& d, const Rates& r) {
  DensityMatrix h;
  h(1, 1) = d.h22;
  h(2, 2) = d.h33;
  h(0, 2) = -0.5 * d.probe;
  h(2, 0) = -0.5 * std::conj(d.probe);
  h(2, 1) = -0.5 * d.coupling;
  h(1, 2) = -0.5 * std::conj(d.coupling);

  DensityMatrix out;
  const cplx minus_i{0.0, -1.0};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      cplx comm = 0.0;
      for (std::size_t k = 0; k < 3; ++k) comm += h(i, k) * rho(k, j) - rho(i, k) * h(k, j);
      out(i, j) = minus_i * comm;
    }
  }

  const cplx p3 = rho(2, 2);
  out(2, 2) -= (r.G31 + r.G32) * p3;
  out(0, 0) += r.G31 * p3;
  out(1, 1) += r.G32 * p3;

  out(0, 1) -= r.g12 * rho(0, 1);
  out(1, 0) -= r.g12 * rho(1, 0);
  out(0, 2) -= r.g13 * rho(0, 2);
  out(2, 0) -= r.g13 * rho(2, 0);
  out(1, 2) -= r.g23 * rho(1, 2);
  out(2, 1) -= r.g23 * rho(2, 1);
  return out;
}

/// One classical RK4 step; drive_at(t) supplies the drive at stage times.
template <typename DriveAt>
DensityMatrix rk4_step(const DensityMatrix& rho, double t, double dt, const Rates& r,
                       DriveAt&& drive_at) {
  const DensityMatrix k1 = rhs(rho, drive_at(t, 0), r);
  const DensityMatrix k2 = rhs(rho + (0.5 * dt) * k1, drive_at(t + 0.5 * dt, 1), r);
  const DensityMatrix k3 = rhs(rho + (0.5 * dt) * k2, drive_at(t + 0.5 * dt, 1), r);
  const DensityMatrix k4 = rhs(rho + dt * k3, drive_at(t + dt, 2), r);
  DensityMatrix out = rho;
  for (std::size_t k = 0; k < 9; ++k)
    out.m[k] += (dt / 6.0) * (k1.m[k] + 2.0 * k2.m[k] + 2.0 * k3.m[k] + k4.m[k]);
  return out;
}

inline void require_valid_state(const DensityMatrix& rho, const char* what) {
  const auto rep = validate_density_matrix(rho, 1e-9);
  if (!rep.ok) throw Error(ErrorKind::input, std::string(what) + ": " + rep.violations.front());
}

}  // namespace detail

/// d rho/dt in rad/us units (per microsecond).
inline DensityMatrix liouvillian(const DensityMatrix& rho, const LiouvillianInputs& in) {
  detail::require_valid_state(rho, "liouvillian input state");
  in.params.validate();
  const Drive d{in.probe_khz, in.coupling_khz, in.delta_p_khz, in.delta_c_khz};
  return detail::rhs(rho, detail::to_angular(d, in.delta_inh_khz), detail::Rates(in.params));
}

struct EvolveOptions {
  std::size_t output_stride = 1;
  bool keep_states = false;  // also record the sampled density matrices
};

struct EvolveResult {
  TimeSeries series;
  DensityMatrix final_state;
  std::vector<DensityMatrix> states;  // filled when keep_states
  double max_trace_error = 0.0;       // over output samples
  double max_hermiticity_error = 0.0;
};

/// Throws a configuration error when dt * 2*pi * (largest rate, Rabi frequency
/// or detuning) >= 0.1.
inline void check_step_size(const PulseSequence& seq, const MediumParams& p, double delta_inh_khz,
                            double dt_us) {
  if (!(dt_us > 0.0)) throw Error(ErrorKind::config, "dt_us must be > 0");
  struct Item {
    const char* name;
    double khz;
  };
  const double dp = seq.max_abs_detuning_khz(Transition::probe);
  const double dc = seq.max_abs_detuning_khz(Transition::coupling);
  const Item items[] = {
      {"probe Rabi frequency", seq.max_rabi_khz(Transition::probe)},
      {"coupling Rabi frequency", seq.max_rabi_khz(Transition::coupling)},
      {"probe detuning", dp},
      {"two-photon detuning", dp + dc + std::abs(delta_inh_khz)},
      {"gamma12_khz", p.gamma12_khz},
      {"gamma13_khz", p.gamma13_khz},
      {"gamma23_khz", p.gamma23_khz},
      {"Gamma31_khz + Gamma32_khz", p.Gamma31_khz + p.Gamma32_khz},
  };
  for (const auto& it : items) {
    const double x = dt_us * angular(it.khz);
    if (x >= 0.1)
      throw Error(ErrorKind::config, std::string("dt_us = ") + std::to_string(dt_us) +
                                         " too large for " + it.name + " = " +
                                         std::to_string(it.khz) + " kHz (dt*2*pi*f = " +
                                         std::to_string(x) + ", must be < 0.1)");
  }
}

/// Fixed-step RK4 evolution over [0, total_duration]. Drives are sampled as
/// one-sided limits inside each step, so square edges on the step grid are
/// integrated exactly.
inline EvolveResult evolve(const DensityMatrix& rho0, const PulseSequence& seq,
                           const MediumParams& params, double delta_inh_khz, double dt_us,
                           const EvolveOptions& opt = {}) {
  detail::require_valid_state(rho0, "initial state");
  seq.validate();
  params.validate();
  check_step_size(seq, params, delta_inh_khz, dt_us);
  if (opt.output_stride == 0) throw Error(ErrorKind::config, "output_stride must be >= 1");

  const auto n_steps =
      static_cast<std::size_t>(std::ceil(seq.total_duration_us / dt_us - 1e-9));
  const detail::Rates rates(params);
  const double eps = 1e-9 * dt_us;

  EvolveResult res;
  res.series.reserve(n_steps / opt.output_stride + 1);
  auto record = [&](double t, const DensityMatrix& rho) {
    res.series.append(t, rho);
    if (opt.keep_states) res.states.push_back(rho);
    res.max_trace_error = std::max(res.max_trace_error, std::abs(rho.trace() - 1.0));
    res.max_hermiticity_error = std::max(res.max_hermiticity_error, rho.hermiticity_error());
  };

  DensityMatrix rho = rho0;
  record(0.0, rho);
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = static_cast<double>(n) * dt_us;
    auto drive_at = [&](double ts, int stage) {
      const double tc = stage == 0 ? ts + eps : (stage == 2 ? ts - eps : ts);
      return detail::to_angular(seq.drive(tc), delta_inh_khz);
    };
    rho = detail::rk4_step(rho, t, dt_us, rates, drive_at);
    if ((n + 1) % opt.output_stride == 0) record(static_cast<double>(n + 1) * dt_us, rho);
  }
  res.final_state = rho;
  return res;
}

}  // namespace lsim
