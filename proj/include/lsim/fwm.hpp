#pragma once

// Read-out of stored spin coherence by a coupling-transition pulse, the
// conversion law E_D ~ -d/dt Re(rho12), detector intensity and phase matching.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "lsim/bloch.hpp"
#include "lsim/parallel.hpp"

namespace lsim {

struct ConversionFit {
  double scale = 0.0;         // e_d ~ scale * (-d Re rho12 / dt)
  double pearson_r = 0.0;
  double max_residual = 0.0;  // relative to max |e_d|
};

struct ReadoutResult {
  TimeSeries series;  // absolute times, covering the read-out pulse
  double omega_a_khz = 0.0;
  bool oscillation_detected = false;
  std::size_t slope_reversals = 0;
  std::optional<ConversionFit> conversion_fit;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
};

struct ReadoutOptions {
  std::size_t output_stride = 10;
  std::size_t min_reversals = 1;  // turning points of Im rho13 that count as oscillation
  double noise_floor = 1e-6;      // hysteresis for turning-point detection
};

/// Slope-sign reversals of v, ignoring wiggles smaller than floor.
inline std::size_t count_slope_reversals(std::span<const double> v, double floor) {
  if (v.empty()) return 0;
  int dir = 0;  // +1 rising, -1 falling, 0 not yet moved by more than floor
  double lo = v[0], hi = v[0], extreme = v[0];
  std::size_t reversals = 0;
  for (double x : v) {
    if (dir == 0) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      if (x - lo > floor) dir = 1, extreme = x;
      else if (hi - x > floor) dir = -1, extreme = x;
    } else if (dir == 1) {
      if (x > extreme) extreme = x;
      else if (extreme - x > floor) dir = -1, extreme = x, ++reversals;
    } else {
      if (x < extreme) extreme = x;
      else if (x - extreme > floor) dir = 1, extreme = x, ++reversals;
    }
  }
  return reversals;
}

/// Evolves rho_start under the read-out pulse alone (no probe, no back-action
/// of the emitted field). The series starts at the pulse's t_on.
inline ReadoutResult readout_conversion(const DensityMatrix& rho_start, const Pulse& readout,
                                        const MediumParams& params, double dt_us,
                                        const ReadoutOptions& opt = {}) {
  if (readout.transition != Transition::coupling)
    throw Error(ErrorKind::input, "read-out pulse must drive the coupling transition");
  Pulse p = readout;
  p.t_on_us = 0.0;
  p.t_off_us = readout.t_off_us - readout.t_on_us;
  PulseSequence seq{{p}, p.t_off_us};
  auto run = evolve(rho_start, seq, params, 0.0, dt_us, {opt.output_stride, false});

  ReadoutResult r;
  r.omega_a_khz = readout.rabi_khz;
  r.series = std::move(run.series);
  r.max_trace_error = run.max_trace_error;
  r.max_hermiticity_error = run.max_hermiticity_error;
  for (auto& t : r.series.t_us) t += readout.t_on_us;
  r.slope_reversals = count_slope_reversals(r.series[Channel::im_rho13], opt.noise_floor);
  r.oscillation_detected = r.slope_reversals >= opt.min_reversals;
  return r;
}

/// Least-squares scale of e_d against -d/dt Re(rho12) (centred differences on
/// interior samples), with Pearson r and the relative max residual.
inline ConversionFit verify_conversion_law(const ReadoutResult& result) {
  const auto& ts = result.series;
  ts.validate();
  if (ts.size() < 3) throw Error(ErrorKind::fit, "need at least 3 samples for a derivative");
  const auto& re12 = ts[Channel::re_rho12];
  const auto& ed = ts[Channel::e_d_arb];
  std::vector<double> x, y;
  for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
    x.push_back(-(re12[i + 1] - re12[i - 1]) / (ts.t_us[i + 1] - ts.t_us[i - 1]));
    y.push_back(ed[i]);
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
  if (sxx == 0.0 || syy == 0.0 || vx <= 0.0 || vy <= 0.0)
    throw Error(ErrorKind::fit, "degenerate read-out series (no stored coherence converted)");

  ConversionFit fit;
  fit.scale = sxy / sxx;
  fit.pearson_r = std::clamp((sxy - sx * sy / n) / std::sqrt(vx * vy), -1.0, 1.0);
  double peak = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    peak = std::max(peak, std::abs(y[i]));
    worst = std::max(worst, std::abs(y[i] - fit.scale * x[i]));
  }
  fit.max_residual = worst / peak;
  return fit;
}

/// readout_conversion for every value in omega_a_khz, with template's timing,
/// shape and phase. Results are in input order; each carries its fit.
inline std::vector<ReadoutResult> sweep_readout(const DensityMatrix& rho_start,
                                                std::span<const double> omega_a_khz,
                                                const Pulse& pulse_template,
                                                const MediumParams& params, double dt_us,
                                                const ReadoutOptions& opt = {}) {
  return parallel_map<ReadoutResult>(omega_a_khz.size(), [&](std::size_t k) {
    Pulse p = pulse_template;
    p.rabi_khz = omega_a_khz[k];
    auto r = readout_conversion(rho_start, p, params, dt_us, opt);
    r.conversion_fit = verify_conversion_law(r);
    return r;
  });
}

/// Pointwise square of the e_d_arb channel.
inline std::vector<double> detector_intensity(const TimeSeries& ts) {
  const auto& e = ts[Channel::e_d_arb];
  if (e.size() != ts.size() || ts.size() == 0)
    throw Error(ErrorKind::schema, "time series has no e_d_arb channel");
  std::vector<double> out(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) out[i] = e[i] * e[i];
  return out;
}

struct PhaseMatch {
  WaveVector k_d;
  double mismatch = 0.0;  // | |k_D| - omega_D/c |, rad/m
};

/// k_D = k_C - k_P + k_A.
inline PhaseMatch phase_match(const WaveVector& k_c, const WaveVector& k_p, const WaveVector& k_a,
                              double omega_d_over_c) {
  PhaseMatch pm;
  pm.k_d = k_c - k_p + k_a;
  pm.mismatch = std::abs(pm.k_d.norm() - omega_d_over_c);
  return pm;
}

}  // namespace lsim
