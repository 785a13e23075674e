#pragma once

// Reduced Maxwell-Bloch propagation of a weak probe envelope in the retarded
// frame (vacuum transit removed).
//
// The probe Rabi samples E_P(t) are those of the Bloch equations; in that
// parameterisation the slowly varying field obeys
//   dE_P/dz = -i * eta * rho13,   eta = coupling_const * n_density_rel  (kHz/mm)
// which is dE/dz = i*eta*rho31 for the physical envelope conj(E_P). The z-march
// is Heun (predictor-corrector): two atomic evolutions per slab, RK4 in time
// with the field linearly interpolated at half steps.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "lsim/bloch.hpp"

namespace lsim {

/// Probe envelope on a uniform time grid (Bloch-frame Rabi samples, kHz).
struct Envelope {
  std::vector<double> t_us;
  std::vector<cplx> field_khz;

  std::size_t size() const { return t_us.size(); }
  double dt_us() const { return t_us.size() > 1 ? t_us[1] - t_us[0] : 0.0; }

  std::vector<double> intensity() const {
    std::vector<double> out(field_khz.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(field_khz[i]);
    return out;
  }

  double energy() const {
    double s = 0.0;
    for (const auto& e : field_khz) s += std::norm(e);
    return s * dt_us();
  }

  void validate() const {
    if (t_us.size() < 3) throw Error(ErrorKind::input, "envelope needs at least 3 samples");
    if (field_khz.size() != t_us.size())
      throw Error(ErrorKind::schema, "envelope field and time grid differ in length");
    const double h = dt_us();
    if (!(h > 0.0)) throw Error(ErrorKind::input, "envelope time grid not increasing");
    for (std::size_t i = 1; i < t_us.size(); ++i)
      if (std::abs(t_us[i] - t_us[i - 1] - h) > 1e-9 * h)
        throw Error(ErrorKind::input, "envelope time grid not uniform");
  }
};

/// Gaussian pulse with the given intensity FWHM, sampled at t = i*dt.
inline Envelope gaussian_envelope(double window_us, double dt_us, double center_us,
                                  double fwhm_us, double peak_khz) {
  if (!(dt_us > 0.0) || !(window_us > dt_us)) throw Error(ErrorKind::input, "bad envelope grid");
  if (!(fwhm_us > 0.0)) throw Error(ErrorKind::input, "pulse fwhm must be > 0");
  Envelope e;
  const auto n = static_cast<std::size_t>(std::llround(window_us / dt_us)) + 1;
  // intensity exp(-4 ln2 (t-tc)^2 / fwhm^2)  ->  field exp(-2 ln2 (t-tc)^2 / fwhm^2)
  const double a = 2.0 * std::log(2.0) / (fwhm_us * fwhm_us);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt_us;
    e.t_us.push_back(t);
    e.field_khz.emplace_back(peak_khz * std::exp(-a * (t - center_us) * (t - center_us)), 0.0);
  }
  return e;
}

struct PropagationGrid {
  std::size_t n_z = 1024;  // slab count; slab thickness = length_mm / n_z
  // Always the retarded frame; the time step is that of the input envelope.
  static constexpr bool retarded_frame = true;

  void validate() const {
    if (n_z < 2) throw Error(ErrorKind::config, "n_z must be >= 2");
  }
};

struct PropagationOptions {
  std::optional<std::size_t> snapshot_index;  // record every node's state at this sample
  double stability_limit = 1.0;               // max eta_ang * dz * chi''_max per slab
};

struct PropagationResult {
  Envelope output;
  std::vector<double> z_mm;         // node positions, n_z + 1
  std::vector<double> node_energy;  // pulse energy (kHz^2 us) at each node
  std::vector<DensityMatrix> snapshots;  // node states at snapshot_index, when requested
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
};

namespace detail {

struct SlabRun {
  std::vector<cplx> rho13;
  DensityMatrix snapshot;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
};

/// Atoms at one node, starting in |1>, driven by sampled probe values and the
/// coupling part of seq.
inline SlabRun evolve_sampled(const Envelope& probe, const PulseSequence& coupling,
                              const Rates& rates, std::optional<std::size_t> snapshot_index) {
  const double dt = probe.dt_us();
  const double eps = 1e-9 * dt;
  const std::size_t n = probe.size();
  SlabRun run;
  run.rho13.resize(n);
  DensityMatrix rho = DensityMatrix::ground(0);
  auto note = [&](std::size_t i) {
    run.rho13[i] = rho(0, 2);
    run.max_trace_error = std::max(run.max_trace_error, std::abs(rho.trace() - 1.0));
    run.max_hermiticity_error = std::max(run.max_hermiticity_error, rho.hermiticity_error());
    if (snapshot_index && *snapshot_index == i) run.snapshot = rho;
  };
  note(0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const cplx p0 = probe.field_khz[i], p1 = probe.field_khz[i + 1];
    auto drive_at = [&](double ts, int stage) {
      const double tc = stage == 0 ? ts + eps : (stage == 2 ? ts - eps : ts);
      Drive d = coupling.drive(tc);
      d.probe = stage == 0 ? p0 : (stage == 2 ? p1 : 0.5 * (p0 + p1));
      return to_angular(d, 0.0);
    };
    rho = rk4_step(rho, probe.t_us[i], dt, rates, drive_at);
    note(i + 1);
  }
  return run;
}

}  // namespace detail

/// Propagates probe through the medium under the coupling field described by
/// coupling (only coupling-transition pulses are used; probe pulses in it are
/// ignored). Returns the exit envelope and the energy at every node.
inline PropagationResult propagate_pulse(const Envelope& probe, const PulseSequence& coupling,
                                         const MediumParams& params, const PropagationGrid& grid,
                                         const PropagationOptions& opt = {}) {
  probe.validate();
  params.validate();
  grid.validate();

  PulseSequence cseq;
  cseq.total_duration_us = std::max(coupling.total_duration_us, probe.t_us.back());
  for (const auto& p : coupling.pulses)
    if (p.transition == Transition::coupling) cseq.pulses.push_back(p);
  cseq.validate();

  double peak = 0.0;
  for (const auto& e : probe.field_khz) peak = std::max(peak, std::abs(e));
  const double omega_c = cseq.max_rabi_khz(Transition::coupling);
  const double weak = std::max(omega_c, params.gamma13_khz) / 5.0;
  if (peak > weak)
    throw Error(ErrorKind::regime, "probe peak " + std::to_string(peak) +
                                       " kHz exceeds the weak-probe bound " +
                                       std::to_string(weak) + " kHz");

  // step guard on the atomic integration, probe included
  PulseSequence guard = cseq;
  guard.pulses.push_back({Transition::probe, peak, probe.t_us.front(), probe.t_us.back()});
  check_step_size(guard, params, 0.0, probe.dt_us());

  const double eta = params.coupling_const * params.n_density_rel;  // kHz/mm
  const double dz = params.length_mm / static_cast<double>(grid.n_z);
  if (eta != 0.0) {
    if (!(params.gamma13_khz > 0.0))
      throw Error(ErrorKind::config, "propagation needs gamma13_khz > 0");
    // resonant two-level absorption rate per mm: eta_ang / (2 gamma13_ang)
    const double alpha = std::abs(angular(eta)) / (2.0 * angular(params.gamma13_khz));
    if (alpha * dz > opt.stability_limit) {
      const auto need =
          static_cast<std::size_t>(std::ceil(alpha * params.length_mm / opt.stability_limit));
      throw Error(ErrorKind::config, "n_z = " + std::to_string(grid.n_z) +
                                         " too small for the optical depth; need n_z >= " +
                                         std::to_string(need));
    }
  }
  if (opt.snapshot_index && *opt.snapshot_index >= probe.size())
    throw Error(ErrorKind::input, "snapshot index beyond the envelope");

  const detail::Rates rates(params);
  PropagationResult res;
  res.z_mm.reserve(grid.n_z + 1);
  res.node_energy.reserve(grid.n_z + 1);

  Envelope field = probe;
  auto absorb = [&](const detail::SlabRun& r) {
    res.max_trace_error = std::max(res.max_trace_error, r.max_trace_error);
    res.max_hermiticity_error = std::max(res.max_hermiticity_error, r.max_hermiticity_error);
  };
  const cplx step = cplx{0.0, -1.0} * eta * dz;
  const std::size_t n_t = probe.size();

  for (std::size_t j = 0; j < grid.n_z; ++j) {
    res.z_mm.push_back(static_cast<double>(j) * dz);
    res.node_energy.push_back(field.energy());
    if (eta == 0.0 && !opt.snapshot_index) continue;  // vacuum: field unchanged

    const auto here = detail::evolve_sampled(field, cseq, rates, opt.snapshot_index);
    absorb(here);
    if (opt.snapshot_index) res.snapshots.push_back(here.snapshot);
    if (eta == 0.0) continue;

    Envelope pred = field;
    for (std::size_t i = 0; i < n_t; ++i) pred.field_khz[i] += step * here.rho13[i];
    const auto next = detail::evolve_sampled(pred, cseq, rates, std::nullopt);
    absorb(next);
    for (std::size_t i = 0; i < n_t; ++i)
      field.field_khz[i] += 0.5 * step * (here.rho13[i] + next.rho13[i]);
  }
  res.z_mm.push_back(params.length_mm);
  res.node_energy.push_back(field.energy());
  if (opt.snapshot_index) {
    const auto last = detail::evolve_sampled(field, cseq, rates, opt.snapshot_index);
    absorb(last);
    res.snapshots.push_back(last.snapshot);
  }
  res.output = std::move(field);
  return res;
}

/// z-average (trapezoid) of node states, e.g. the snapshots of a propagation.
inline DensityMatrix medium_average(std::span<const DensityMatrix> nodes) {
  if (nodes.size() < 2) throw Error(ErrorKind::input, "medium average needs >= 2 nodes");
  DensityMatrix avg;
  const double w = 1.0 / static_cast<double>(nodes.size() - 1);
  for (std::size_t j = 0; j < nodes.size(); ++j)
    avg += ((j == 0 || j + 1 == nodes.size()) ? 0.5 * w : w) * nodes[j];
  return avg;
}

enum class DelayMethod { peak, centroid };

/// Delay of output relative to input (both non-negative profiles, usually
/// intensities, on the same time grid).
inline double extract_delay(std::span<const double> t_us, std::span<const double> input,
                            std::span<const double> output, DelayMethod method) {
  if (t_us.size() < 3 || input.size() != t_us.size() || output.size() != t_us.size())
    throw Error(ErrorKind::schema, "delay extraction needs equal-length series of >= 3 samples");

  auto locate = [&](std::span<const double> v, const char* which) {
    std::vector<double> mags(v.size());
    std::transform(v.begin(), v.end(), mags.begin(), [](double x) { return std::abs(x); });
    auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    const double floor = *mid;
    const auto it = std::max_element(v.begin(), v.end());
    const double top = *it;
    if (!(top > 10.0 * floor) || !(top > 0.0))
      throw Error(ErrorKind::detection, std::string("no dominant pulse in the ") + which +
                                            " series (max <= 10x median floor)");
    if (method == DelayMethod::centroid) {
      double s = 0.0, st = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        s += v[i];
        st += v[i] * t_us[i];
      }
      return st / s;
    }
    const auto k = static_cast<std::size_t>(it - v.begin());
    if (k == 0 || k + 1 == v.size()) return t_us[k];
    const double a = v[k - 1], b = v[k], c = v[k + 1];
    const double den = a - 2.0 * b + c;
    const double shift = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
    const double h = 0.5 * (t_us[k + 1] - t_us[k - 1]);
    return t_us[k] + shift * h;
  };
  return locate(output, "output") - locate(input, "input");
}

}  // namespace lsim
