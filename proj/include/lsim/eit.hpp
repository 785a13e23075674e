#pragma once

// Weak-probe EIT steady state, susceptibility spectra and group delay.
//
// Susceptibility convention: chi = n_density_rel * rho31 / Omega_P with Omega_P
// in rad/us, so chi carries units of us. rho31 = conj(rho13) is the
// positive-frequency polarisation; Im chi > 0 is absorption and the probe
// envelope obeys dE/dz = i * kappa * chi * E with kappa = 2*pi*coupling_const.

#include <cmath>
#include <span>
#include <vector>

#include "lsim/core.hpp"

namespace lsim {

/// Speed of light in mm/us.
inline constexpr double speed_of_light_mm_per_us = 299792.458;

/// Weak-probe analytic rho13 (dimensionless) on the probe transition:
///   rho13 = -(i E_P/2)(g2 + i d2) / [(g13 + i dP)(g2 + i d2) + |Om_C|^2/4]
/// with d2 = dP - dC, all angular. Requires Omega_P <= max(Omega_C, gamma13)/5.
inline cplx steady_state_coherence(const MediumParams& params, double delta_p_khz,
                                   double probe_khz, double coupling_khz,
                                   double delta_c_khz = 0.0) {
  params.validate();
  const double scale = std::max(coupling_khz, params.gamma13_khz);
  if (probe_khz < 0.0 || probe_khz > scale / 5.0)
    throw Error(ErrorKind::regime, "weak-probe regime needs probe_khz <= max(coupling_khz, "
                                   "gamma13_khz)/5; got probe_khz = " +
                                       std::to_string(probe_khz));
  const cplx i{0.0, 1.0};
  const double g2 = angular(params.gamma12_khz);
  const double g13 = angular(params.gamma13_khz);
  const double dp = angular(delta_p_khz);
  const double d2 = angular(delta_p_khz - delta_c_khz);
  const double ep = angular(probe_khz);
  const double oc = angular(coupling_khz);
  const cplx spin = g2 + i * d2;
  return -(i * ep / 2.0) * spin / ((g13 + i * dp) * spin + oc * oc / 4.0);
}

struct Spectrum {
  std::vector<double> delta_p_khz;
  std::vector<double> chi_re;
  std::vector<double> chi_im;
};

inline Spectrum susceptibility_spectrum(const MediumParams& params, std::span<const double> grid,
                                        double probe_khz, double coupling_khz,
                                        double delta_c_khz = 0.0) {
  if (grid.empty()) throw Error(ErrorKind::input, "susceptibility grid is empty");
  if (!(probe_khz > 0.0)) throw Error(ErrorKind::regime, "probe_khz must be > 0");
  Spectrum s;
  s.delta_p_khz.assign(grid.begin(), grid.end());
  const double ep = angular(probe_khz);
  for (double d : grid) {
    const cplx r13 = steady_state_coherence(params, d, probe_khz, coupling_khz, delta_c_khz);
    const cplx chi = params.n_density_rel * std::conj(r13) / ep;
    s.chi_re.push_back(chi.real());
    s.chi_im.push_back(chi.imag());
  }
  return s;
}

struct GroupDelay {
  double delay_us = 0.0;            // retarded-frame group delay (vacuum transit excluded)
  double vacuum_transit_us = 0.0;   // L / c
  double dchi_re_ddelta = 0.0;      // d Re chi / d delta_P at line centre, us^2
  double group_index = 1.0;         // 1 + c * delay / L
  double v_g_rel = 1.0;             // v_g / c

  double total_us() const { return delay_us + vacuum_transit_us; }
};

/// Group delay from the dispersion slope at delta_P = 0 (centred 5-point
/// difference). The grid must be uniform around 0; a 3-point estimate that
/// disagrees by more than 1e-3 relative is reported as a resolution error.
inline GroupDelay group_delay(const Spectrum& spec, const MediumParams& params) {
  params.validate();
  const auto& g = spec.delta_p_khz;
  if (g.size() != spec.chi_re.size() || g.size() != spec.chi_im.size())
    throw Error(ErrorKind::schema, "spectrum grid and channels differ in length");
  std::size_t c = g.size();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g[i]) <= 1e-12 * (1.0 + std::abs(g.back() - g.front()))) c = i;
  if (c == g.size()) throw Error(ErrorKind::input, "delta_P = 0 is not on the spectrum grid");
  if (c < 2 || c + 2 >= g.size())
    throw Error(ErrorKind::resolution, "need two grid points on each side of line centre");
  const double h = g[c + 1] - g[c];
  for (int k = -2; k < 2; ++k) {
    const double step = g[c + k + 1] - g[c + k];
    if (std::abs(step - h) > 1e-9 * std::abs(h))
      throw Error(ErrorKind::resolution, "grid not uniform around line centre");
  }
  const double ha = angular(h);
  const auto& f = spec.chi_re;
  const double d5 = (-f[c + 2] + 8.0 * f[c + 1] - 8.0 * f[c - 1] + f[c - 2]) / (12.0 * ha);
  const double d3 = (f[c + 1] - f[c - 1]) / (2.0 * ha);
  if (std::abs(d5 - d3) > 1e-3 * std::max(std::abs(d5), 1e-300) && std::abs(d5) > 0.0)
    throw Error(ErrorKind::resolution, "grid spacing " + std::to_string(h) +
                                           " kHz too coarse for the dispersion slope");

  GroupDelay out;
  out.dchi_re_ddelta = d5;
  out.delay_us = angular(params.coupling_const) * params.length_mm * d5;
  out.vacuum_transit_us = params.length_mm / speed_of_light_mm_per_us;
  out.group_index = 1.0 + speed_of_light_mm_per_us * out.delay_us / params.length_mm;
  out.v_g_rel = 1.0 / out.group_index;
  return out;
}

/// Least-squares exponent b of y = a * x^b (log-log fit). x, y > 0.
inline double fit_power_law_exponent(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorKind::fit, "power-law fit needs at least two (x, y) pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorKind::fit, "power-law fit needs x, y > 0");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw Error(ErrorKind::fit, "power-law fit needs distinct x values");
  return (n * sxy - sx * sy) / den;
}

}  // namespace lsim
