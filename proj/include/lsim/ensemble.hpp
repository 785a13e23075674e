#pragma once

// Inhomogeneous spin ensemble: detuning sampling, weighted averaging of
// member evolutions, free-induction-decay time and two-photon-detuning maps.

#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "lsim/bloch.hpp"
#include "lsim/parallel.hpp"

namespace lsim {

enum class Distribution { lorentzian, gaussian };

enum class Sampling {
  quantile,     // equal-mass midpoints, equal weights
  monte_carlo,  // seeded random draws, equal weights
  grid,         // uniform detuning grid over the clip range, pdf weights
};

struct EnsembleSpec {
  Distribution distribution = Distribution::lorentzian;
  double fwhm_khz = 30.0;
  std::size_t n_members = 201;
  Sampling sampling = Sampling::quantile;
  std::uint64_t seed = 1;
  double clip_fwhm = 10.0;  // samples limited to +-clip_fwhm * fwhm_khz

  void validate() const {
    if (!(fwhm_khz >= 0.0)) throw Error(ErrorKind::input, "fwhm_khz must be >= 0");
    if (n_members == 0) throw Error(ErrorKind::input, "n_members must be >= 1");
    if (!(clip_fwhm > 0.0)) throw Error(ErrorKind::input, "clip_fwhm must be > 0");
  }
};

struct Member {
  double delta_khz = 0.0;
  double weight = 0.0;
};

namespace detail {

inline double gaussian_sigma(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

inline double inverse_cdf(Distribution d, double fwhm, double p) {
  if (d == Distribution::lorentzian)
    return boost::math::quantile(boost::math::cauchy_distribution<double>(0.0, 0.5 * fwhm), p);
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, gaussian_sigma(fwhm)),
                               p);
}

inline double pdf(Distribution d, double fwhm, double x) {
  if (d == Distribution::lorentzian) {
    const double hw = 0.5 * fwhm;
    return hw / (std::numbers::pi * (x * x + hw * hw));
  }
  const double s = gaussian_sigma(fwhm);
  return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace detail

inline std::vector<Member> sample_detunings(const EnsembleSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_members;
  std::vector<Member> out(n);
  if (n == 1 || spec.fwhm_khz == 0.0) {
    // degenerate: all members on line centre
    for (auto& m : out) m = {0.0, 1.0 / static_cast<double>(n)};
    return out;
  }
  const double clip = spec.clip_fwhm * spec.fwhm_khz;
  switch (spec.sampling) {
    case Sampling::quantile: {
      // lower half computed, upper half mirrored: exact symmetry about 0
      for (std::size_t k = 0; k < n / 2; ++k) {
        const double p = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
        const double d = std::max(-clip, detail::inverse_cdf(spec.distribution, spec.fwhm_khz, p));
        out[k].delta_khz = d;
        out[n - 1 - k].delta_khz = -d;
      }
      if (n % 2 == 1) out[n / 2].delta_khz = 0.0;
      for (auto& m : out) m.weight = 1.0 / static_cast<double>(n);
      break;
    }
    case Sampling::monte_carlo: {
      std::mt19937_64 rng(spec.seed);
      for (auto& m : out) {
        double d = 0.0;
        if (spec.distribution == Distribution::lorentzian) {
          std::cauchy_distribution<double> dist(0.0, 0.5 * spec.fwhm_khz);
          d = dist(rng);
        } else {
          std::normal_distribution<double> dist(0.0, detail::gaussian_sigma(spec.fwhm_khz));
          d = dist(rng);
        }
        m = {std::clamp(d, -clip, clip), 1.0 / static_cast<double>(n)};
      }
      break;
    }
    case Sampling::grid: {
      double total = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double d = -clip + 2.0 * clip * static_cast<double>(k) / static_cast<double>(n - 1);
        out[k] = {d, detail::pdf(spec.distribution, spec.fwhm_khz, d)};
      }
      for (std::size_t k = 0; k < n / 2; ++k) out[n - 1 - k].delta_khz = -out[k].delta_khz;
      for (const auto& m : out) total += m.weight;
      for (auto& m : out) m.weight /= total;
      break;
    }
  }
  return out;
}

struct EnsembleResult {
  TimeSeries averaged;
  std::vector<DensityMatrix> averaged_states;  // when EvolveOptions::keep_states
  std::vector<Member> members;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
};

/// Weighted average over members of bloch::evolve with per-member delta_inh.
/// Members may run concurrently; the reduction is in member-index order.
inline EnsembleResult ensemble_evolve(const DensityMatrix& rho0, const PulseSequence& seq,
                                      const MediumParams& params, const EnsembleSpec& spec,
                                      double dt_us, const EvolveOptions& opt = {}) {
  EnsembleResult res;
  res.members = sample_detunings(spec);
  const std::size_t n = res.members.size();

  // evolve in blocks so memory stays bounded; reduce each block in index order
  constexpr std::size_t block = 64;
  std::size_t n_t = 0;
  for (std::size_t start = 0; start < n; start += block) {
    const std::size_t len = std::min(block, n - start);
    const auto runs = parallel_map<EvolveResult>(len, [&](std::size_t k) {
      return evolve(rho0, seq, params, res.members[start + k].delta_khz, dt_us, opt);
    });
    if (start == 0) {
      n_t = runs.front().series.size();
      res.averaged.t_us = runs.front().series.t_us;
      for (auto& c : res.averaged.channels) c.assign(n_t, 0.0);
      if (opt.keep_states) res.averaged_states.assign(n_t, DensityMatrix{});
    }
    for (std::size_t k = 0; k < len; ++k) {
      const double w = res.members[start + k].weight;
      const auto& s = runs[k].series;
      for (std::size_t c = 0; c < channel_count; ++c)
        for (std::size_t i = 0; i < n_t; ++i) res.averaged.channels[c][i] += w * s.channels[c][i];
      if (opt.keep_states)
        for (std::size_t i = 0; i < n_t; ++i) res.averaged_states[i] += w * runs[k].states[i];
      res.max_trace_error = std::max(res.max_trace_error, runs[k].max_trace_error);
      res.max_hermiticity_error =
          std::max(res.max_hermiticity_error, runs[k].max_hermiticity_error);
    }
  }
  return res;
}

/// Time after t_start at which |channel| first drops to 1/e of its value at
/// t_start, linearly interpolated between samples.
inline double fid_decay_time(const TimeSeries& ts, Channel channel, double t_start_us) {
  ts.validate();
  const auto& v = ts[channel];
  std::size_t i0 = 0;
  while (i0 < ts.size() && ts.t_us[i0] < t_start_us) ++i0;
  if (i0 >= ts.size()) throw Error(ErrorKind::input, "t_start_us beyond the end of the series");
  const double v0 = std::abs(v[i0]);
  if (v0 == 0.0) throw Error(ErrorKind::no_decay, "channel is zero at t_start");
  const double target = v0 / std::numbers::e;

  std::size_t below = 0;
  double crossing = -1.0;
  for (std::size_t i = i0 + 1; i < ts.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a <= target) {
      ++below;
      if (crossing < 0.0) {
        const double b = std::abs(v[i - 1]);
        const double f = (b - target) / (b - a);
        crossing = ts.t_us[i - 1] + f * (ts.t_us[i] - ts.t_us[i - 1]) - ts.t_us[i0];
      }
    }
  }
  if (crossing < 0.0) throw Error(ErrorKind::no_decay, "channel never reaches 1/e of its start");
  if (below < 10)
    throw Error(ErrorKind::no_decay, "fewer than 10 samples below 1/e; extend the series");
  return crossing;
}

struct TwoPhotonMaps {
  std::vector<SpectralMap> maps;  // one per requested channel
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
};

/// One evolution per grid point (delta_inh = delta2), several channels at once.
inline TwoPhotonMaps two_photon_maps(const DensityMatrix& rho0, const PulseSequence& seq,
                                     const MediumParams& params, std::span<const double> grid_khz,
                                     double dt_us, std::span<const Channel> channels,
                                     std::size_t output_stride = 1) {
  if (grid_khz.empty()) throw Error(ErrorKind::input, "two-photon detuning grid is empty");
  const auto runs = parallel_map<EvolveResult>(grid_khz.size(), [&](std::size_t k) {
    return evolve(rho0, seq, params, grid_khz[k], dt_us, {output_stride, false});
  });
  TwoPhotonMaps out;
  for (Channel c : channels) {
    SpectralMap m;
    m.delta2_khz.assign(grid_khz.begin(), grid_khz.end());
    m.t_us = runs.front().series.t_us;
    m.values.reserve(m.delta2_khz.size() * m.t_us.size());
    for (const auto& r : runs) {
      const auto& v = r.series[c];
      m.values.insert(m.values.end(), v.begin(), v.end());
    }
    out.maps.push_back(std::move(m));
  }
  for (const auto& r : runs) {
    out.max_trace_error = std::max(out.max_trace_error, r.max_trace_error);
    out.max_hermiticity_error = std::max(out.max_hermiticity_error, r.max_hermiticity_error);
  }
  return out;
}

inline SpectralMap two_photon_map(const DensityMatrix& rho0, const PulseSequence& seq,
                                  const MediumParams& params, std::span<const double> grid_khz,
                                  double dt_us, Channel channel, std::size_t output_stride = 1) {
  const Channel chs[] = {channel};
  return std::move(two_photon_maps(rho0, seq, params, grid_khz, dt_us, chs, output_stride).maps[0]);
}

/// Detuning grid of n points spanning [lo, hi] inclusive.
inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::input, "grid needs at least one point");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  // mirror so symmetric ranges are exactly symmetric
  if (lo == -hi) {
    for (std::size_t i = 0; i < n / 2; ++i) g[n - 1 - i] = -g[i];
    if (n % 2 == 1) g[n / 2] = 0.0;
  }
  return g;
}

}  // namespace lsim
