#pragma once

// Domain types shared by every lsim module.
//
// Units: frequencies and rates are ordinary frequencies in kHz, times are in
// microseconds. Dynamical equations work in angular units (rad/us); use
// angular() to convert. Levels |1>, |2>, |3> map to indices 0, 1, 2.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lsim {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// kHz -> rad/us.
constexpr double angular(double khz) noexcept { return two_pi * khz * 1e-3; }

/// rad/us -> kHz.
constexpr double ordinary(double rad_per_us) noexcept { return rad_per_us / (two_pi * 1e-3); }

enum class ErrorKind {
  input,       // rejected input (invalid state, empty grid, ...)
  config,      // configuration / step-size problems
  regime,      // physical regime precondition violated
  resolution,  // grid too coarse for a derivative
  detection,   // no pulse found
  fit,         // degenerate fit
  no_decay,    // channel never decays to 1/e
  schema,      // missing channel or malformed table
  render,      // nothing to plot
  io,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::input: return "input error";
    case ErrorKind::config: return "configuration error";
    case ErrorKind::regime: return "regime error";
    case ErrorKind::resolution: return "resolution error";
    case ErrorKind::detection: return "detection error";
    case ErrorKind::fit: return "fit error";
    case ErrorKind::no_decay: return "no-decay error";
    case ErrorKind::schema: return "schema error";
    case ErrorKind::render: return "render error";
    case ErrorKind::io: return "I/O error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// ---------------------------------------------------------------------------
// DensityMatrix

/// 3x3 complex matrix, row-major. Used both for states and for their time
/// derivatives.
struct DensityMatrix {
  std::array<cplx, 9> m{};

  constexpr cplx& operator()(std::size_t i, std::size_t j) { return m[3 * i + j]; }
  constexpr const cplx& operator()(std::size_t i, std::size_t j) const { return m[3 * i + j]; }

  static DensityMatrix diag(double p1, double p2, double p3) {
    DensityMatrix r;
    r(0, 0) = p1;
    r(1, 1) = p2;
    r(2, 2) = p3;
    return r;
  }

  /// |level><level|, level in {0,1,2}.
  static DensityMatrix ground(std::size_t level = 0) {
    DensityMatrix r;
    r(level, level) = 1.0;
    return r;
  }

  /// |psi><psi| for an (unnormalised) amplitude vector; normalised here.
  static DensityMatrix pure(const std::array<cplx, 3>& psi) {
    double norm = 0.0;
    for (const auto& a : psi) norm += std::norm(a);
    DensityMatrix r;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) r(i, j) = psi[i] * std::conj(psi[j]) / norm;
    return r;
  }

  cplx trace() const { return m[0] + m[4] + m[8]; }

  /// max |rho_ij - conj(rho_ji)|
  double hermiticity_error() const {
    double e = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i; j < 3; ++j)
        e = std::max(e, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return e;
  }

  DensityMatrix& operator+=(const DensityMatrix& o) {
    for (std::size_t k = 0; k < 9; ++k) m[k] += o.m[k];
    return *this;
  }
  DensityMatrix& operator*=(double s) {
    for (auto& v : m) v *= s;
    return *this;
  }
  friend DensityMatrix operator+(DensityMatrix a, const DensityMatrix& b) { return a += b; }
  friend DensityMatrix operator*(DensityMatrix a, double s) { return a *= s; }
  friend DensityMatrix operator*(double s, DensityMatrix a) { return a *= s; }

  bool operator==(const DensityMatrix&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
  double hermiticity_error = 0.0;
  double trace_error = 0.0;
};

/// Reports Hermiticity, trace and population-range violations larger than tol.
inline ValidationReport validate_density_matrix(const DensityMatrix& rho, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::input, "validation tolerance must be positive");
  ValidationReport r;
  r.hermiticity_error = rho.hermiticity_error();
  r.trace_error = std::abs(rho.trace() - 1.0);
  if (r.hermiticity_error > tol)
    r.violations.push_back("hermiticity: max |rho_ij - conj(rho_ji)| = " +
                           std::to_string(r.hermiticity_error));
  if (r.trace_error > tol)
    r.violations.push_back("trace: |tr rho - 1| = " + std::to_string(r.trace_error));
  for (std::size_t i = 0; i < 3; ++i) {
    const cplx p = rho(i, i);
    if (std::abs(p.imag()) > tol)
      r.violations.push_back("population " + std::to_string(i + 1) + " has imaginary part");
    if (p.real() < -tol || p.real() > 1.0 + tol)
      r.violations.push_back("population " + std::to_string(i + 1) + " out of [0,1]: " +
                             std::to_string(p.real()));
  }
  r.ok = r.violations.empty();
  return r;
}

// ---------------------------------------------------------------------------
// Pulses

enum class Transition { probe, coupling };  // |1>-|3>, |2>-|3>
enum class EdgeShape { square, raised_cosine };

struct Pulse {
  Transition transition = Transition::probe;
  double rabi_khz = 0.0;
  double t_on_us = 0.0;
  double t_off_us = 0.0;
  EdgeShape edge = EdgeShape::square;
  double edge_us = 0.0;
  double detuning_khz = 0.0;  // delta_P on the probe transition, delta_C on the coupling one
  double phase_deg = 0.0;     // optical phase of the Rabi frequency

  void validate() const {
    if (!(t_off_us > t_on_us)) throw Error(ErrorKind::input, "pulse needs t_off_us > t_on_us");
    if (!(rabi_khz >= 0.0)) throw Error(ErrorKind::input, "pulse rabi_khz must be >= 0");
    if (edge == EdgeShape::raised_cosine) {
      if (!(edge_us > 0.0)) throw Error(ErrorKind::input, "raised-cosine edge_us must be > 0");
      if (edge_us > 0.5 * (t_off_us - t_on_us))
        throw Error(ErrorKind::input, "edge_us exceeds half the pulse length");
    }
  }
};

/// Rabi frequency (kHz) of p at time t; zero outside [t_on, t_off].
inline double pulse_envelope(const Pulse& p, double t_us) {
  if (t_us < p.t_on_us || t_us > p.t_off_us) return 0.0;
  if (p.edge == EdgeShape::square || p.edge_us <= 0.0) return p.rabi_khz;
  const double rise = t_us - p.t_on_us;
  const double fall = p.t_off_us - t_us;
  const double x = std::min(rise, fall);
  if (x >= p.edge_us) return p.rabi_khz;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * x / p.edge_us)) * p.rabi_khz;
}

/// Complex Rabi amplitude (kHz) including the pulse phase.
inline cplx pulse_field(const Pulse& p, double t_us) {
  const double env = pulse_envelope(p, t_us);
  if (env == 0.0) return {0.0, 0.0};
  if (p.phase_deg == 0.0) return {env, 0.0};
  const double rad = p.phase_deg * std::numbers::pi / 180.0;
  double c = std::cos(rad), s = std::sin(rad);
  // exact zeros at multiples of 90 degrees keep mirrored detunings bit-symmetric
  if (std::abs(c) < 1e-15) c = 0.0;
  if (std::abs(s) < 1e-15) s = 0.0;
  return {env * c, env * s};
}

/// Instantaneous drive on both transitions (kHz).
struct Drive {
  cplx probe{};
  cplx coupling{};
  double delta_p_khz = 0.0;
  double delta_c_khz = 0.0;
};

struct PulseSequence {
  std::vector<Pulse> pulses;
  double total_duration_us = 0.0;

  void validate() const {
    double last = 0.0;
    for (const auto& p : pulses) {
      p.validate();
      last = std::max(last, p.t_off_us);
    }
    if (!(total_duration_us > 0.0)) throw Error(ErrorKind::input, "total_duration_us must be > 0");
    if (total_duration_us < last)
      throw Error(ErrorKind::input, "total_duration_us shorter than the last pulse");
  }

  /// Fields are summed per transition. The detuning of a transition is that of
  /// the most recently switched-on pulse on it (0 before the first one).
  Drive drive(double t_us) const {
    Drive d;
    double latest_p = -1e300, latest_c = -1e300;
    for (const auto& p : pulses) {
      const bool started = t_us >= p.t_on_us;
      if (p.transition == Transition::probe) {
        d.probe += pulse_field(p, t_us);
        if (started && p.t_on_us >= latest_p) {
          latest_p = p.t_on_us;
          d.delta_p_khz = p.detuning_khz;
        }
      } else {
        d.coupling += pulse_field(p, t_us);
        if (started && p.t_on_us >= latest_c) {
          latest_c = p.t_on_us;
          d.delta_c_khz = p.detuning_khz;
        }
      }
    }
    return d;
  }

  /// Largest summed Rabi frequency on a transition (upper bound, kHz).
  double max_rabi_khz(Transition tr) const {
    double s = 0.0;
    for (const auto& p : pulses)
      if (p.transition == tr) s += p.rabi_khz;
    return s;
  }

  double max_abs_detuning_khz(Transition tr) const {
    double s = 0.0;
    for (const auto& p : pulses)
      if (p.transition == tr) s = std::max(s, std::abs(p.detuning_khz));
    return s;
  }
};

// ---------------------------------------------------------------------------
// Medium

/// Rates are ordinary frequencies: a coherence with rate g decays as
/// exp(-2*pi*g*t). A spin T2 maps to gamma12_khz = 1/(2*pi*T2) (T2 = 500 us
/// gives 0.318 kHz).
struct MediumParams {
  double gamma12_khz = 0.0;
  double gamma13_khz = 1.0;
  double gamma23_khz = 1.0;
  double Gamma31_khz = 0.0;
  double Gamma32_khz = 0.0;
  double delta_s_khz = 30.0;
  double length_mm = 3.0;
  double coupling_const = 670.0;  // kHz/mm, field gain per unit coherence
  double n_density_rel = 1.0;

  void validate() const {
    const double rates[] = {gamma12_khz, gamma13_khz, gamma23_khz, Gamma31_khz, Gamma32_khz,
                            delta_s_khz};
    for (double r : rates)
      if (!(r >= 0.0)) throw Error(ErrorKind::input, "medium rates must be >= 0");
    if (!(length_mm > 0.0)) throw Error(ErrorKind::input, "length_mm must be > 0");
    if (!(n_density_rel >= 0.0)) throw Error(ErrorKind::input, "n_density_rel must be >= 0");
    if (!std::isfinite(coupling_const)) throw Error(ErrorKind::input, "coupling_const not finite");
  }
};

// ---------------------------------------------------------------------------
// Sampled observables

enum class Channel : std::size_t {
  re_rho12,
  im_rho12,
  re_rho13,
  im_rho13,
  pop1,
  pop2,
  pop3,
  e_d_arb,
};
inline constexpr std::size_t channel_count = 8;
inline constexpr std::array<std::string_view, channel_count> channel_names = {
    "re_rho12", "im_rho12", "re_rho13", "im_rho13", "pop1", "pop2", "pop3", "e_d_arb"};

inline Channel channel_from_name(std::string_view name) {
  for (std::size_t i = 0; i < channel_count; ++i)
    if (channel_names[i] == name) return static_cast<Channel>(i);
  throw Error(ErrorKind::schema, "unknown channel '" + std::string(name) + "'");
}

struct TimeSeries {
  std::vector<double> t_us;
  std::array<std::vector<double>, channel_count> channels;

  std::size_t size() const { return t_us.size(); }
  std::vector<double>& operator[](Channel c) { return channels[static_cast<std::size_t>(c)]; }
  const std::vector<double>& operator[](Channel c) const {
    return channels[static_cast<std::size_t>(c)];
  }

  void reserve(std::size_t n) {
    t_us.reserve(n);
    for (auto& c : channels) c.reserve(n);
  }

  /// Appends the observables of rho; e_d_arb is Im(rho13).
  void append(double t, const DensityMatrix& rho) {
    t_us.push_back(t);
    const cplx r12 = rho(0, 1), r13 = rho(0, 2);
    (*this)[Channel::re_rho12].push_back(r12.real());
    (*this)[Channel::im_rho12].push_back(r12.imag());
    (*this)[Channel::re_rho13].push_back(r13.real());
    (*this)[Channel::im_rho13].push_back(r13.imag());
    (*this)[Channel::pop1].push_back(rho(0, 0).real());
    (*this)[Channel::pop2].push_back(rho(1, 1).real());
    (*this)[Channel::pop3].push_back(rho(2, 2).real());
    (*this)[Channel::e_d_arb].push_back(r13.imag());
  }

  /// Grid strictly increasing and every channel as long as the grid.
  void validate() const {
    for (std::size_t i = 1; i < t_us.size(); ++i)
      if (!(t_us[i] > t_us[i - 1])) throw Error(ErrorKind::schema, "time grid not increasing");
    for (std::size_t c = 0; c < channel_count; ++c)
      if (channels[c].size() != t_us.size())
        throw Error(ErrorKind::schema,
                    "channel " + std::string(channel_names[c]) + " length differs from grid");
  }
};

struct SpectralMap {
  std::vector<double> delta2_khz;
  std::vector<double> t_us;
  std::vector<double> values;  // row-major, rows = delta2_khz

  double& at(std::size_t i_delta, std::size_t i_t) { return values[i_delta * t_us.size() + i_t]; }
  double at(std::size_t i_delta, std::size_t i_t) const {
    return values[i_delta * t_us.size() + i_t];
  }

  void validate() const {
    if (values.size() != delta2_khz.size() * t_us.size())
      throw Error(ErrorKind::schema, "spectral map dimensions inconsistent with grids");
  }
};

// ---------------------------------------------------------------------------
// Wave vectors (rad/m)

struct WaveVector {
  double kx = 0.0, ky = 0.0, kz = 0.0;

  double norm() const { return std::sqrt(kx * kx + ky * ky + kz * kz); }
  bool finite() const { return std::isfinite(kx) && std::isfinite(ky) && std::isfinite(kz); }

  friend WaveVector operator+(WaveVector a, const WaveVector& b) {
    return {a.kx + b.kx, a.ky + b.ky, a.kz + b.kz};
  }
  friend WaveVector operator-(WaveVector a, const WaveVector& b) {
    return {a.kx - b.kx, a.ky - b.ky, a.kz - b.kz};
  }
  friend WaveVector operator*(double s, const WaveVector& a) {
    return {s * a.kx, s * a.ky, s * a.kz};
  }

  /// In-plane (x-z) vector of magnitude k at angle theta from +z.
  static WaveVector in_plane(double k, double theta_rad) {
    return {k * std::sin(theta_rad), 0.0, k * std::cos(theta_rad)};
  }
};

}  // namespace lsim
