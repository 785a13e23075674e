#pragma once

// Flat `key = value` scenario configuration with a documented key registry.
// Precedence: registry defaults, then the config file, then overrides.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lsim/core.hpp"

namespace lsim::io {

enum class ValueType { real, count, flag, word, path };

struct KeySpec {
  std::string_view name;
  ValueType type;
  std::string_view fallback;  // default, already canonical
  std::string_view doc;
  std::vector<std::string_view> choices = {};  // for words
};

// Physical quantities carry a unit suffix in their name; counts, flags and
// words do not.
inline const std::vector<KeySpec>& key_registry() {
  using enum ValueType;
  static const std::vector<KeySpec> keys = {
      // medium
      {"gamma12_khz", real, "0", "spin decoherence rate; 1/(2*pi*T2) for a spin T2 (500 us -> 0.318)"},
      {"gamma13_khz", real, "1", "optical dephasing rate of rho13"},
      {"gamma23_khz", real, "1", "optical dephasing rate of rho23"},
      {"Gamma31_khz", real, "0", "population decay |3> -> |1>"},
      {"Gamma32_khz", real, "0", "population decay |3> -> |2>"},
      {"delta_s_khz", real, "30", "spin inhomogeneous FWHM"},
      {"length_mm", real, "3", "medium length"},
      {"coupling_const_khz_per_mm", real, "670", "atom-field coupling (field gain per unit coherence)"},
      {"n_density_rel", real, "1", "relative atom density"},
      // ensemble
      {"ensemble_distribution", word, "lorentzian", "spin detuning distribution",
       {"lorentzian", "gaussian"}},
      {"ensemble_n", count, "201", "ensemble members"},
      {"ensemble_sampling", word, "quantile", "member placement", {"quantile", "monte_carlo", "grid"}},
      {"ensemble_seed", count, "1", "seed for monte_carlo sampling"},
      {"ensemble_clip_fwhm", real, "10", "detunings limited to +- this many FWHM"},
      // preparation and read-out pulses (fig2, fig3, detuning-sweep)
      {"probe_khz", real, "50", "preparation probe Rabi frequency E_P"},
      {"coupling_khz", real, "100", "preparation coupling Rabi frequency"},
      {"prep_len_us", real, "10", "preparation pulse length (probe and coupling together)"},
      {"probe_phase_deg", real, "0", "probe optical phase"},
      {"coupling_phase_deg", real, "180", "coupling optical phase"},
      {"readout_khz", real, "80", "read-out Rabi frequency"},
      {"readout_on_us", real, "35", "read-out switch-on time"},
      {"readout_len_us", real, "10", "read-out pulse length"},
      {"readout_phase_deg", real, "180", "read-out optical phase"},
      {"total_us", real, "60", "simulated duration for fig2"},
      {"dt_us", real, "0.01", "RK4 time step"},
      {"output_stride", count, "10", "record every n-th step"},
      // fig2 maps
      {"map_min_khz", real, "-50", "two-photon detuning map start"},
      {"map_max_khz", real, "50", "two-photon detuning map end"},
      {"map_points", count, "101", "two-photon detuning map points"},
      // fig3 sweep
      {"sweep_start_khz", real, "20", "first read-out Rabi frequency"},
      {"sweep_step_khz", real, "20", "read-out Rabi frequency step"},
      {"sweep_points", count, "7", "number of read-out Rabi frequencies"},
      {"min_reversals", count, "1", "Im(rho13) turning points that count as oscillation"},
      // fid
      {"fid_len_us", real, "60", "free-evolution length after the instantaneous preparation"},
      // eit-spectrum
      {"spectrum_min_khz", real, "-300", "probe detuning grid start"},
      {"spectrum_max_khz", real, "300", "probe detuning grid end"},
      {"spectrum_points", count, "601", "probe detuning grid points"},
      {"spectrum_probe_khz", real, "1", "weak probe Rabi frequency"},
      {"spectrum_coupling_khz", real, "200", "coupling Rabi frequency"},
      {"scaling_min_khz", real, "100", "coupling sweep start for the delay exponent"},
      {"scaling_max_khz", real, "400", "coupling sweep end (geometric)"},
      {"scaling_points", count, "4", "coupling sweep points"},
      // slowlight and routing
      {"slow_coupling_khz", real, "200", "CW coupling Rabi frequency"},
      {"slow_probe_khz", real, "2", "probe peak Rabi frequency"},
      {"probe_len_us", real, "8", "probe intensity FWHM"},
      {"probe_center_us", real, "20", "probe peak time at the entrance"},
      {"slow_window_us", real, "80", "simulated time window"},
      {"prop_nz", count, "1024", "propagation slabs"},
      {"prop_dt_us", real, "0.05", "propagation time step"},
      {"routing_readout_on_us", real, "28", "coupling switch-off and read-out start"},
      // detuning-sweep
      {"detuning_min_khz", real, "-50", "detuning sweep start"},
      {"detuning_max_khz", real, "50", "detuning sweep end"},
      {"detuning_points", count, "21", "detuning sweep points"},
      {"low_probe_khz", real, "5", "low-power probe Rabi frequency"},
      {"high_probe_khz", real, "100", "high-power probe Rabi frequency"},
      // phase-match
      {"wavelength_nm", real, "605.98", "common optical wavelength"},
      {"probe_offset_mhz", real, "0", "probe frequency offset"},
      {"coupling_offset_mhz", real, "0", "coupling frequency offset"},
      {"readout_offset_mhz", real, "0", "read-out frequency offset"},
      {"theta_p_mrad", real, "0", "probe angle from z"},
      {"theta_c_mrad", real, "35", "coupling angle from z"},
      {"theta_a_mrad", real, "70", "read-out angle from z"},
      // output
      {"out_dir", path, "out", "output directory"},
      {"svg", flag, "false", "also render SVG plots"},
  };
  return keys;
}

inline const KeySpec* find_key(std::string_view name) {
  for (const auto& k : key_registry())
    if (k.name == name) return &k;
  return nullptr;
}

/// Shortest text that parses back to exactly v.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

class Config {
 public:
  Config() {
    for (const auto& k : key_registry()) values_[std::string(k.name)] = std::string(k.fallback);
  }

  /// Sets key from text; where names the source (file:line or --set) for errors.
  void set(std::string_view key, std::string_view text, const std::string& where) {
    const KeySpec* spec = find_key(key);
    if (!spec) {
      std::string msg = where + ": unknown key '" + std::string(key) + "'";
      for (const auto& k : key_registry())
        if (k.name.starts_with(std::string(key) + "_")) {
          msg += " (missing unit suffix? did you mean '" + std::string(k.name) + "')";
          break;
        }
      throw Error(ErrorKind::config, msg);
    }
    values_[std::string(key)] = canonical(*spec, detail::trim(text), where);
  }

  /// Applies "key = value" lines; '#' starts a comment.
  void apply_text(std::string_view text, const std::string& source) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto end = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const std::string where = source + ":" + std::to_string(line_no);
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw Error(ErrorKind::config, where + ": expected 'key = value', got '" +
                                           std::string(line) + "'");
      const auto key = detail::trim(line.substr(0, eq));
      if (key.empty()) throw Error(ErrorKind::config, where + ": missing key before '='");
      set(key, line.substr(eq + 1), where);
    }
  }

  void apply_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::config, "cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_text(ss.str(), path.string());
  }

  /// Applies a "key=value" override.
  void apply_override(std::string_view kv) {
    const auto eq = kv.find('=');
    const std::string where = "--set " + std::string(kv);
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::config, where + ": expected key=value");
    set(detail::trim(kv.substr(0, eq)), kv.substr(eq + 1), where);
  }

  const std::string& text(std::string_view key) const {
    const auto it = values_.find(std::string(key));
    if (it == values_.end()) throw Error(ErrorKind::config, "no such key '" + std::string(key) + "'");
    return it->second;
  }
  double real(std::string_view key) const { return *detail::parse_real(text(key)); }
  std::size_t count(std::string_view key) const { return std::stoull(text(key)); }
  bool flag(std::string_view key) const { return text(key) == "true"; }

  /// Registry-ordered "key = value" lines, re-loadable as a config file.
  std::string resolved_text() const {
    std::string out = "# resolved lsim configuration\n";
    for (const auto& k : key_registry())
      out += std::string(k.name) + " = " + text(k.name) + "\n";
    return out;
  }

  bool operator==(const Config&) const = default;

 private:
  static std::string canonical(const KeySpec& spec, std::string_view v, const std::string& where) {
    auto bad = [&](const char* expected) {
      return Error(ErrorKind::config, where + ": key '" + std::string(spec.name) + "' expects " +
                                          expected + ", got '" + std::string(v) + "'");
    };
    switch (spec.type) {
      case ValueType::real: {
        const auto d = detail::parse_real(v);
        if (!d) throw bad("a number (no unit text; the unit is in the key name)");
        return format_double(*d);
      }
      case ValueType::count: {
        unsigned long long n = 0;
        const auto r = std::from_chars(v.data(), v.data() + v.size(), n);
        if (v.empty() || r.ec != std::errc{} || r.ptr != v.data() + v.size())
          throw bad("a non-negative integer");
        return std::to_string(n);
      }
      case ValueType::flag:
        if (v == "true" || v == "1" || v == "yes") return "true";
        if (v == "false" || v == "0" || v == "no") return "false";
        throw bad("true or false");
      case ValueType::word:
        for (auto c : spec.choices)
          if (c == v) return std::string(v);
        throw bad("one of the documented choices");
      case ValueType::path:
        if (v.empty()) throw bad("a non-empty path");
        return std::string(v);
    }
    return std::string(v);
  }

  std::map<std::string, std::string> values_;
};

/// defaults -> file (if any) -> overrides.
inline Config load_config(const std::optional<std::filesystem::path>& file,
                          const std::vector<std::string>& overrides) {
  Config c;
  if (file) c.apply_file(*file);
  for (const auto& o : overrides) c.apply_override(o);
  return c;
}

}  // namespace lsim::io
