#pragma once

// Scenario orchestration: each scenario reads the resolved config, runs the
// simulation modules and writes CSV (and optionally SVG) files plus a
// `<scenario>_summary.txt` of headline numbers.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "lsim/bloch.hpp"
#include "lsim/eit.hpp"
#include "lsim/ensemble.hpp"
#include "lsim/fwm.hpp"
#include "lsim/io/config.hpp"
#include "lsim/io/csv.hpp"
#include "lsim/io/svg.hpp"
#include "lsim/propagation.hpp"

namespace lsim::io {

inline constexpr std::array<std::string_view, 8> scenario_names = {
    "fig2", "fig3", "fid", "eit-spectrum", "slowlight", "routing", "detuning-sweep", "phase-match"};

struct ScenarioResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::pair<std::string, std::string>> summary;
  double max_trace_error = 0.0;  // over every recorded density matrix
  double max_hermiticity_error = 0.0;
};

inline MediumParams medium_from(const Config& c) {
  MediumParams m;
  m.gamma12_khz = c.real("gamma12_khz");
  m.gamma13_khz = c.real("gamma13_khz");
  m.gamma23_khz = c.real("gamma23_khz");
  m.Gamma31_khz = c.real("Gamma31_khz");
  m.Gamma32_khz = c.real("Gamma32_khz");
  m.delta_s_khz = c.real("delta_s_khz");
  m.length_mm = c.real("length_mm");
  m.coupling_const = c.real("coupling_const_khz_per_mm");
  m.n_density_rel = c.real("n_density_rel");
  m.validate();
  return m;
}

inline EnsembleSpec ensemble_from(const Config& c) {
  EnsembleSpec e;
  e.distribution = c.text("ensemble_distribution") == "gaussian" ? Distribution::gaussian
                                                                 : Distribution::lorentzian;
  e.fwhm_khz = c.real("delta_s_khz");
  e.n_members = c.count("ensemble_n");
  const auto& s = c.text("ensemble_sampling");
  e.sampling = s == "monte_carlo" ? Sampling::monte_carlo
                                  : (s == "grid" ? Sampling::grid : Sampling::quantile);
  e.seed = c.count("ensemble_seed");
  e.clip_fwhm = c.real("ensemble_clip_fwhm");
  e.validate();
  return e;
}

/// Probe + coupling preparation over [0, prep_len_us], optionally followed by
/// the read-out pulse. Detunings: probe delta_p, coupling and read-out delta_c.
inline PulseSequence preparation_sequence(const Config& c, double probe_khz, bool with_readout,
                                          double total_us, double delta_p_khz = 0.0,
                                          double delta_c_khz = 0.0) {
  const double len = c.real("prep_len_us");
  PulseSequence seq;
  seq.pulses.push_back({Transition::probe, probe_khz, 0.0, len, EdgeShape::square, 0.0,
                        delta_p_khz, c.real("probe_phase_deg")});
  seq.pulses.push_back({Transition::coupling, c.real("coupling_khz"), 0.0, len, EdgeShape::square,
                        0.0, delta_c_khz, c.real("coupling_phase_deg")});
  if (with_readout) {
    const double on = c.real("readout_on_us");
    seq.pulses.push_back({Transition::coupling, c.real("readout_khz"), on,
                          on + c.real("readout_len_us"), EdgeShape::square, 0.0, delta_c_khz,
                          c.real("readout_phase_deg")});
  }
  seq.total_duration_us = total_us;
  seq.validate();
  return seq;
}

namespace detail {

class Writer {
 public:
  Writer(const Config& c, std::string_view scenario, ScenarioResult& res)
      : dir_(c.text("out_dir")), svg_(c.flag("svg")), scenario_(scenario), res_(res) {}

  std::filesystem::path path(const std::string& name) const { return dir_ / name; }

  void csv(const std::string& name, const TimeSeries& ts) { keep(name, csv_text(ts)); }
  void csv(const std::string& name, const SpectralMap& m) { keep(name, csv_text(m)); }
  void csv(const std::string& name, std::span<const Column> cols) { keep(name, csv_table(cols)); }
  void text(const std::string& name, const std::string& body) { keep(name, body); }

  bool svg_enabled() const { return svg_; }
  void svg(const std::string& name, std::span<const double> x, std::span<const Curve> curves,
           const PlotStyle& style) {
    if (svg_) keep(name, svg_lines(x, curves, style));
  }
  void svg(const std::string& name, const SpectralMap& m, const PlotStyle& style) {
    if (svg_) keep(name, svg_heatmap(m, style));
  }

  void note(const std::string& key, double v) { res_.summary.emplace_back(key, format_double(v)); }
  void note(const std::string& key, const std::string& v) { res_.summary.emplace_back(key, v); }

  void conservation(double trace_err, double herm_err) {
    res_.max_trace_error = std::max(res_.max_trace_error, trace_err);
    res_.max_hermiticity_error = std::max(res_.max_hermiticity_error, herm_err);
  }

  void finish() {
    note("max_trace_error", res_.max_trace_error);
    note("max_hermiticity_error", res_.max_hermiticity_error);
    std::string body;
    for (const auto& [k, v] : res_.summary) body += k + " = " + v + "\n";
    keep(std::string(scenario_) + "_summary.txt", body);
  }

 private:
  void keep(const std::string& name, const std::string& body) {
    write_text(dir_ / name, body);
    res_.files.push_back(dir_ / name);
  }

  std::filesystem::path dir_;
  bool svg_;
  std::string_view scenario_;
  ScenarioResult& res_;
};

inline std::string khz_tag(double v) { return format_double(v) + "khz"; }

inline std::size_t index_of_time(const std::vector<double>& t, double when) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::abs(t[i] - when) < std::abs(t[best] - when)) best = i;
  return best;
}

inline const std::array<Channel, 2> coherence_channels = {Channel::re_rho12, Channel::im_rho13};

// ---------------------------------------------------------------------------

inline void run_fig2(const Config& c, Writer& w) {
  const MediumParams m = medium_from(c);
  const double dt = c.real("dt_us");
  const std::size_t stride = c.count("output_stride");
  const auto seq = preparation_sequence(c, c.real("probe_khz"), true, c.real("total_us"));
  const auto rho0 = DensityMatrix::ground(0);

  const auto homo = evolve(rho0, seq, m, 0.0, dt, {stride, false});
  w.conservation(homo.max_trace_error, homo.max_hermiticity_error);
  w.csv("fig2_timeseries.csv", homo.series);
  w.svg("fig2_timeseries.svg", homo.series.t_us,
        std::array<Curve, 2>{Curve{"Re rho12", homo.series[Channel::re_rho12]},
                             Curve{"Im rho13", homo.series[Channel::im_rho13]}},
        {"Homogeneous spin: coherences", "t (us)", "coherence"});

  const auto ens = ensemble_evolve(rho0, seq, m, ensemble_from(c), dt, {stride, false});
  w.conservation(ens.max_trace_error, ens.max_hermiticity_error);
  w.csv("fig2_ensemble.csv", ens.averaged);
  w.svg("fig2_ensemble.svg", ens.averaged.t_us,
        std::array<Curve, 2>{Curve{"Re rho12", ens.averaged[Channel::re_rho12]},
                             Curve{"Im rho13", ens.averaged[Channel::im_rho13]}},
        {"Inhomogeneous ensemble average", "t (us)", "coherence"});

  const auto grid = linear_grid(c.real("map_min_khz"), c.real("map_max_khz"), c.count("map_points"));
  const auto maps = two_photon_maps(rho0, seq, m, grid, dt, coherence_channels, stride);
  w.conservation(maps.max_trace_error, maps.max_hermiticity_error);
  w.csv("fig2_map_re_rho12.csv", maps.maps[0]);
  w.csv("fig2_map_im_rho13.csv", maps.maps[1]);
  w.svg("fig2_map_re_rho12.svg", maps.maps[0], {"Re rho12 map", "t (us)", "delta2 (kHz)"});
  w.svg("fig2_map_im_rho13.svg", maps.maps[1], {"Im rho13 map", "t (us)", "delta2 (kHz)"});

  const auto& s = homo.series;
  const std::size_t i_prep = index_of_time(s.t_us, c.real("prep_len_us"));
  const std::size_t i_on = index_of_time(s.t_us, c.real("readout_on_us"));
  w.note("re_rho12_prep_end", s[Channel::re_rho12][i_prep]);
  w.note("re_rho12_readout_start", s[Channel::re_rho12][i_on]);
  w.note("re_rho12_end", s[Channel::re_rho12].back());
  double peak = 0.0;
  for (std::size_t i = i_on; i < s.size(); ++i) peak = std::max(peak, s[Channel::im_rho13][i]);
  w.note("im_rho13_readout_peak", peak);
  w.note("ensemble_re_rho12_readout_start", ens.averaged[Channel::re_rho12][i_on]);

  const auto& map12 = maps.maps[0];
  const std::size_t j_prep = index_of_time(map12.t_us, c.real("prep_len_us"));
  std::size_t best = 0;
  for (std::size_t i = 0; i < map12.delta2_khz.size(); ++i)
    if (std::abs(map12.at(i, j_prep)) > std::abs(map12.at(best, j_prep))) best = i;
  w.note("map_abs_re_rho12_argmax_khz", map12.delta2_khz[best]);
}

inline void run_fig3(const Config& c, Writer& w) {
  const MediumParams m = medium_from(c);
  const double dt = c.real("dt_us");
  const double on = c.real("readout_on_us");
  const auto prep = preparation_sequence(c, c.real("probe_khz"), false, on);
  ReadoutOptions opt;
  opt.output_stride = c.count("output_stride");
  opt.min_reversals = c.count("min_reversals");

  const auto run = evolve(DensityMatrix::ground(0), prep, m, 0.0, dt, {opt.output_stride, false});
  w.conservation(run.max_trace_error, run.max_hermiticity_error);
  w.csv("fig3_preparation.csv", run.series);

  std::vector<double> omegas;
  for (std::size_t k = 0; k < c.count("sweep_points"); ++k)
    omegas.push_back(c.real("sweep_start_khz") + c.real("sweep_step_khz") * static_cast<double>(k));
  const Pulse tmpl{Transition::coupling, 0.0, on, on + c.real("readout_len_us"), EdgeShape::square,
                   0.0, 0.0, c.real("readout_phase_deg")};
  const auto results = sweep_readout(run.final_state, omegas, tmpl, m, dt, opt);

  std::vector<double> col_r, col_scale, col_res, col_rev, col_osc, col_start, col_end, col_int;
  std::vector<Curve> curves_12, curves_13;
  for (const auto& r : results) {
    w.conservation(r.max_trace_error, r.max_hermiticity_error);
    w.csv("fig3_readout_" + khz_tag(r.omega_a_khz) + ".csv", r.series);
    const auto& s = r.series;
    col_r.push_back(r.conversion_fit->pearson_r);
    col_scale.push_back(r.conversion_fit->scale);
    col_res.push_back(r.conversion_fit->max_residual);
    col_rev.push_back(static_cast<double>(r.slope_reversals));
    col_osc.push_back(r.oscillation_detected ? 1.0 : 0.0);
    col_start.push_back(s[Channel::re_rho12].front());
    col_end.push_back(s[Channel::re_rho12].back());
    double integral = 0.0;
    const auto& im = s[Channel::im_rho13];
    for (std::size_t i = 1; i < s.size(); ++i)
      integral += 0.5 * (im[i] + im[i - 1]) * (s.t_us[i] - s.t_us[i - 1]);
    col_int.push_back(integral);
    curves_12.push_back({khz_tag(r.omega_a_khz), s[Channel::re_rho12]});
    curves_13.push_back({khz_tag(r.omega_a_khz), s[Channel::im_rho13]});
  }
  const Column table[] = {{"omega_a_khz", omegas},         {"pearson_r", col_r},
                          {"scale", col_scale},            {"max_residual", col_res},
                          {"slope_reversals", col_rev},    {"oscillation_detected", col_osc},
                          {"re_rho12_start", col_start},   {"re_rho12_end", col_end},
                          {"integral_im_rho13_us", col_int}};
  w.csv("fig3_fit.csv", table);
  if (!results.empty()) {
    w.svg("fig3_re_rho12.svg", results.front().series.t_us, curves_12,
          {"Spin coherence during read-out", "t (us)", "Re rho12"});
    w.svg("fig3_im_rho13.svg", results.front().series.t_us, curves_13,
          {"Optical coherence during read-out", "t (us)", "Im rho13"});
  }

  double r_min = 1.0;
  for (double r : col_r) r_min = std::min(r_min, r);
  std::size_t transitions = 0;
  for (std::size_t k = 1; k < col_osc.size(); ++k) transitions += col_osc[k] != col_osc[k - 1];
  w.note("re_rho12_readout_start", run.final_state(0, 1).real());
  w.note("min_pearson_r", r_min);
  w.note("oscillation_transitions", static_cast<double>(transitions));
  std::string onset = "none";
  for (std::size_t k = 0; k < results.size(); ++k)
    if (results[k].oscillation_detected) {
      onset = format_double(omegas[k]);
      break;
    }
  w.note("oscillation_onset_khz", onset);
}

inline void run_fid(const Config& c, Writer& w) {
  const MediumParams m = medium_from(c);
  const auto spec = ensemble_from(c);
  const double dt = c.real("dt_us");
  // instantaneous preparation: (|1> + |2>)/sqrt(2), then free evolution
  const auto rho0 = DensityMatrix::pure({1.0, 1.0, 0.0});
  PulseSequence seq{{}, c.real("fid_len_us")};
  const auto ens = ensemble_evolve(rho0, seq, m, spec, dt, {c.count("output_stride"), false});
  w.conservation(ens.max_trace_error, ens.max_hermiticity_error);
  w.csv("fid.csv", ens.averaged);

  const double t2 = fid_decay_time(ens.averaged, Channel::re_rho12, 0.0);
  std::vector<double> analytic(ens.averaged.size());
  for (std::size_t i = 0; i < analytic.size(); ++i)
    analytic[i] = 0.5 * std::exp(-std::numbers::pi * spec.fwhm_khz * 1e-3 * ens.averaged.t_us[i]);
  w.svg("fid.svg", ens.averaged.t_us,
        std::array<Curve, 2>{Curve{"Re rho12", ens.averaged[Channel::re_rho12]},
                             Curve{"Lorentzian envelope", analytic}},
        {"Spin free-induction decay", "t (us)", "Re rho12"});
  w.note("t2_star_us", t2);
  if (spec.fwhm_khz > 0.0) {
    // 1/e time of the ensemble envelope: Fourier transform of the line shape
    if (spec.distribution == Distribution::lorentzian)
      w.note("t2_star_analytic_us", 1e3 / (std::numbers::pi * spec.fwhm_khz));
    else
      w.note("t2_star_analytic_us",
             1e3 * 2.0 * std::sqrt(std::log(2.0)) / (std::numbers::pi * spec.fwhm_khz));
  }
  w.note("members", static_cast<double>(spec.n_members));
}

inline void run_eit_spectrum(const Config& c, Writer& w) {
  const MediumParams m = medium_from(c);
  const auto grid = linear_grid(c.real("spectrum_min_khz"), c.real("spectrum_max_khz"),
                                c.count("spectrum_points"));
  const double probe = c.real("spectrum_probe_khz");
  const auto spec = susceptibility_spectrum(m, grid, probe, c.real("spectrum_coupling_khz"));
  const Column cols[] = {{"delta_p_khz", spec.delta_p_khz},
                         {"chi_re_us", spec.chi_re},
                         {"chi_im_us", spec.chi_im}};
  w.csv("eit_spectrum.csv", cols);
  w.svg("eit_spectrum.svg", spec.delta_p_khz,
        std::array<Curve, 2>{Curve{"Re chi", spec.chi_re}, Curve{"Im chi", spec.chi_im}},
        {"Weak-probe susceptibility", "delta_P (kHz)", "chi (us)"});

  const auto gd = group_delay(spec, m);
  w.note("group_delay_us", gd.delay_us);
  w.note("vacuum_transit_us", gd.vacuum_transit_us);
  w.note("group_index", gd.group_index);
  w.note("v_g_rel", gd.v_g_rel);

  // delay versus coupling Rabi frequency, geometric sweep
  const std::size_t n = c.count("scaling_points");
  const double lo = c.real("scaling_min_khz"), hi = c.real("scaling_max_khz");
  std::vector<double> oc, tau;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 0.0;
    oc.push_back(lo * std::pow(hi / lo, f));
    tau.push_back(group_delay(susceptibility_spectrum(m, grid, probe, oc.back()), m).delay_us);
  }
  const Column scols[] = {{"coupling_khz", oc}, {"group_delay_us", tau}};
  w.csv("eit_scaling.csv", scols);
  if (n >= 2) w.note("delay_exponent_vs_coupling", fit_power_law_exponent(oc, tau));
}

struct SlowSetup {
  MediumParams medium;
  Envelope probe;
  PulseSequence coupling;
  PropagationGrid grid;
};

inline SlowSetup slow_setup(const Config& c, double coupling_until_us) {
  SlowSetup s;
  s.medium = medium_from(c);
  const double window = c.real("slow_window_us");
  s.probe = gaussian_envelope(window, c.real("prop_dt_us"), c.real("probe_center_us"),
                              c.real("probe_len_us"), c.real("slow_probe_khz"));
  s.coupling.pulses.push_back({Transition::coupling, c.real("slow_coupling_khz"), 0.0,
                               std::min(coupling_until_us, window), EdgeShape::square, 0.0, 0.0,
                               c.real("coupling_phase_deg")});
  s.coupling.total_duration_us = window;
  s.grid.n_z = c.count("prop_nz");
  return s;
}

inline GroupDelay predicted_delay(const MediumParams& m, double coupling_khz) {
  // fine grid around line centre for the dispersion slope
  const double h = std::max(1e-3, 1e-3 * coupling_khz);
  const auto g = linear_grid(-4.0 * h, 4.0 * h, 9);
  return group_delay(susceptibility_spectrum(m, g, std::max(coupling_khz, m.gamma13_khz) / 10.0,
                                             coupling_khz),
                     m);
}

inline void run_slowlight(const Config& c, Writer& w) {
  const auto s = slow_setup(c, c.real("slow_window_us"));
  const auto res = propagate_pulse(s.probe, s.coupling, s.medium, s.grid);
  w.conservation(res.max_trace_error, res.max_hermiticity_error);

  const auto in = s.probe.intensity(), out = res.output.intensity();
  const Column cols[] = {{"t_us", s.probe.t_us}, {"i_in", in}, {"i_out", out}};
  w.csv("slowlight.csv", cols);
  const Column ecols[] = {{"z_mm", res.z_mm}, {"energy", res.node_energy}};
  w.csv("slowlight_energy.csv", ecols);
  w.svg("slowlight.svg", s.probe.t_us,
        std::array<Curve, 2>{Curve{"probe in", in}, Curve{"probe out", out}},
        {"Slow light", "t (us, retarded frame)", "intensity (kHz^2)"});

  const double peak = extract_delay(s.probe.t_us, in, out, DelayMethod::peak);
  const double centroid = extract_delay(s.probe.t_us, in, out, DelayMethod::centroid);
  const auto gd = predicted_delay(s.medium, c.real("slow_coupling_khz"));
  w.note("delay_peak_us", peak);
  w.note("delay_centroid_us", centroid);
  w.note("predicted_group_delay_us", gd.delay_us);
  w.note("delay_over_pulse_length", peak / c.real("probe_len_us"));
  w.note("energy_ratio", res.node_energy.back() / res.node_energy.front());
}

inline void run_routing(const Config& c, Writer& w) {
  const double t_a = c.real("routing_readout_on_us");
  const auto ref = slow_setup(c, c.real("slow_window_us"));
  const auto routed = slow_setup(c, t_a);
  const auto r_ref = propagate_pulse(ref.probe, ref.coupling, ref.medium, ref.grid);
  PropagationOptions opt;
  opt.snapshot_index = index_of_time(routed.probe.t_us, t_a);
  const auto r_rt = propagate_pulse(routed.probe, routed.coupling, routed.medium, routed.grid, opt);
  w.conservation(r_ref.max_trace_error, r_ref.max_hermiticity_error);
  w.conservation(r_rt.max_trace_error, r_rt.max_hermiticity_error);

  // medium-averaged stored state, read out by Omega_A (linear in rho, so this
  // equals the z-sum of per-slab read-outs)
  const auto stored = medium_average(r_rt.snapshots);
  const Pulse readout{Transition::coupling, c.real("readout_khz"), t_a,
                      t_a + c.real("readout_len_us"), EdgeShape::square, 0.0, 0.0,
                      c.real("readout_phase_deg")};
  ReadoutOptions ropt;
  ropt.output_stride = c.count("output_stride");
  const auto ro = readout_conversion(stored, readout, ref.medium, c.real("dt_us"), ropt);
  w.conservation(ro.max_trace_error, ro.max_hermiticity_error);
  const auto i_d = detector_intensity(ro.series);

  const auto in = ref.probe.intensity(), s_ref = r_ref.output.intensity(),
             s_rt = r_rt.output.intensity();
  const Column cols[] = {{"t_us", ref.probe.t_us},
                         {"i_probe_in", in},
                         {"i_s_reference", s_ref},
                         {"i_s_routed", s_rt}};
  w.csv("routing_fields.csv", cols);
  w.csv("routing_readout.csv", ro.series);
  const Column dcols[] = {{"t_us", ro.series.t_us}, {"i_d", i_d}};
  w.csv("routing_detector.csv", dcols);
  w.svg("routing_fields.svg", ref.probe.t_us,
        std::array<Curve, 3>{Curve{"E_P in", in}, Curve{"E_S reference", s_ref},
                             Curve{"E_S routed", s_rt}},
        {"Delayed routing: slow light", "t (us)", "intensity (kHz^2)"});
  w.svg("routing_detector.svg", ro.series.t_us, std::array<Curve, 1>{Curve{"I_D", i_d}},
        {"Delayed routing: read-out signal", "t (us)", "I_D (arb.)"});

  double e_ref = 0.0, e_rt = 0.0;
  for (std::size_t i = 0; i < s_ref.size(); ++i)
    if (ref.probe.t_us[i] >= t_a) {
      e_ref += s_ref[i];
      e_rt += s_rt[i];
    }
  const auto k = static_cast<std::size_t>(std::max_element(i_d.begin(), i_d.end()) - i_d.begin());
  w.note("reference_delay_peak_us", extract_delay(ref.probe.t_us, in, s_ref, DelayMethod::peak));
  w.note("routed_over_reference_energy_after_readout", e_ref > 0.0 ? e_rt / e_ref : 0.0);
  w.note("stored_re_rho12", stored(0, 1).real());
  w.note("e_d_peak_time_us", ro.series.t_us[k]);
  w.note("i_d_peak", i_d[k]);
}

inline void run_detuning_sweep(const Config& c, Writer& w) {
  const MediumParams m = medium_from(c);
  const double dt = c.real("dt_us");
  const std::size_t stride = c.count("output_stride");
  const double on = c.real("readout_on_us"), off = on + c.real("readout_len_us");
  const auto grid = linear_grid(c.real("detuning_min_khz"), c.real("detuning_max_khz"),
                                c.count("detuning_points"));
  struct Case {
    std::string name;
    double probe;
    bool one_photon;
  };
  const Case cases[] = {{"two_photon_low", c.real("low_probe_khz"), false},
                        {"two_photon_high", c.real("high_probe_khz"), false},
                        {"one_photon_low", c.real("low_probe_khz"), true},
                        {"one_photon_high", c.real("high_probe_khz"), true}};
  std::vector<std::vector<double>> peaks;
  for (const auto& cs : cases) {
    const auto runs = parallel_map<EvolveResult>(grid.size(), [&](std::size_t k) {
      const double dp = grid[k], dc = cs.one_photon ? grid[k] : 0.0;
      const auto seq = preparation_sequence(c, cs.probe, true, off, dp, dc);
      return evolve(DensityMatrix::ground(0), seq, m, 0.0, dt, {stride, false});
    });
    std::vector<double> col;
    for (const auto& r : runs) {
      w.conservation(r.max_trace_error, r.max_hermiticity_error);
      double peak = 0.0;
      for (std::size_t i = 0; i < r.series.size(); ++i)
        if (r.series.t_us[i] >= on - 1e-9)
          peak = std::max(peak, std::abs(r.series[Channel::e_d_arb][i]));
      col.push_back(peak);
    }
    peaks.push_back(std::move(col));
  }
  std::vector<Column> cols{{"detuning_khz", grid}};
  std::vector<Curve> curves;
  for (std::size_t k = 0; k < peaks.size(); ++k) {
    cols.push_back({"peak_e_d_" + cases[k].name, peaks[k]});
    curves.push_back({cases[k].name, peaks[k]});
    const auto it = std::max_element(peaks[k].begin(), peaks[k].end());
    w.note("argmax_" + cases[k].name + "_khz", grid[static_cast<std::size_t>(it - peaks[k].begin())]);
  }
  w.csv("detuning_sweep.csv", cols);
  w.svg("detuning_sweep.svg", grid, curves,
        {"Peak read-out signal vs detuning", "detuning (kHz)", "peak |Im rho13|"});
}

inline void run_phase_match(const Config& c, Writer& w) {
  constexpr double c_m_per_s = 299792458.0;
  const double nu0 = c_m_per_s / (c.real("wavelength_nm") * 1e-9);
  auto k_of = [&](double offset_mhz) { return two_pi * (nu0 + offset_mhz * 1e6) / c_m_per_s; };
  const double kp = k_of(c.real("probe_offset_mhz")), kc = k_of(c.real("coupling_offset_mhz")),
               ka = k_of(c.real("readout_offset_mhz"));
  const auto vp = WaveVector::in_plane(kp, c.real("theta_p_mrad") * 1e-3);
  const auto vc = WaveVector::in_plane(kc, c.real("theta_c_mrad") * 1e-3);
  const auto va = WaveVector::in_plane(ka, c.real("theta_a_mrad") * 1e-3);
  const double kd_vac = kc - kp + ka;  // omega_D / c from energy conservation
  const auto pm = phase_match(vc, vp, va, kd_vac);

  std::string body = "beam,kx_rad_per_m,ky_rad_per_m,kz_rad_per_m,norm_rad_per_m,theta_mrad\n";
  auto row = [&](const char* name, const WaveVector& k) {
    body += std::string(name) + "," + format_double(k.kx) + "," + format_double(k.ky) + "," +
            format_double(k.kz) + "," + format_double(k.norm()) + "," +
            format_double(1e3 * std::atan2(k.kx, k.kz)) + "\n";
  };
  row("probe", vp);
  row("coupling", vc);
  row("readout", va);
  row("signal", pm.k_d);
  w.text("phase_match.csv", body);
  w.note("theta_d_mrad", 1e3 * std::atan2(pm.k_d.kx, pm.k_d.kz));
  w.note("mismatch_rad_per_m", pm.mismatch);
  w.note("mismatch_over_k", pm.mismatch / kd_vac);
  w.note("coherence_length_m", pm.mismatch > 0.0 ? std::numbers::pi / pm.mismatch : 0.0);
}

}  // namespace detail

inline bool is_scenario(std::string_view name) {
  return std::find(scenario_names.begin(), scenario_names.end(), name) != scenario_names.end();
}

inline std::string scenario_list() {
  std::string s;
  for (auto n : scenario_names) s += (s.empty() ? "" : ", ") + std::string(n);
  return s;
}

/// Runs one scenario into c.out_dir (created if needed) and echoes the
/// resolved config there.
inline ScenarioResult run_scenario(std::string_view name, const Config& c) {
  if (!is_scenario(name))
    throw Error(ErrorKind::config,
                "unknown scenario '" + std::string(name) + "'; valid: " + scenario_list());
  const std::filesystem::path dir = c.text("out_dir");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());

  ScenarioResult res;
  write_text(dir / "resolved_config.txt", c.resolved_text());
  res.files.push_back(dir / "resolved_config.txt");

  detail::Writer w(c, name, res);
  if (name == "fig2") detail::run_fig2(c, w);
  else if (name == "fig3") detail::run_fig3(c, w);
  else if (name == "fid") detail::run_fid(c, w);
  else if (name == "eit-spectrum") detail::run_eit_spectrum(c, w);
  else if (name == "slowlight") detail::run_slowlight(c, w);
  else if (name == "routing") detail::run_routing(c, w);
  else if (name == "detuning-sweep") detail::run_detuning_sweep(c, w);
  else detail::run_phase_match(c, w);
  w.finish();
  return res;
}

}  // namespace lsim::io
