// upbsim: steady-state, time-dependent and Monte Carlo photon statistics of a
// driven dissipative Kerr photonic molecule, with pulsed-excitation temporal
// filtering. All quantities are in natural units (hbar = 1, kappa_ref = 1)
// unless a subcommand says otherwise; --units si switches time inputs to
// seconds using the physical scale block.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "upb/counting.hpp"
#include "upb/csv.hpp"
#include "upb/device.hpp"
#include "upb/dynamics.hpp"
#include "upb/trajectories.hpp"
#include "upb/version.hpp"

namespace fs = std::filesystem;
using namespace upb;

namespace {

struct RunConfig {
  // model
  double delta1 = -0.29, delta2 = -0.29;
  double u1 = -0.001, u2 = -0.001;
  double j_coupling = 19.6;
  double kappa1 = 1.0, kappa2 = 1.0;
  // drive
  std::string drive_kind = "constant";
  double f = 30.0;           // constant amplitude
  double f_peak = 150.0;     // train amplitude
  double sigma_t = 6.0770678753637636;   // 4 ns at hbar*kappa = 1 ueV
  double period = 30.385339376818817;    // 20 ns
  double t0 = 15.192669688409409;
  int n_pulses = 1;
  // space + tolerances
  int n1_levels = 4, n2_levels = 18;
  double rtol = 1e-8, atol = 1e-12;
  int threads = 1;
  // units
  std::string units = "kappa";
  double hbar_kappa_uev = 1.0;
  double photon_energy_ev = 0.8;
  // output
  std::string out_dir;

  PhysicalScale scale() const { return PhysicalScale{hbar_kappa_uev, photon_energy_ev}; }

  double to_kappa_time(double v) const {
    return units == "si" ? v / scale().time_unit_s() : v;
  }

  SystemParams params(bool pulsed) const {
    SystemParams p;
    p.delta1 = delta1;
    p.delta2 = delta2;
    p.u1 = u1;
    p.u2 = u2;
    p.j_coupling = j_coupling;
    p.kappa1 = kappa1;
    p.kappa2 = kappa2;
    if (pulsed || drive_kind == "gaussian-train")
      p.drive = PulseShape::gaussian_train(f_peak, to_kappa_time(sigma_t), to_kappa_time(period),
                                           to_kappa_time(t0), n_pulses);
    else
      p.drive = PulseShape::constant(f);
    return p;
  }
  HilbertSpace space() const { return HilbertSpace(n1_levels, n2_levels); }
  SolverOptions solver() const { return SolverOptions{rtol, atol, threads}; }
};

void add_model_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--delta1", cfg.delta1, "detuning omega_1 - omega_L (kappa units)");
  cmd->add_option("--delta2", cfg.delta2, "detuning omega_2 - omega_L (kappa units)");
  cmd->add_option("--u1", cfg.u1, "Kerr energy of cavity 1 (hbar*kappa; negative = self-focusing)");
  cmd->add_option("--u2", cfg.u2, "Kerr energy of cavity 2 (hbar*kappa)");
  cmd->add_option("--j", cfg.j_coupling, "tunnel coupling J (hbar*kappa)");
  cmd->add_option("--kappa1", cfg.kappa1, "loss rate of cavity 1 (kappa_ref units)");
  cmd->add_option("--kappa2", cfg.kappa2, "loss rate of cavity 2 (kappa_ref units)");
  cmd->add_option("--n1-levels", cfg.n1_levels, "local dimension of cavity 1");
  cmd->add_option("--n2-levels", cfg.n2_levels, "local dimension of cavity 2");
  cmd->add_option("--rtol", cfg.rtol, "integrator relative tolerance");
  cmd->add_option("--atol", cfg.atol, "integrator absolute tolerance");
  cmd->add_option("--threads", cfg.threads, "worker threads for independent solves");
  cmd->add_option("--units", cfg.units, "kappa (default) or si: time inputs in seconds")
      ->check(CLI::IsMember({"kappa", "si"}));
  cmd->add_option("--hbar-kappa-uev", cfg.hbar_kappa_uev, "hbar*kappa in micro-eV (si mode)");
  cmd->add_option("--photon-energy-ev", cfg.photon_energy_ev, "hbar*omega_c in eV");
  cmd->add_option("-o,--out", cfg.out_dir, "output directory (default $UPB_OUTDIR or .)");
}

void add_pulse_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--f-peak", cfg.f_peak, "pulse peak amplitude F_peak (hbar*kappa)");
  cmd->add_option("--sigma-t", cfg.sigma_t, "gaussian standard deviation (1/kappa, or s in si mode)");
  cmd->add_option("--period", cfg.period, "pulse period (1/kappa, or s in si mode)");
  cmd->add_option("--t0", cfg.t0, "center of the first pulse");
  cmd->add_option("--n-pulses", cfg.n_pulses, "number of pulses in the train");
}

fs::path resolve_out_dir(const RunConfig& cfg) {
  std::string dir = cfg.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("UPB_OUTDIR");
    dir = env && *env ? env : ".";
  }
  fs::create_directories(dir);
  return dir;
}

/// every run drops its resolved configuration next to the outputs
void write_snapshot(const fs::path& dir, const std::string& subcommand, const RunConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  std::ofstream f(dir / (subcommand + ".config"));
  f << "tool = upbsim " << UPB_VERSION << "\n";
  f << "subcommand = " << subcommand << "\n";
  auto put = [&](const char* k, double v) { f << k << " = " << fmt_g17(v) << "\n"; };
  put("delta1", cfg.delta1);
  put("delta2", cfg.delta2);
  put("u1", cfg.u1);
  put("u2", cfg.u2);
  put("j_coupling", cfg.j_coupling);
  put("kappa1", cfg.kappa1);
  put("kappa2", cfg.kappa2);
  f << "n1_levels = " << cfg.n1_levels << "\n";
  f << "n2_levels = " << cfg.n2_levels << "\n";
  put("rtol", cfg.rtol);
  put("atol", cfg.atol);
  f << "units = " << cfg.units << "\n";
  put("hbar_kappa_uev", cfg.hbar_kappa_uev);
  put("photon_energy_ev", cfg.photon_energy_ev);
  for (const auto& [k, v] : extra) f << k << " = " << v << "\n";
}

int cmd_optimal(double u) {
  const OptimalConditions oc = optimal_conditions(u);
  std::cout << "J_opt/hbar_kappa = " << fmt_g17(oc.j_opt) << "\n";
  std::cout << "Delta_opt/kappa = " << fmt_g17(oc.delta_opt) << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& cfg, double f_min, double f_max, int f_points) {
  const fs::path dir = resolve_out_dir(cfg);
  std::vector<double> fs_list(static_cast<size_t>(f_points));
  for (int i = 0; i < f_points; ++i)
    fs_list[size_t(i)] = f_min + (f_max - f_min) * (f_points > 1 ? double(i) / (f_points - 1) : 0.0);
  const auto rows = sweep_drive(cfg.params(false), cfg.space(), fs_list, cfg.solver());
  CsvWriter csv((dir / "sweep.csv").string(), {"f", "n1", "n2", "g2_zero", "status"});
  for (const auto& r : rows)
    csv.row({fmt_g17(r.f), fmt_g17(r.n1), fmt_g17(r.n2), fmt_g17(r.g2),
             r.ok ? "ok" : ("error:" + r.error)});
  write_snapshot(dir, "sweep", cfg,
                 {{"f_min", fmt_g17(f_min)}, {"f_max", fmt_g17(f_max)},
                  {"f_points", std::to_string(f_points)}});
  std::cout << "wrote " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_g2tau(const RunConfig& cfg, double tau_max, int tau_points) {
  const fs::path dir = resolve_out_dir(cfg);
  std::vector<double> taus(static_cast<size_t>(tau_points));
  for (int i = 0; i < tau_points; ++i) taus[size_t(i)] = tau_max * double(i) / (tau_points - 1);
  const CorrelationResult res = g2_tau_cw(cfg.params(false), cfg.space(), taus, cfg.solver());
  CsvWriter csv((dir / "g2tau.csv").string(), {"tau", "g2"});
  for (size_t i = 0; i < res.grid.size(); ++i)
    csv.row({fmt_g17(res.grid[i]), fmt_g17(res.values[i])});
  write_snapshot(dir, "g2tau", cfg,
                 {{"f", fmt_g17(cfg.f)}, {"tau_max", fmt_g17(tau_max)},
                  {"tau_points", std::to_string(tau_points)}});
  std::cout << "wrote " << (dir / "g2tau.csv").string() << "\n";
  return 0;
}

int cmd_pulsed(const RunConfig& cfg, double window_width, double dt_min, int n_grid, int n_samples) {
  const fs::path dir = resolve_out_dir(cfg);
  const SystemParams p = cfg.params(true);
  const HilbertSpace space = cfg.space();
  const double horizon = p.drive.period * p.drive.n_pulses;

  const PulseDiagnostics diag = pulse_diagnostics(p, space, horizon, n_samples, cfg.solver());
  {
    CsvWriter csv((dir / "pulsed_n1.csv").string(), {"t", "n1", "n2"});
    for (size_t i = 0; i < diag.t.size(); ++i)
      csv.row({fmt_g17(diag.t[i]), fmt_g17(diag.n1[i]), fmt_g17(diag.n2[i])});
  }
  {
    CsvWriter csv((dir / "pulsed_g2tt.csv").string(), {"t", "g2"});
    for (size_t i = 0; i < diag.t.size(); ++i)
      csv.row({fmt_g17(diag.t[i]), fmt_g17(diag.g2tt[i])});
  }

  const double width = cfg.to_kappa_time(window_width);
  const FilterWindow win = locate_filter_window(diag.t, diag.g2tt, width);
  const TwoTimeGrid grid = two_time_grid(p, space, win.t1, win.t2, n_grid, cfg.solver());
  const double dtmin = cfg.to_kappa_time(dt_min);
  {
    CsvWriter csv((dir / "pulsed_filtered.csv").string(), {"delta_t", "g2"});
    const double center = 0.5 * (win.t1 + win.t2);
    for (int m = 1;; ++m) {
      const double dt = width * double(m) / 128.0;
      if (dt > width * (1.0 + 1e-12)) break;
      if (dt < dtmin) continue;
      const WindowIntegrals wi = integrate_window(grid, center - 0.5 * dt, center + 0.5 * dt);
      if (wi.flux_integral <= 0.0) continue;
      csv.row({fmt_g17(dt), fmt_g17(wi.g2_integral / wi.flux_integral)});
    }
  }
  write_snapshot(dir, "pulsed", cfg,
                 {{"window_width", fmt_g17(width)},
                  {"window_t1", fmt_g17(win.t1)},
                  {"window_t2", fmt_g17(win.t2)},
                  {"n_grid", std::to_string(n_grid)}});
  std::cout << "wrote " << (dir / "pulsed_n1.csv").string() << ", pulsed_g2tt.csv, pulsed_filtered.csv\n";
  return 0;
}

int cmd_traj(const RunConfig& cfg, long n_traj, uint64_t master_seed, int sample_points,
             bool pulsed_drive, unsigned channels) {
  const fs::path dir = resolve_out_dir(cfg);
  const SystemParams p = cfg.params(pulsed_drive);
  const HilbertSpace space = cfg.space();
  const double horizon =
      p.drive.is_constant() ? cfg.to_kappa_time(cfg.period) : p.drive.period * p.drive.n_pulses;

  EnsembleOptions opts;
  opts.trajectory.rtol = std::max(cfg.rtol, 1e-10);
  opts.trajectory.atol = cfg.atol;
  opts.trajectory.record_channels = channels;
  opts.threads = cfg.threads;
  for (int i = 0; i < sample_points; ++i)
    opts.sample_grid.push_back(horizon * double(i + 1) / sample_points);

  const TrajectoryEnsemble ens = run_ensemble(p, space, horizon, n_traj, master_seed, opts);
  write_jump_records((dir / "events.csv").string(), ens, p, space, horizon, master_seed);
  {
    CsvWriter csv((dir / "observables.csv").string(),
                  {"t", "n1_mean", "n1_stderr", "n2_mean", "n2_stderr"});
    for (size_t i = 0; i < ens.observables.t.size(); ++i)
      csv.row({fmt_g17(ens.observables.t[i]), fmt_g17(ens.observables.n1_mean[i]),
               fmt_g17(ens.observables.n1_stderr[i]), fmt_g17(ens.observables.n2_mean[i]),
               fmt_g17(ens.observables.n2_stderr[i])});
  }
  write_snapshot(dir, "traj", cfg,
                 {{"n_traj", std::to_string(n_traj)},
                  {"master_seed", std::to_string(master_seed)},
                  {"horizon", fmt_g17(horizon)},
                  {"n_failed", std::to_string(ens.n_failed)}});
  std::cout << "wrote " << (dir / "events.csv").string() << " (+.meta), observables.csv; failed "
            << ens.n_failed << "/" << n_traj << "\n";
  return 0;
}

int cmd_filter_scan(const RunConfig& cfg, const std::string& records_path, double window_width,
                    double dt_min, uint64_t shuffle_seed, int hist_offsets) {
  const fs::path dir = resolve_out_dir(cfg);
  SystemParams p;
  HilbertSpace space(2, 2);
  double horizon = 0.0;
  const TrajectoryEnsemble ens = read_jump_records(records_path, &p, &space, &horizon);

  const double width = cfg.to_kappa_time(window_width);
  const FilterWindow win = locate_filter_window(p, space, width, 401, cfg.solver());

  {
    CsvWriter csv((dir / "filter_scan.csv").string(),
                  {"delta_t", "pair_count", "poisson_expected", "g2", "error"});
    for (long m = 256; m >= 1; m /= 2) {
      const double dt = width / double(m);
      if (dt < cfg.to_kappa_time(dt_min)) continue;
      const PairCountResult r = filtered_pair_statistics(ens, win, dt);
      csv.row({fmt_g17(r.delta_t), std::to_string(r.pair_count), fmt_g17(r.poisson_expected),
               fmt_g17(r.g2), fmt_g17(r.error)});
    }
  }
  {
    const CoincidenceHistogram raw =
        coincidence_histogram(ens, p.drive.period, nullptr, shuffle_seed, hist_offsets);
    const CoincidenceHistogram filt =
        coincidence_histogram(ens, p.drive.period, &win, shuffle_seed, hist_offsets);
    CsvWriter csv((dir / "histogram.csv").string(),
                  {"pulse_offset", "pairs_unfiltered", "pairs_filtered"});
    for (size_t i = 0; i < raw.offsets.size(); ++i)
      csv.row({std::to_string(raw.offsets[i]), std::to_string(raw.pairs[i]),
               std::to_string(filt.pairs[i])});
  }
  write_snapshot(dir, "filter_scan", cfg,
                 {{"records", records_path},
                  {"window_width", fmt_g17(width)},
                  {"window_t1", fmt_g17(win.t1)},
                  {"window_t2", fmt_g17(win.t2)},
                  {"shuffle_seed", std::to_string(shuffle_seed)}});
  std::cout << "wrote " << (dir / "filter_scan.csv").string() << ", histogram.csv\n";
  return 0;
}

int cmd_estimate_u(const RunConfig& cfg, const std::string& profile_path, double d_factor) {
  const ModeProfileGrid grid = read_mode_profile(profile_path);
  const EffectiveUResult res = effective_u(grid, cfg.photon_energy_ev, d_factor);
  std::cout << "U_microeV = " << fmt_g17(res.u_uev) << "\n";
  std::cout << "U_half_resolution_microeV = " << fmt_g17(res.u_half_resolution_uev) << "\n";
  std::cout << "refinement_rel_change = " << fmt_g17(res.refinement_rel_change) << "\n";
  return 0;
}

int cmd_make_profile(const std::string& kind, const std::string& out_path) {
  ModeProfileGrid grid;
  if (kind == "box") {
    grid = make_box_profile(24, 1e-6, 12.1104, 0.9e-18);
  } else if (kind == "l3") {
    grid = make_l3_profile();
  } else {
    throw std::invalid_argument("make-profile: kind must be box or l3");
  }
  write_mode_profile(out_path, grid);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driven dissipative Kerr photonic molecule simulator"};
  app.set_config("--config", "", "key = value configuration file; flags override");
  app.require_subcommand(1);
  app.set_version_flag("--version", UPB_VERSION);

  RunConfig cfg;

  auto* c_opt = app.add_subcommand("optimal", "interference-optimal J and detuning for |U|");
  double u_mag = 0.0;
  c_opt->add_option("--u", u_mag, "Kerr magnitude |U| in hbar*kappa units")->required();

  auto* c_sweep = app.add_subcommand("sweep", "steady-state drive sweep: f, n1, n2, g2_zero");
  double f_min = 1.0, f_max = 150.0;
  int f_points = 50;
  add_model_options(c_sweep, cfg);
  c_sweep->add_option("--f-min", f_min, "lowest drive amplitude");
  c_sweep->add_option("--f-max", f_max, "highest drive amplitude");
  c_sweep->add_option("--f-points", f_points, "number of sweep points");

  auto* c_g2tau = app.add_subcommand("g2tau", "cw two-time correlation g2(tau)");
  double tau_max = 8.0;
  int tau_points = 801;
  add_model_options(c_g2tau, cfg);
  c_g2tau->add_option("--f", cfg.f, "cw drive amplitude (hbar*kappa)");
  c_g2tau->add_option("--tau-max", tau_max, "largest delay (1/kappa)");
  c_g2tau->add_option("--tau-points", tau_points, "number of delay samples");

  auto* c_pulsed = app.add_subcommand("pulsed", "master-equation pulsed protocol curves");
  double window_width = 2.3852541334436583;  // 1.57 ns at hbar*kappa = 1 ueV
  double dt_min = 0.009875300552276779;      // 6.5 ps
  int n_grid = 129, n_samples = 401;
  add_model_options(c_pulsed, cfg);
  add_pulse_options(c_pulsed, cfg);
  c_pulsed->add_option("--window-width", window_width, "global filter window width");
  c_pulsed->add_option("--dt-min", dt_min, "smallest filter width in the scan");
  c_pulsed->add_option("--n-grid", n_grid, "two-time grid points across the window");
  c_pulsed->add_option("--n-samples", n_samples, "samples for the n1/g2tt curves");

  auto* c_traj = app.add_subcommand("traj", "Monte Carlo trajectory campaign");
  long n_traj = 1000;
  uint64_t master_seed = 20150604;
  int sample_points = 100;
  bool traj_pulsed = false;
  unsigned channels = 3;
  add_model_options(c_traj, cfg);
  add_pulse_options(c_traj, cfg);
  c_traj->add_option("--f", cfg.f, "cw drive amplitude (constant mode)");
  c_traj->add_flag("--pulsed", traj_pulsed, "use the gaussian pulse train drive");
  c_traj->add_option("--n-traj", n_traj, "number of trajectories");
  c_traj->add_option("--seed", master_seed, "master seed");
  c_traj->add_option("--sample-points", sample_points, "observable sampling points");
  c_traj->add_option("--channels", channels, "record channel mask: 1, 2 or 3");
  c_traj->add_option("--horizon", cfg.period, "cw horizon (1/kappa; pulsed mode uses the period)");

  auto* c_scan = app.add_subcommand("filter-scan", "pair statistics of a recorded campaign");
  std::string records_path;
  uint64_t shuffle_seed = 7;
  int hist_offsets = 10;
  add_model_options(c_scan, cfg);
  c_scan->add_option("records", records_path, "events.csv written by traj")->required();
  c_scan->add_option("--window-width", window_width, "global filter window width");
  c_scan->add_option("--dt-min", dt_min, "smallest sub-window width");
  c_scan->add_option("--shuffle-seed", shuffle_seed, "histogram rearrangement seed");
  c_scan->add_option("--hist-offsets", hist_offsets, "pulse offsets on each histogram side");

  auto* c_estu = app.add_subcommand("estimate-u", "Kerr energy from a mode-profile file");
  std::string profile_path;
  double d_factor = 24.0;
  c_estu->add_option("profile", profile_path, "mode profile file")->required();
  c_estu->add_option("--d-factor", d_factor, "tensor degeneracy factor D");
  c_estu->add_option("--photon-energy-ev", cfg.photon_energy_ev, "hbar*omega in eV");

  auto* c_make = app.add_subcommand("make-profile", "write a bundled analytic mode profile");
  std::string kind = "box", out_path = "profile.bin";
  c_make->add_option("kind", kind, "box or l3");
  c_make->add_option("out", out_path, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_opt->parsed()) return cmd_optimal(u_mag);
    if (c_sweep->parsed()) return cmd_sweep(cfg, f_min, f_max, f_points);
    if (c_g2tau->parsed()) return cmd_g2tau(cfg, tau_max, tau_points);
    if (c_pulsed->parsed()) return cmd_pulsed(cfg, window_width, dt_min, n_grid, n_samples);
    if (c_traj->parsed()) return cmd_traj(cfg, n_traj, master_seed, sample_points, traj_pulsed, channels);
    if (c_scan->parsed())
      return cmd_filter_scan(cfg, records_path, window_width, dt_min, shuffle_seed, hist_offsets);
    if (c_estu->parsed()) return cmd_estimate_u(cfg, profile_path, d_factor);
    if (c_make->parsed()) return cmd_make_profile(kind, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
