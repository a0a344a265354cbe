#include "upb/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "upb/fused_csr.hpp"
#include "upb/rk45.hpp"
#include "upb/rng.hpp"
#include "upb/version.hpp"

namespace upb {

namespace {

struct McwfGenerator {
  FusedCsr op;  // -i H(t) - (1/2) sum_j kappa_j n_j as (const + F(t) * drive)
  PulseShape drive;
  bool folded = false;  // constant drive baked into the const part
  Eigen::VectorXd n1_diag, n2_diag;
  SpMat jump1, jump2;

  void operator()(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& out) const {
    op.apply(folded ? 0.0 : drive.at(t), y, out);
  }
};

McwfGenerator make_generator(const SystemParams& params, const HilbertSpace& space) {
  params.validate();
  McwfGenerator g;
  g.drive = params.drive;
  const int d = space.dim();
  const SpMat a1 = annihilation(space, 1).matrix();
  const SpMat a2 = annihilation(space, 2).matrix();

  std::vector<Eigen::Triplet<cplx>> trip;
  const cplx mi(0.0, -1.0);
  auto add_sparse = [&](const SpMat& m, cplx scale) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it)
        trip.emplace_back(int(it.row()), int(it.col()), scale * it.value());
  };

  g.n1_diag.resize(d);
  g.n2_diag.resize(d);
  for (int i = 0; i < d; ++i) {
    auto [m1, m2] = space.decode(i);
    g.n1_diag(i) = m1;
    g.n2_diag(i) = m2;
    const cplx diag = mi * cplx(params.delta1 * m1 + params.delta2 * m2 +
                                params.u1 * m1 * (m1 - 1.0) + params.u2 * m2 * (m2 - 1.0)) -
                      cplx(0.5 * (params.kappa1 * m1 + params.kappa2 * m2));
    if (diag != cplx(0.0)) trip.emplace_back(i, i, diag);
  }
  const SpMat hop = SpMat(SpMat(a1.adjoint()) * a2 + SpMat(a2.adjoint()) * a1);
  add_sparse(hop, mi * cplx(params.j_coupling));

  const SpMat x = SpMat(a1 + SpMat(a1.adjoint()));
  if (params.drive.is_constant()) {
    g.folded = true;
    if (params.drive.amplitude != 0.0) add_sparse(x, mi * cplx(params.drive.amplitude));
  }
  SpMat ac(d, d);
  ac.setFromTriplets(trip.begin(), trip.end());
  g.op.build(ac, g.folded ? SpMat(d, d) : SpMat(mi * x));
  g.jump1 = a1;
  g.jump2 = a2;
  return g;
}

double weighted_norm(const Eigen::VectorXcd& y, const Eigen::VectorXd& w) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) acc += w(i) * std::norm(y(i));
  return acc;
}

}  // namespace

WaveFunction evolve_nonhermitian(const WaveFunction& psi, const SystemParams& params, double dt,
                                 const TrajectoryOptions& opts) {
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_nonhermitian: dt must be positive");
  if (psi.space.dim() != psi.amplitudes.size())
    throw std::invalid_argument("evolve_nonhermitian: inconsistent state");
  const McwfGenerator gen = make_generator(params, psi.space);
  Rk45Options ropt;
  ropt.rtol = opts.rtol;
  ropt.atol = opts.atol;
  Rk45<const McwfGenerator&> stepper(gen, 0.0, psi.amplitudes, ropt);
  stepper.advance_to(dt);
  WaveFunction out(psi.space, stepper.y());
  return out;
}

JumpRecord run_trajectory(const SystemParams& params, const HilbertSpace& space, double horizon,
                          uint64_t seed, const TrajectoryOptions& opts,
                          const std::vector<double>* sample_grid, std::vector<double>* n1_samples,
                          std::vector<double>* n2_samples, const WaveFunction* psi0,
                          WaveFunction* final_state) {
  JumpRecord rec;
  rec.seed = seed;
  rec.pulse_index = 0;
  const McwfGenerator gen = make_generator(params, space);
  SplitMix64 rng(seed);

  Eigen::VectorXcd psi;
  if (psi0) {
    if (psi0->space != space) throw std::invalid_argument("run_trajectory: psi0 space mismatch");
    psi = psi0->amplitudes / std::sqrt(psi0->amplitudes.squaredNorm());
  } else {
    psi = Eigen::VectorXcd::Zero(space.dim());
    psi(0) = 1.0;
  }

  // checkpoints: sorted sample times inside the horizon, then the horizon end
  std::vector<double> checkpoints;
  if (sample_grid) {
    for (double ts : *sample_grid)
      if (ts >= 0.0 && ts <= horizon) checkpoints.push_back(ts);
    std::sort(checkpoints.begin(), checkpoints.end());
  }
  if (checkpoints.empty() || checkpoints.back() < horizon) checkpoints.push_back(horizon);
  if (n1_samples) n1_samples->clear();
  if (n2_samples) n2_samples->clear();

  Rk45Options ropt;
  ropt.rtol = opts.rtol;
  ropt.atol = opts.atol;
  Rk45<const McwfGenerator&> stepper(gen, 0.0, psi, ropt);
  double threshold = rng.uniform_oo();
  Eigen::VectorXcd trial(space.dim()), jump_state(space.dim());

  auto take_sample = [&](double /*ts*/) {
    const double n2tot = stepper.y().squaredNorm();
    if (n1_samples) n1_samples->push_back(weighted_norm(stepper.y(), gen.n1_diag) / n2tot);
    if (n2_samples) n2_samples->push_back(weighted_norm(stepper.y(), gen.n2_diag) / n2tot);
  };

  try {
    for (double target : checkpoints) {
      while (stepper.t() < target) {
        double h_try = std::min(stepper.current_h(), target - stepper.t());
        const double h = stepper.attempt_until_accepted(h_try);
        if (stepper.attempted_y().squaredNorm() > threshold) {
          stepper.commit(h);
          continue;
        }
        // norm crossed the threshold inside (t, t+h]: bisect the jump time
        double lo = 0.0, hi = h;
        while (hi - lo > opts.jump_time_tol) {
          const double mid = 0.5 * (lo + hi);
          stepper.single_step(mid, trial);
          (trial.squaredNorm() > threshold ? lo : hi) = mid;
        }
        const double theta = 0.5 * (lo + hi);
        stepper.single_step(theta, jump_state);
        const double t_jump = stepper.t() + theta;

        const double p1 = params.kappa1 * weighted_norm(jump_state, gen.n1_diag);
        const double p2 = params.kappa2 * weighted_norm(jump_state, gen.n2_diag);
        if (!(p1 + p2 > 0.0)) throw IntegrationError("jump from zero-occupation state");
        const int channel = (rng.uniform_oo() * (p1 + p2) < p1) ? 1 : 2;

        Eigen::VectorXcd collapsed =
            (channel == 1 ? gen.jump1 : gen.jump2) * jump_state;
        const double cn = collapsed.squaredNorm();
        if (!(cn > 0.0)) throw IntegrationError("collapse produced a zero state");
        collapsed /= std::sqrt(cn);
        if (opts.record_channels & unsigned(channel)) rec.events.push_back({t_jump, channel});
        rec.n_jumps++;
        threshold = rng.uniform_oo();
        stepper.reset_state(t_jump, collapsed);
      }
      take_sample(target);
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  if (final_state) {
    *final_state = WaveFunction(space, stepper.y());
    final_state->refresh_norm2();
  }
  rec.n_steps = stepper.stats().steps;
  rec.n_rejected = stepper.stats().rejected;
  return rec;
}

namespace {

TrajectoryEnsemble run_ensemble_impl(const SystemParams& params, const HilbertSpace& space,
                                     double horizon, long n_traj, uint64_t master_seed,
                                     const EnsembleOptions& opts, bool parallel) {
  if (n_traj < 1) throw std::invalid_argument("run_ensemble: need at least one trajectory");
  for (double ts : opts.sample_grid)
    if (ts < 0.0 || ts > horizon)
      throw std::invalid_argument("run_ensemble: sample time outside [0, horizon]");
  const long chunk = 64;  // fixed accumulation chunking, independent of worker count
  const long n_chunks = (n_traj + chunk - 1) / chunk;
  const size_t n_s = opts.sample_grid.size();

  TrajectoryEnsemble ens;
  ens.n_trajectories = n_traj;
  ens.records.resize(size_t(n_traj));

  const size_t nc = static_cast<size_t>(n_chunks);
  std::vector<std::vector<double>> c_n1(nc), c_n1sq(nc), c_n2(nc), c_n2sq(nc);
  std::vector<long> c_ok(nc, 0);

  int threads = opts.threads;
#ifdef _OPENMP
  if (threads <= 0) threads = omp_get_max_threads();
#else
  threads = 1;
#endif

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(parallel ? threads : 1)
#endif
  for (long ci = 0; ci < n_chunks; ++ci) {
    auto& s_n1 = c_n1[size_t(ci)];
    auto& s_n1sq = c_n1sq[size_t(ci)];
    auto& s_n2 = c_n2[size_t(ci)];
    auto& s_n2sq = c_n2sq[size_t(ci)];
    s_n1.assign(n_s, 0.0);
    s_n1sq.assign(n_s, 0.0);
    s_n2.assign(n_s, 0.0);
    s_n2sq.assign(n_s, 0.0);
    std::vector<double> n1s, n2s;
    const long lo = ci * chunk, hi = std::min(n_traj, lo + chunk);
    for (long id = lo; id < hi; ++id) {
      const uint64_t seed = derive_stream_seed(master_seed, uint64_t(id));
      JumpRecord rec = run_trajectory(params, space, horizon, seed, opts.trajectory,
                                      n_s ? &opts.sample_grid : nullptr, n_s ? &n1s : nullptr,
                                      n_s ? &n2s : nullptr);
      rec.trajectory_id = id;
      if (!rec.failed) {
        c_ok[size_t(ci)]++;
        for (size_t k = 0; k < n_s; ++k) {
          s_n1[k] += n1s[k];
          s_n1sq[k] += n1s[k] * n1s[k];
          s_n2[k] += n2s[k];
          s_n2sq[k] += n2s[k] * n2s[k];
        }
      }
      if (opts.keep_records) {
        ens.records[size_t(id)] = std::move(rec);
      } else {
        ens.records[size_t(id)].trajectory_id = id;
        ens.records[size_t(id)].seed = seed;
        ens.records[size_t(id)].failed = rec.failed;
        ens.records[size_t(id)].error = rec.error;
        ens.records[size_t(id)].events = std::move(rec.events);
      }
    }
  }

  // deterministic merge in chunk order
  long n_ok = 0;
  std::vector<double> n1(n_s, 0.0), n1sq(n_s, 0.0), n2(n_s, 0.0), n2sq(n_s, 0.0);
  for (long ci = 0; ci < n_chunks; ++ci) {
    n_ok += c_ok[size_t(ci)];
    for (size_t k = 0; k < n_s; ++k) {
      n1[k] += c_n1[size_t(ci)][k];
      n1sq[k] += c_n1sq[size_t(ci)][k];
      n2[k] += c_n2[size_t(ci)][k];
      n2sq[k] += c_n2sq[size_t(ci)][k];
    }
  }
  ens.n_failed = n_traj - n_ok;
  if (n_s) {
    ens.observables.t = opts.sample_grid;
    ens.observables.n1_mean.resize(n_s);
    ens.observables.n1_stderr.resize(n_s);
    ens.observables.n2_mean.resize(n_s);
    ens.observables.n2_stderr.resize(n_s);
    for (size_t k = 0; k < n_s; ++k) {
      const double n = double(std::max<long>(n_ok, 1));
      const double m1 = n1[k] / n, m2 = n2[k] / n;
      ens.observables.n1_mean[k] = m1;
      ens.observables.n2_mean[k] = m2;
      const double v1 = n_ok > 1 ? std::max(0.0, (n1sq[k] - n * m1 * m1) / (n - 1.0)) : 0.0;
      const double v2 = n_ok > 1 ? std::max(0.0, (n2sq[k] - n * m2 * m2) / (n - 1.0)) : 0.0;
      ens.observables.n1_stderr[k] = std::sqrt(v1 / n);
      ens.observables.n2_stderr[k] = std::sqrt(v2 / n);
    }
  }
  return ens;
}

}  // namespace

TrajectoryEnsemble run_ensemble(const SystemParams& params, const HilbertSpace& space,
                                double horizon, long n_traj, uint64_t master_seed,
                                const EnsembleOptions& opts) {
  return run_ensemble_impl(params, space, horizon, n_traj, master_seed, opts, true);
}

TrajectoryEnsemble run_ensemble_reference(const SystemParams& params, const HilbertSpace& space,
                                          double horizon, long n_traj, uint64_t master_seed,
                                          const EnsembleOptions& opts) {
  return run_ensemble_impl(params, space, horizon, n_traj, master_seed, opts, false);
}

void write_jump_records(const std::string& path, const TrajectoryEnsemble& ens,
                        const SystemParams& params, const HilbertSpace& space, double horizon,
                        uint64_t master_seed) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_jump_records: cannot open " + path);
  f << "trajectory_id,seed,pulse_index,event_time,channel\n";
  char buf[64];
  for (const JumpRecord& rec : ens.records) {
    for (const JumpEvent& ev : rec.events) {
      std::snprintf(buf, sizeof buf, "%.17g", ev.time);
      f << rec.trajectory_id << ',' << rec.seed << ',' << rec.pulse_index << ',' << buf << ','
        << ev.channel << '\n';
    }
  }
  f.close();

  std::ofstream m(path + ".meta");
  if (!m) throw std::runtime_error("write_jump_records: cannot open " + path + ".meta");
  auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    m << key << " = " << buf << '\n';
  };
  m << "format = upb-jump-records-v1\n";
  m << "code_version = " << UPB_VERSION << '\n';
  m << "master_seed = " << master_seed << '\n';
  m << "n_trajectories = " << ens.n_trajectories << '\n';
  m << "n_failed = " << ens.n_failed << '\n';
  put("horizon", horizon);
  m << "n1_levels = " << space.n1_levels() << '\n';
  m << "n2_levels = " << space.n2_levels() << '\n';
  put("delta1", params.delta1);
  put("delta2", params.delta2);
  put("u1", params.u1);
  put("u2", params.u2);
  put("j_coupling", params.j_coupling);
  put("kappa1", params.kappa1);
  put("kappa2", params.kappa2);
  m << "drive_kind = " << (params.drive.is_constant() ? "constant" : "gaussian-train") << '\n';
  put("drive_amplitude", params.drive.amplitude);
  put("drive_sigma_t", params.drive.sigma_t);
  put("drive_period", params.drive.period);
  put("drive_t0", params.drive.t0);
  m << "drive_n_pulses = " << params.drive.n_pulses << '\n';
}

TrajectoryEnsemble read_jump_records(const std::string& path, SystemParams* params_out,
                                     HilbertSpace* space_out, double* horizon_out) {
  std::ifstream meta(path + ".meta");
  if (!meta)
    throw std::runtime_error("read_jump_records: metadata sidecar missing: " + path + ".meta");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(meta, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto strip = [](std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    };
    strip(key);
    strip(val);
    kv[key] = val;
  }
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw std::runtime_error("read_jump_records: metadata key missing: " + key);
    return it->second;
  };
  if (need("format") != "upb-jump-records-v1")
    throw std::runtime_error("read_jump_records: unknown format tag");

  TrajectoryEnsemble ens;
  ens.n_trajectories = std::stol(need("n_trajectories"));
  ens.n_failed = std::stol(need("n_failed"));
  if (ens.n_trajectories < 1) throw std::runtime_error("read_jump_records: empty ensemble");
  ens.records.resize(size_t(ens.n_trajectories));
  for (long id = 0; id < ens.n_trajectories; ++id) ens.records[size_t(id)].trajectory_id = id;

  if (params_out) {
    SystemParams p;
    p.delta1 = std::stod(need("delta1"));
    p.delta2 = std::stod(need("delta2"));
    p.u1 = std::stod(need("u1"));
    p.u2 = std::stod(need("u2"));
    p.j_coupling = std::stod(need("j_coupling"));
    p.kappa1 = std::stod(need("kappa1"));
    p.kappa2 = std::stod(need("kappa2"));
    if (need("drive_kind") == "constant") {
      p.drive = PulseShape::constant(std::stod(need("drive_amplitude")));
    } else {
      p.drive = PulseShape::gaussian_train(std::stod(need("drive_amplitude")),
                                           std::stod(need("drive_sigma_t")),
                                           std::stod(need("drive_period")),
                                           std::stod(need("drive_t0")),
                                           std::stoi(need("drive_n_pulses")));
    }
    *params_out = p;
  }
  if (space_out) *space_out = HilbertSpace(std::stoi(need("n1_levels")), std::stoi(need("n2_levels")));
  if (horizon_out) *horizon_out = std::stod(need("horizon"));

  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_jump_records: cannot open " + path);
  if (!std::getline(f, line) || line.rfind("trajectory_id,", 0) != 0)
    throw std::runtime_error("read_jump_records: bad or missing CSV header in " + path);
  long lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    long id, pidx;
    unsigned long long seed;
    double t;
    int ch;
    if (std::sscanf(line.c_str(), "%ld,%llu,%ld,%lf,%d", &id, &seed, &pidx, &t, &ch) != 5 ||
        id < 0 || id >= ens.n_trajectories || (ch != 1 && ch != 2))
      throw std::runtime_error("read_jump_records: corrupt row at line " + std::to_string(lineno));
    JumpRecord& rec = ens.records[size_t(id)];
    rec.seed = seed;
    rec.pulse_index = int(pidx);
    rec.events.push_back({t, ch});
  }
  return ens;
}

}  // namespace upb
