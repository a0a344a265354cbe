// Timing probe for the pulsed single-pulse campaign configuration.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "upb/trajectories.hpp"

using namespace upb;

int main(int argc, char** argv) {
  long n_traj = 20;
  double rtol = 1e-6;
  double horizon_override = 0.0;
  if (argc > 1) n_traj = std::atol(argv[1]);
  if (argc > 2) rtol = std::atof(argv[2]);
  if (argc > 3) horizon_override = std::atof(argv[3]);

  SystemParams p;
  p.delta1 = p.delta2 = -0.29;
  p.u1 = p.u2 = -0.001;
  p.j_coupling = 19.6;
  const double sigma = 6.0770678753637636, period = 30.385339376818817;
  p.drive = PulseShape::gaussian_train(150.0, sigma, period, period / 2);
  const HilbertSpace space(4, 18);

  EnsembleOptions opts;
  opts.trajectory.rtol = rtol;
  opts.trajectory.record_channels = 1;
  opts.threads = 2;

  const double horizon = horizon_override > 0.0 ? horizon_override : period;
  const auto t0 = std::chrono::steady_clock::now();
  const TrajectoryEnsemble ens = run_ensemble(p, space, horizon, n_traj, 4, opts);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  size_t ev = 0;
  long ch1 = 0;
  long long steps = 0, rejected = 0, jumps = 0;
  for (const auto& r : ens.records) {
    ev += r.events.size();
    steps += r.n_steps;
    rejected += r.n_rejected;
    jumps += r.n_jumps;
    for (const auto& e : r.events) ch1 += e.channel == 1;
  }
  std::printf("rtol=%g n=%ld: %.2f s wall (x2), %.1f ms/traj/core, ch1 %.2f/pulse, "
              "steps %.0f rej %.0f jumps %.0f per traj, %.2f us/step\n",
              rtol, n_traj, dt, 2.0 * 1e3 * dt / double(n_traj), double(ch1) / double(n_traj),
              double(steps) / double(n_traj), double(rejected) / double(n_traj),
              double(jumps) / double(n_traj), 2e6 * dt / double(steps + rejected));
  return 0;
}
