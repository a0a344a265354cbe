// Compares the serial reference ensemble against the OpenMP path: wall time,
// trajectories/s, and a bitwise check that both produce the same event logs.
#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "upb/trajectories.hpp"

using namespace upb;

namespace {

bool same_records(const TrajectoryEnsemble& a, const TrajectoryEnsemble& b) {
  if (a.records.size() != b.records.size()) return false;
  for (size_t i = 0; i < a.records.size(); ++i) {
    const auto &ra = a.records[i], &rb = b.records[i];
    if (ra.seed != rb.seed || ra.failed != rb.failed || ra.events.size() != rb.events.size())
      return false;
    for (size_t k = 0; k < ra.events.size(); ++k)
      if (ra.events[k].time != rb.events[k].time || ra.events[k].channel != rb.events[k].channel)
        return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  long n_traj = 2000;
  if (argc > 1) n_traj = std::atol(argv[1]);

  SystemParams p;
  p.delta1 = p.delta2 = -0.29;
  p.u1 = p.u2 = -0.001;
  p.j_coupling = 19.6;
  p.drive = PulseShape::constant(30.0);
  const HilbertSpace space(4, 18);
  const double horizon = 10.0;
  const uint64_t seed = 99;

  EnsembleOptions opts;
  for (int i = 1; i <= 20; ++i) opts.sample_grid.push_back(horizon * i / 20.0);

  auto timed = [&](const char* label, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    TrajectoryEnsemble ens = fn();
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-18s %8.2f s   %9.1f traj/s   events %zu\n", label, dt, n_traj / dt, [&] {
      size_t n = 0;
      for (const auto& r : ens.records) n += r.events.size();
      return n;
    }());
    return ens;
  };

  const TrajectoryEnsemble ref = timed("serial reference", [&] {
    return run_ensemble_reference(p, space, horizon, n_traj, seed, opts);
  });
#ifdef _OPENMP
  for (int threads : {1, 2, omp_get_max_threads()}) {
    EnsembleOptions o = opts;
    o.threads = threads;
    char label[64];
    std::snprintf(label, sizeof label, "openmp x%d", threads);
    const TrajectoryEnsemble par =
        timed(label, [&] { return run_ensemble(p, space, horizon, n_traj, seed, o); });
    std::printf("  records identical to reference: %s\n", same_records(ref, par) ? "yes" : "NO");
  }
#endif
  return 0;
}
