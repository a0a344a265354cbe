#ifndef UPB_TRAJECTORIES_HPP
#define UPB_TRAJECTORIES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "upb/fock.hpp"
#include "upb/params.hpp"
#include "upb/states.hpp"

namespace upb {

struct JumpEvent {
  double time;
  int channel;  // 1 or 2
};

struct JumpRecord {
  long trajectory_id = 0;
  uint64_t seed = 0;
  int pulse_index = 0;
  std::vector<JumpEvent> events;
  bool failed = false;
  std::string error;
  long long n_steps = 0, n_rejected = 0, n_jumps = 0;  // engine diagnostics
};

struct TrajectoryOptions {
  double rtol = 1e-6;
  double atol = 1e-10;
  double jump_time_tol = 1e-3;  // bisection tolerance on the jump time, units 1/kappa
  unsigned record_channels = 3;  // bitmask: 1 -> channel 1, 2 -> channel 2
};

struct EnsembleObservables {
  std::vector<double> t;
  std::vector<double> n1_mean, n1_stderr;
  std::vector<double> n2_mean, n2_stderr;
};

struct TrajectoryEnsemble {
  std::vector<JumpRecord> records;
  long n_trajectories = 0;
  long n_failed = 0;
  EnsembleObservables observables;  // empty grid when sampling was not requested
};

/// Non-Hermitian half of the MCWF scheme: integrates
/// i d|psi>/dt = (H_s - (i/2) sum_j kappa_j n_j) |psi> over dt.
/// Norm is non-increasing for zero drive; no jumps are performed.
WaveFunction evolve_nonhermitian(const WaveFunction& psi, const SystemParams& params, double dt,
                                 const TrajectoryOptions& opts = {});

/// One stochastic trajectory from |psi0> (vacuum by default) over [0, horizon].
/// Jump times located by bisection on the norm threshold; channel chosen with
/// a fresh uniform draw, probabilities kappa_j <n_j>.
JumpRecord run_trajectory(const SystemParams& params, const HilbertSpace& space, double horizon,
                          uint64_t seed, const TrajectoryOptions& opts = {},
                          const std::vector<double>* sample_grid = nullptr,
                          std::vector<double>* n1_samples = nullptr,
                          std::vector<double>* n2_samples = nullptr,
                          const WaveFunction* psi0 = nullptr,
                          WaveFunction* final_state = nullptr);

struct EnsembleOptions {
  TrajectoryOptions trajectory;
  std::vector<double> sample_grid;  // optional observable sampling times
  int threads = 0;                  // 0 -> all available
  bool keep_records = true;
};

/// OpenMP ensemble: per-trajectory seeds derived from the master seed, fixed
/// chunked reduction, bit-identical results for any worker count.
TrajectoryEnsemble run_ensemble(const SystemParams& params, const HilbertSpace& space,
                                double horizon, long n_traj, uint64_t master_seed,
                                const EnsembleOptions& opts = {});

/// Plain serial loop, kept as the reference implementation for testing and
/// benchmarking against the parallel path.
TrajectoryEnsemble run_ensemble_reference(const SystemParams& params, const HilbertSpace& space,
                                          double horizon, long n_traj, uint64_t master_seed,
                                          const EnsembleOptions& opts = {});

/// Event log I/O: CSV (trajectory_id, seed, pulse_index, event_time, channel)
/// plus a key=value metadata sidecar at <path>.meta.
void write_jump_records(const std::string& path, const TrajectoryEnsemble& ens,
                        const SystemParams& params, const HilbertSpace& space, double horizon,
                        uint64_t master_seed);
TrajectoryEnsemble read_jump_records(const std::string& path, SystemParams* params_out = nullptr,
                                     HilbertSpace* space_out = nullptr, double* horizon_out = nullptr);

}  // namespace upb

#endif
