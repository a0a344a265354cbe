#ifndef UPB_COUNTING_HPP
#define UPB_COUNTING_HPP

#include <cstdint>
#include <vector>

#include "upb/dynamics.hpp"
#include "upb/trajectories.hpp"

namespace upb {

struct FilterWindow {
  enum class CenterRule { Explicit, G2Minimum };
  double t1 = 0.0, t2 = 0.0;
  CenterRule center_rule = CenterRule::Explicit;

  double width() const { return t2 - t1; }
  bool contains(double t) const { return t >= t1 && t < t2; }
  void validate() const {
    if (!(t2 > t1)) throw std::invalid_argument("FilterWindow: t2 must exceed t1");
  }
};

/// Window of the requested width centered on the interior minimum of the
/// supplied equal-time g2 curve. Throws when no interior minimum exists
/// (e.g. a flat linear-system curve) or the window does not fit the curve.
FilterWindow locate_filter_window(const std::vector<double>& t, const std::vector<double>& g2tt,
                                  double width);
/// Same, computing the g2(t,t) curve from the master equation over one pulse
/// period. Rejects widths exceeding the pulse period.
FilterWindow locate_filter_window(const SystemParams& params, const HilbertSpace& space,
                                  double width, int n_samples = 401, const SolverOptions& opts = {});

struct PairCountResult {
  double delta_t = 0.0;
  long long pair_count = 0;
  double poisson_expected = 0.0;  // expected pair total for Poissonian statistics
  double g2 = 0.0;
  double error = 0.0;  // sqrt(pair_count)/poisson_expected; 1/poisson_expected when zero counts
  bool defined = false;
};

/// Channel-1 pair statistics in contiguous sub-windows of duration delta_t
/// tiling the global window, normalized to the Poisson expectation.
PairCountResult filtered_pair_statistics(const TrajectoryEnsemble& ens, const FilterWindow& window,
                                         double delta_t);

/// Total expected pair count over the ensemble for Poissonian emission with
/// the observed per-sub-window singles rates: n_traj * sum_w mu_w^2 / 2.
double poisson_expectation(const TrajectoryEnsemble& ens, const FilterWindow& window,
                           double delta_t);

struct CoincidenceHistogram {
  std::vector<long long> offsets;  // signed pulse separations
  std::vector<long long> pairs;    // ordered channel-1 pair counts per offset
};

/// Pulse-to-pulse coincidences after a seeded random rearrangement of the
/// single-pulse records into a synthetic train. Offset 0 counts ordered pairs
/// within a pulse, n(n-1) per record; a window restricts events first.
CoincidenceHistogram coincidence_histogram(const TrajectoryEnsemble& ens, double pulse_period,
                                           const FilterWindow* window, uint64_t shuffle_seed,
                                           int max_offset = 10);

/// (probability of exactly one retained channel-1 event per pulse) x pulse rate.
double single_photon_yield(const TrajectoryEnsemble& ens, const FilterWindow& window,
                           double pulse_rate_hz);

}  // namespace upb

#endif
