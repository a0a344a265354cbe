#include "upb/counting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "upb/rng.hpp"

namespace upb {

FilterWindow locate_filter_window(const std::vector<double>& t, const std::vector<double>& g2tt,
                                  double width) {
  if (t.size() != g2tt.size() || t.size() < 3)
    throw std::invalid_argument("locate_filter_window: curve too short");
  if (!(width > 0.0)) throw std::invalid_argument("locate_filter_window: width must be positive");
  // interior minimum: strictly below both neighbors somewhere inside the curve
  int best = -1;
  double best_val = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i + 1 < t.size(); ++i) {
    if (std::isnan(g2tt[i])) continue;
    if (g2tt[i] < best_val) {
      best_val = g2tt[i];
      best = int(i);
    }
  }
  if (best <= 0 || size_t(best) + 1 >= t.size())
    throw std::runtime_error("locate_filter_window: no interior g2(t,t) minimum found");
  // reject flat curves (no actual dip relative to the edges)
  double edge = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < t.size(); ++i)
    if (!std::isnan(g2tt[i])) {
      edge = std::max(std::isnan(edge) ? 0.0 : edge, g2tt[i]);
    }
  if (!(best_val < edge * (1.0 - 1e-9)))
    throw std::runtime_error("locate_filter_window: g2(t,t) curve has no interior minimum");
  FilterWindow w;
  w.center_rule = FilterWindow::CenterRule::G2Minimum;
  const double center = t[size_t(best)];
  w.t1 = center - 0.5 * width;
  w.t2 = center + 0.5 * width;
  if (w.t1 < t.front() || w.t2 > t.back())
    throw std::runtime_error("locate_filter_window: window does not fit inside the curve");
  return w;
}

FilterWindow locate_filter_window(const SystemParams& params, const HilbertSpace& space,
                                  double width, int n_samples, const SolverOptions& opts) {
  params.validate();
  if (!params.drive.is_constant() && width > params.drive.period)
    throw std::invalid_argument("locate_filter_window: width exceeds the pulse period");
  const double horizon = params.drive.is_constant() ? width * 4.0 : params.drive.period;
  const PulseDiagnostics diag = pulse_diagnostics(params, space, horizon, n_samples, opts);
  return locate_filter_window(diag.t, diag.g2tt, width);
}

namespace {

// channel-1 counts per sub-window position for one record
void count_singles(const JumpRecord& rec, const FilterWindow& win, double delta_t, long n_w,
                   std::vector<int>& scratch) {
  std::fill(scratch.begin(), scratch.end(), 0);
  for (const JumpEvent& ev : rec.events) {
    if (ev.channel != 1 || !win.contains(ev.time)) continue;
    const long w = long((ev.time - win.t1) / delta_t);
    if (w >= 0 && w < n_w) scratch[size_t(w)]++;
  }
}

}  // namespace

PairCountResult filtered_pair_statistics(const TrajectoryEnsemble& ens, const FilterWindow& window,
                                         double delta_t) {
  window.validate();
  if (!(delta_t > 0.0) || delta_t > window.width() * (1.0 + 1e-12))
    throw std::invalid_argument("filtered_pair_statistics: need 0 < delta_t <= window width");
  const long n_w = std::max<long>(1, long(window.width() / delta_t + 1e-9));

  PairCountResult res;
  res.delta_t = delta_t;

  long long pairs = 0;
  std::vector<double> singles(static_cast<size_t>(n_w), 0.0);
  std::vector<int> scratch(static_cast<size_t>(n_w));
  long n_used = 0;
  for (const JumpRecord& rec : ens.records) {
    if (rec.failed) continue;
    ++n_used;
    count_singles(rec, window, delta_t, n_w, scratch);
    for (long w = 0; w < n_w; ++w) {
      const long long c = scratch[size_t(w)];
      pairs += c * (c - 1) / 2;
      singles[size_t(w)] += double(c);
    }
  }
  res.pair_count = pairs;

  double expected = 0.0;
  if (n_used > 0) {
    for (long w = 0; w < n_w; ++w) {
      const double mu = singles[size_t(w)] / double(n_used);
      expected += 0.5 * mu * mu;
    }
    expected *= double(n_used);
  }
  res.poisson_expected = expected;
  if (expected <= 0.0) {
    res.defined = false;
    res.g2 = std::numeric_limits<double>::quiet_NaN();
    res.error = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  res.defined = true;
  res.g2 = double(pairs) / expected;
  res.error = (pairs > 0 ? std::sqrt(double(pairs)) : 1.0) / expected;
  return res;
}

double poisson_expectation(const TrajectoryEnsemble& ens, const FilterWindow& window,
                           double delta_t) {
  PairCountResult r = filtered_pair_statistics(ens, window, delta_t);
  return r.poisson_expected;
}

CoincidenceHistogram coincidence_histogram(const TrajectoryEnsemble& ens, double pulse_period,
                                           const FilterWindow* window, uint64_t shuffle_seed,
                                           int max_offset) {
  if (!(pulse_period > 0.0))
    throw std::invalid_argument("coincidence_histogram: pulse period must be positive");
  if (max_offset < 1) throw std::invalid_argument("coincidence_histogram: max_offset >= 1");

  // retained channel-1 event count per record
  std::vector<int> counts;
  counts.reserve(ens.records.size());
  for (const JumpRecord& rec : ens.records) {
    if (rec.failed) continue;
    int c = 0;
    for (const JumpEvent& ev : rec.events)
      if (ev.channel == 1 && (!window || window->contains(ev.time))) ++c;
    counts.push_back(c);
  }

  // Fisher-Yates rearrangement into a synthetic pulse train
  SplitMix64 rng(shuffle_seed);
  const size_t n = counts.size();
  for (size_t i = n; i > 1; --i) {
    const size_t j = size_t(rng.next() % i);
    std::swap(counts[i - 1], counts[j]);
  }

  CoincidenceHistogram hist;
  hist.offsets.resize(size_t(2 * max_offset + 1));
  hist.pairs.assign(size_t(2 * max_offset + 1), 0);
  std::iota(hist.offsets.begin(), hist.offsets.end(), -long(max_offset));
  for (size_t p = 0; p < n; ++p) {
    const long long c = counts[p];
    hist.pairs[size_t(max_offset)] += c * (c - 1);  // ordered within-pulse pairs
    for (int d = 1; d <= max_offset; ++d) {
      if (p + size_t(d) >= n) break;
      const long long cross = c * counts[p + size_t(d)];
      hist.pairs[size_t(max_offset + d)] += cross;
      hist.pairs[size_t(max_offset - d)] += cross;
    }
  }
  return hist;
}

double single_photon_yield(const TrajectoryEnsemble& ens, const FilterWindow& window,
                           double pulse_rate_hz) {
  window.validate();
  if (!(pulse_rate_hz >= 0.0))
    throw std::invalid_argument("single_photon_yield: negative pulse rate");
  long n_used = 0, n_single = 0;
  for (const JumpRecord& rec : ens.records) {
    if (rec.failed) continue;
    ++n_used;
    int c = 0;
    for (const JumpEvent& ev : rec.events)
      if (ev.channel == 1 && window.contains(ev.time)) ++c;
    if (c == 1) ++n_single;
  }
  if (n_used == 0) return 0.0;
  return double(n_single) / double(n_used) * pulse_rate_hz;
}

}  // namespace upb
