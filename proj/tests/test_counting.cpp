#include "doctest.h"

#include <cmath>

#include "support/oracles.hpp"
#include "upb/counting.hpp"

using namespace upb;

TEST_CASE("locate_filter_window on synthetic curves") {
  SUBCASE("symmetric dip centered at t = 5") {
    std::vector<double> t, g2;
    for (int i = 0; i <= 200; ++i) {
      const double ti = 10.0 * i / 200.0;
      t.push_back(ti);
      g2.push_back(1.0 - 0.8 * std::exp(-(ti - 5.0) * (ti - 5.0)));
    }
    const FilterWindow w = locate_filter_window(t, g2, 2.0);
    CHECK(w.center_rule == FilterWindow::CenterRule::G2Minimum);
    CHECK(0.5 * (w.t1 + w.t2) == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(w.width() == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("flat curve has no interior minimum") {
    std::vector<double> t, g2;
    for (int i = 0; i <= 50; ++i) {
      t.push_back(0.2 * i);
      g2.push_back(1.0);
    }
    CHECK_THROWS(locate_filter_window(t, g2, 1.0));
  }
  SUBCASE("window wider than the pulse period rejected") {
    SystemParams p;
    p.drive = PulseShape::gaussian_train(1.0, 1.0, 10.0, 5.0);
    CHECK_THROWS_AS(locate_filter_window(p, HilbertSpace(3, 3), 12.0), std::invalid_argument);
  }
}

TEST_CASE("poisson calibration of the filtered pair statistics") {
  // synthetic homogeneous Poisson streams: g2 = 1 within 3 sigma for every delta_t
  const double rate = 0.8;
  const double horizon = 20.0;
  const auto ens = oracle::poisson_ensemble(4000, rate, horizon, 99);
  FilterWindow win{2.0, 18.0, FilterWindow::CenterRule::Explicit};
  for (double dt : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    const PairCountResult r = filtered_pair_statistics(ens, win, dt);
    REQUIRE(r.defined);
    CHECK(std::abs(r.g2 - 1.0) <= 3.0 * r.error);
    // reported error: sqrt(raw pairs) scaled by the normalization
    CHECK(r.error == doctest::Approx(std::sqrt(double(r.pair_count)) / r.poisson_expected));
  }
}

TEST_CASE("poisson expectation closed form for a uniform rate") {
  const double rate = 1.7, horizon = 30.0;
  const auto ens = oracle::poisson_ensemble(20000, rate, horizon, 7);
  FilterWindow win{5.0, 25.0, FilterWindow::CenterRule::Explicit};
  const double dt = 0.5;
  const long n_w = long(win.width() / dt);
  const double expected_per_window = 0.5 * rate * dt * rate * dt;
  const double predicted = double(ens.n_trajectories) * double(n_w) * expected_per_window;
  const double measured = poisson_expectation(ens, win, dt);
  // mu_w estimates fluctuate; agreement at the percent level is plenty here
  CHECK(measured == doctest::Approx(predicted).epsilon(0.02));
}

TEST_CASE("empty ensemble normalization flagged undefined") {
  TrajectoryEnsemble ens;
  ens.n_trajectories = 5;
  ens.records.resize(5);
  FilterWindow win{0.0, 1.0, FilterWindow::CenterRule::Explicit};
  const PairCountResult r = filtered_pair_statistics(ens, win, 0.5);
  CHECK(!r.defined);
  CHECK(r.pair_count == 0);
  CHECK(poisson_expectation(ens, win, 0.5) == 0.0);
}

TEST_CASE("perfect single-photon stream gives exactly zero with one-sided error") {
  const auto ens = oracle::single_photon_ensemble(5000, 0.5);
  FilterWindow win{0.0, 1.0, FilterWindow::CenterRule::Explicit};
  const PairCountResult r = filtered_pair_statistics(ens, win, 1.0);
  REQUIRE(r.defined);
  CHECK(r.pair_count == 0);
  CHECK(r.g2 == 0.0);
  CHECK(r.error == doctest::Approx(1.0 / r.poisson_expected));
}

TEST_CASE("pair count is monotone in delta_t and >= 3 events contribute n(n-1)/2") {
  TrajectoryEnsemble ens;
  ens.n_trajectories = 1;
  ens.records.resize(1);
  for (double t : {0.1, 0.2, 0.3, 1.4, 2.2, 2.3, 2.35}) ens.records[0].events.push_back({t, 1});
  FilterWindow win{0.0, 4.0, FilterWindow::CenterRule::Explicit};
  long long prev = 0;
  for (double dt : {0.5, 1.0, 2.0, 4.0}) {
    const PairCountResult r = filtered_pair_statistics(ens, win, dt);
    CHECK(r.pair_count >= prev);
    prev = r.pair_count;
  }
  // all 7 events in one window: 7*6/2 unordered pairs
  CHECK(filtered_pair_statistics(ens, win, 4.0).pair_count == 21);
}

TEST_CASE("delta_t larger than the window rejected") {
  TrajectoryEnsemble ens;
  ens.n_trajectories = 1;
  ens.records.resize(1);
  FilterWindow win{0.0, 1.0, FilterWindow::CenterRule::Explicit};
  CHECK_THROWS_AS(filtered_pair_statistics(ens, win, 2.0), std::invalid_argument);
}

TEST_CASE("coincidence histogram") {
  SUBCASE("single-photon train: empty center bin, uniform side peaks") {
    const auto ens = oracle::single_photon_ensemble(3000, 0.4);
    const CoincidenceHistogram h = coincidence_histogram(ens, 1.0, nullptr, 5, 6);
    REQUIRE(h.offsets.size() == 13);
    CHECK(h.offsets[6] == 0);
    CHECK(h.pairs[6] == 0);
    for (size_t i = 0; i < h.offsets.size(); ++i) {
      if (h.offsets[i] == 0) continue;
      const long expected = 3000 - std::abs(h.offsets[i]);
      CHECK(h.pairs[i] == expected);  // exactly one photon per pulse
    }
  }
  SUBCASE("poisson input: center bin equals the side-peak mean within 3 sigma") {
    const double rate = 1.1, horizon = 2.0;
    const auto ens = oracle::poisson_ensemble(20000, rate, horizon, 31);
    const CoincidenceHistogram h = coincidence_histogram(ens, horizon, nullptr, 17, 8);
    double side = 0.0;
    int n_side = 0;
    for (size_t i = 0; i < h.offsets.size(); ++i)
      if (h.offsets[i] != 0) {
        side += double(h.pairs[i]);
        ++n_side;
      }
    side /= n_side;
    const double center = double(h.pairs[8]);
    const double sigma = std::sqrt(side * (1.0 + 1.0 / n_side));
    CHECK(std::abs(center - side) <= 3.0 * sigma);
  }
  SUBCASE("window filtering drops outside events") {
    TrajectoryEnsemble ens;
    ens.n_trajectories = 2;
    ens.records.resize(2);
    ens.records[0].events = {{0.1, 1}, {0.5, 1}};  // one in, one out
    ens.records[1].events = {{0.45, 1}, {0.55, 1}};
    FilterWindow win{0.4, 0.6, FilterWindow::CenterRule::Explicit};
    const CoincidenceHistogram h = coincidence_histogram(ens, 1.0, &win, 1, 2);
    long long total = 0;
    for (long long c : h.pairs) total += c;
    // retained: record0 -> 1 event, record1 -> 2 events; pairs: within record1 (2) + cross (1*2 both directions)
    CHECK(h.pairs[2] == 2);
    CHECK(total == 2 + 2 * 2);
  }
}

TEST_CASE("single photon yield") {
  SUBCASE("every pulse one retained event at 5e7 pulses/s") {
    const auto ens = oracle::single_photon_ensemble(1000, 0.5);
    FilterWindow win{0.0, 1.0, FilterWindow::CenterRule::Explicit};
    CHECK(single_photon_yield(ens, win, 5e7) == doctest::Approx(5e7));
  }
  SUBCASE("no retained events") {
    const auto ens = oracle::single_photon_ensemble(1000, 5.0);
    FilterWindow win{0.0, 1.0, FilterWindow::CenterRule::Explicit};
    CHECK(single_photon_yield(ens, win, 5e7) == 0.0);
  }
}
