#ifndef UPB_RK45_HPP
#define UPB_RK45_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace upb {

struct Rk45Options {
  double rtol = 1e-8;
  double atol = 1e-12;
  double h_init = 0.0;  // 0 -> pick automatically
  double h_max = 0.0;   // 0 -> unlimited
};

struct Rk45Stats {
  long long steps = 0;
  long long rejected = 0;
  long long evals = 0;
};

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dormand-Prince 5(4) adaptive stepper over complex vectors, FSAL.
/// Rhs signature: void(double t, const VectorXcd& y, VectorXcd& dydt).
template <class Rhs>
class Rk45 {
 public:
  Rk45(Rhs rhs, double t0, Eigen::VectorXcd y0, Rk45Options opt = {})
      : rhs_(rhs), t_(t0), y_(std::move(y0)), opt_(opt) {
    const auto n = y_.size();
    k1_.resize(n); k2_.resize(n); k3_.resize(n); k4_.resize(n);
    k5_.resize(n); k6_.resize(n); k7_.resize(n);
    ytmp_.resize(n); ynew_.resize(n);
    rhs_(t_, y_, k1_);
    stats_.evals++;
    h_ = opt_.h_init > 0.0 ? opt_.h_init : 1e-4;
  }

  double t() const { return t_; }
  const Eigen::VectorXcd& y() const { return y_; }
  const Eigen::VectorXcd& attempted_y() const { return ynew_; }
  const Rk45Stats& stats() const { return stats_; }
  double current_h() const { return h_; }

  /// Integrate up to exactly t_end (t_end >= t).
  void advance_to(double t_end) {
    while (t_ < t_end) {
      double h_try = std::min(h_, t_end - t_);
      if (opt_.h_max > 0.0) h_try = std::min(h_try, opt_.h_max);
      commit(attempt_until_accepted(h_try));
    }
  }

  /// One trial step of size h from the current committed state; fills ynew and
  /// the scaled error estimate. Does not commit.
  double attempt(double h) {
    const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    ytmp_ = y_ + h * (a21 * k1_);
    rhs_(t_ + c2 * h, ytmp_, k2_);
    ytmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
    rhs_(t_ + c3 * h, ytmp_, k3_);
    ytmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(t_ + c4 * h, ytmp_, k4_);
    ytmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(t_ + c5 * h, ytmp_, k5_);
    ytmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(t_ + h, ytmp_, k6_);
    ynew_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    rhs_(t_ + h, ynew_, k7_);
    stats_.evals += 6;

    // weighted rms of the embedded 4th/5th order difference
    double acc = 0.0;
    const auto n = y_.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const cplx e = h * (e1 * k1_(i) + e3 * k3_(i) + e4 * k4_(i) + e5 * k5_(i) + e6 * k6_(i) +
                          e7 * k7_(i));
      const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y_(i)), std::abs(ynew_(i)));
      const double q = std::abs(e) / sc;
      acc += q * q;
    }
    return std::sqrt(acc / double(n));
  }

  /// Accept the last attempt() of size h: advance time, FSAL swap.
  void commit(double h) {
    t_ += h;
    y_.swap(ynew_);
    k1_.swap(k7_);
    stats_.steps++;
  }

  /// Adaptive retry loop; returns the accepted step size (state not committed,
  /// call commit() with the returned h).
  double attempt_until_accepted(double h_try) {
    for (;;) {
      const double err = attempt(h_try);
      if (err <= 1.0) {
        const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h_ = h_try * std::clamp(grow, 0.2, 5.0);
        if (opt_.h_max > 0.0) h_ = std::min(h_, opt_.h_max);
        return h_try;
      }
      stats_.rejected++;
      h_try *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      if (!(h_try > 1e-14 * std::max(1.0, std::abs(t_))) || !std::isfinite(err))
        throw IntegrationError("rk45: step size underflow");
    }
  }

  /// Single 5th-order step of size h from (t, y) without error control or
  /// state change; used for jump-time bisection.
  void single_step(double h, Eigen::VectorXcd& out) {
    const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    ytmp_ = y_ + h * (a21 * k1_);
    rhs_(t_ + c2 * h, ytmp_, k2_);
    ytmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
    rhs_(t_ + c3 * h, ytmp_, k3_);
    ytmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(t_ + c4 * h, ytmp_, k4_);
    ytmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(t_ + c5 * h, ytmp_, k5_);
    ytmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(t_ + h, ytmp_, k6_);
    out = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    stats_.evals += 5;
  }

  /// Re-anchor the stepper at (t, y) after an external state change (jump).
  void reset_state(double t, const Eigen::VectorXcd& y) {
    t_ = t;
    y_ = y;
    rhs_(t_, y_, k1_);
    stats_.evals++;
  }

 private:
  using cplx = std::complex<double>;
  // Dormand-Prince coefficients
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Rhs rhs_;
  double t_;
  Eigen::VectorXcd y_;
  Rk45Options opt_;
  Rk45Stats stats_;
  double h_ = 1e-4;
  Eigen::VectorXcd k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, ynew_;
};

}  // namespace upb

#endif
