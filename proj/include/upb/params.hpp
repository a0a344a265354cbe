#ifndef UPB_PARAMS_HPP
#define UPB_PARAMS_HPP

#include <cmath>
#include <stdexcept>

namespace upb {

/// Drive envelope F(t). Natural units throughout: energies in hbar*kappa_ref,
/// times in 1/kappa_ref.
struct PulseShape {
  enum class Kind { Constant, GaussianTrain };
  Kind kind = Kind::Constant;
  double amplitude = 0.0;  // F (constant) or F_peak (train)
  double sigma_t = 1.0;    // gaussian standard deviation
  double period = 1.0;
  double t0 = 0.0;         // center of the first pulse
  int n_pulses = 1;

  static PulseShape constant(double f) {
    PulseShape p;
    p.kind = Kind::Constant;
    p.amplitude = f;
    return p;
  }
  static PulseShape gaussian_train(double f_peak, double sigma, double period, double t0,
                                   int n_pulses = 1) {
    PulseShape p;
    p.kind = Kind::GaussianTrain;
    p.amplitude = f_peak;
    p.sigma_t = sigma;
    p.period = period;
    p.t0 = t0;
    p.n_pulses = n_pulses;
    return p;
  }

  bool is_constant() const { return kind == Kind::Constant; }

  double at(double t) const {
    if (kind == Kind::Constant) return amplitude;
    double f = 0.0;
    for (int k = 0; k < n_pulses; ++k) {
      const double dt = t - (t0 + k * period);
      f += std::exp(-dt * dt / (2.0 * sigma_t * sigma_t));
    }
    return amplitude * f;
  }

  void validate() const {
    if (!std::isfinite(amplitude)) throw std::invalid_argument("PulseShape: non-finite amplitude");
    if (kind == Kind::GaussianTrain) {
      if (!(sigma_t > 0.0)) throw std::invalid_argument("PulseShape: sigma_t must be positive");
      if (!(period > 0.0)) throw std::invalid_argument("PulseShape: period must be positive");
      if (n_pulses < 1) throw std::invalid_argument("PulseShape: need at least one pulse");
    }
  }
};

/// All physical parameters of the driven photonic molecule, rotating frame at
/// the laser frequency. delta_j = omega_j - omega_L in units of kappa_ref.
///
/// Sign note: with this Hamiltonian (H = sum_j delta_j n_j + u_j adag adag a a
/// + ...), a self-focusing Kerr medium such as silicon has u_j < 0; the
/// interference optimum pairs delta and u of opposite signs. Observables are
/// invariant under the simultaneous flip (delta, u) -> (-delta, -u).
struct SystemParams {
  double delta1 = 0.0, delta2 = 0.0;
  double u1 = 0.0, u2 = 0.0;
  double j_coupling = 0.0;
  double kappa1 = 1.0, kappa2 = 1.0;
  PulseShape drive;

  void validate() const {
    auto fin = [](double x) { return std::isfinite(x); };
    if (!(fin(delta1) && fin(delta2) && fin(u1) && fin(u2) && fin(j_coupling) && fin(kappa1) &&
          fin(kappa2)))
      throw std::invalid_argument("SystemParams: non-finite parameter");
    if (!(kappa1 > 0.0 && kappa2 > 0.0))
      throw std::invalid_argument("SystemParams: loss rates must be positive");
    drive.validate();
  }
};

}  // namespace upb

#endif
