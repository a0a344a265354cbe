// Test-side oracles, kept independent of the library implementation paths:
// dense brute-force steady state via explicit loops, mean-field linear
// response, and synthetic event-stream generators for counting calibration.
#ifndef UPB_TESTS_ORACLES_HPP
#define UPB_TESTS_ORACLES_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "upb/params.hpp"
#include "upb/rng.hpp"
#include "upb/trajectories.hpp"

namespace oracle {

using cplx = std::complex<double>;

/// Dense two-mode Hamiltonian from ladder formulas written out by hand.
inline Eigen::MatrixXcd dense_hamiltonian(int n1l, int n2l, double d1, double d2, double u1,
                                          double u2, double jc, double f) {
  const int dim = n1l * n2l;
  auto idx = [&](int a, int b) { return a * n2l + b; };
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int a = 0; a < n1l; ++a)
    for (int b = 0; b < n2l; ++b) {
      h(idx(a, b), idx(a, b)) = d1 * a + d2 * b + u1 * a * (a - 1.0) + u2 * b * (b - 1.0);
      // J (a1dag a2 + a2dag a1)
      if (a + 1 < n1l && b - 1 >= 0)
        h(idx(a + 1, b - 1), idx(a, b)) += jc * std::sqrt(double(a + 1) * double(b));
      if (a - 1 >= 0 && b + 1 < n2l)
        h(idx(a - 1, b + 1), idx(a, b)) += jc * std::sqrt(double(a) * double(b + 1));
      // F (a1dag + a1)
      if (a + 1 < n1l) h(idx(a + 1, b), idx(a, b)) += f * std::sqrt(double(a + 1));
      if (a - 1 >= 0) h(idx(a - 1, b), idx(a, b)) += f * std::sqrt(double(a));
    }
  return h;
}

/// Dense vectorized Lindblad generator, column-major vec: v[c*dim+r] = rho(r,c).
inline Eigen::MatrixXcd dense_liouvillian(int n1l, int n2l, double d1, double d2, double u1,
                                          double u2, double jc, double f, double k1, double k2) {
  const int dim = n1l * n2l;
  const Eigen::MatrixXcd h = dense_hamiltonian(n1l, n2l, d1, d2, u1, u2, jc, f);
  Eigen::MatrixXcd a1 = Eigen::MatrixXcd::Zero(dim, dim), a2 = Eigen::MatrixXcd::Zero(dim, dim);
  auto idx = [&](int a, int b) { return a * n2l + b; };
  for (int a = 0; a < n1l; ++a)
    for (int b = 0; b < n2l; ++b) {
      if (a > 0) a1(idx(a - 1, b), idx(a, b)) = std::sqrt(double(a));
      if (b > 0) a2(idx(a, b - 1), idx(a, b)) = std::sqrt(double(b));
    }
  const int n = dim * dim;
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(n, n);
  const cplx mi(0.0, -1.0);
  auto addL = [&](const Eigen::MatrixXcd& m, cplx s) {  // vec(M rho)
    for (int c = 0; c < dim; ++c)
      for (int r = 0; r < dim; ++r)
        for (int rp = 0; rp < dim; ++rp) L(c * dim + r, c * dim + rp) += s * m(r, rp);
  };
  auto addR = [&](const Eigen::MatrixXcd& m, cplx s) {  // vec(rho M)
    for (int c = 0; c < dim; ++c)
      for (int cp = 0; cp < dim; ++cp)
        for (int r = 0; r < dim; ++r) L(c * dim + r, cp * dim + r) += s * m(cp, c);
  };
  auto addS = [&](const Eigen::MatrixXcd& a, cplx s) {  // vec(A rho Adag)
    const Eigen::MatrixXcd ad = a.adjoint();
    for (int r = 0; r < dim; ++r)
      for (int rp = 0; rp < dim; ++rp)
        for (int c = 0; c < dim; ++c)
          for (int cp = 0; cp < dim; ++cp)
            if (a(r, rp) != cplx(0.0) && ad(cp, c) != cplx(0.0))
              L(c * dim + r, cp * dim + rp) += s * a(r, rp) * ad(cp, c);
  };
  addL(h, mi);
  addR(h, -mi);
  const Eigen::MatrixXcd nn1 = a1.adjoint() * a1, nn2 = a2.adjoint() * a2;
  addS(a1, k1);
  addL(nn1, -0.5 * k1);
  addR(nn1, -0.5 * k1);
  addS(a2, k2);
  addL(nn2, -0.5 * k2);
  addR(nn2, -0.5 * k2);
  return L;
}

struct DenseSteadyState {
  Eigen::MatrixXcd rho;
  double n1, n2, g2;
};

/// Dense steady state with the trace condition replacing the first row.
inline DenseSteadyState dense_steady_state(int n1l, int n2l, double d1, double d2, double u1,
                                           double u2, double jc, double f, double k1, double k2) {
  const int dim = n1l * n2l;
  const int n = dim * dim;
  Eigen::MatrixXcd L = dense_liouvillian(n1l, n2l, d1, d2, u1, u2, jc, f, k1, k2);
  for (int c = 0; c < n; ++c) L(0, c) = 0.0;
  for (int k = 0; k < dim; ++k) L(0, k * dim + k) = 1.0;
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  b(0) = 1.0;
  const Eigen::VectorXcd x = L.partialPivLu().solve(b);
  DenseSteadyState out;
  out.rho = Eigen::Map<const Eigen::MatrixXcd>(x.data(), dim, dim);
  auto idx = [&](int a, int bq) { return a * n2l + bq; };
  out.n1 = out.n2 = 0.0;
  double pair1 = 0.0;
  for (int a = 0; a < n1l; ++a)
    for (int bq = 0; bq < n2l; ++bq) {
      const double p = out.rho(idx(a, bq), idx(a, bq)).real();
      out.n1 += a * p;
      out.n2 += bq * p;
      pair1 += a * (a - 1.0) * p;
    }
  out.g2 = pair1 / (out.n1 * out.n1);
  return out;
}

/// Mean-field linear response of the driven pair (exact for u = 0).
struct LinearResponse {
  cplx alpha1, alpha2;
  double n1() const { return std::norm(alpha1); }
  double n2() const { return std::norm(alpha2); }
};
inline LinearResponse linear_response(double d1, double d2, double jc, double f, double k1,
                                      double k2) {
  const cplx z1(d1, -0.5 * k1), z2(d2, -0.5 * k2);
  LinearResponse r;
  const cplx det = z1 * z2 - cplx(jc * jc);
  r.alpha1 = -f * z2 / det;
  r.alpha2 = f * cplx(jc) / det;
  return r;
}

/// Homogeneous Poisson-process event records on [0, horizon], channel 1.
inline upb::TrajectoryEnsemble poisson_ensemble(long n_records, double rate, double horizon,
                                                uint64_t seed) {
  upb::TrajectoryEnsemble ens;
  ens.n_trajectories = n_records;
  ens.records.resize(size_t(n_records));
  for (long i = 0; i < n_records; ++i) {
    upb::SplitMix64 rng(upb::derive_stream_seed(seed, uint64_t(i)));
    upb::JumpRecord& rec = ens.records[size_t(i)];
    rec.trajectory_id = i;
    double t = 0.0;
    for (;;) {
      t += -std::log(rng.uniform_oo()) / rate;
      if (t >= horizon) break;
      rec.events.push_back({t, 1});
    }
  }
  return ens;
}

/// Exactly one event per record, placed mid-window: perfect single-photon train.
inline upb::TrajectoryEnsemble single_photon_ensemble(long n_records, double t_event) {
  upb::TrajectoryEnsemble ens;
  ens.n_trajectories = n_records;
  ens.records.resize(size_t(n_records));
  for (long i = 0; i < n_records; ++i) {
    ens.records[size_t(i)].trajectory_id = i;
    ens.records[size_t(i)].events.push_back({t_event, 1});
  }
  return ens;
}

}  // namespace oracle

#endif
