#include "upb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseLU>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "upb/fused_csr.hpp"
#include "upb/rk45.hpp"

namespace upb {

void CorrelationResult::validate() const {
  if (grid.size() != values.size() || grid.size() != errors.size())
    throw std::invalid_argument("CorrelationResult: array lengths differ");
  for (size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw std::invalid_argument("CorrelationResult: grid not strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("CorrelationResult: non-finite value");
}

SpMat superop_left(const SpMat& a) {
  const int d = int(a.rows());
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(size_t(a.nonZeros()) * size_t(d));
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      for (int c = 0; c < d; ++c)
        trip.emplace_back(c * d + int(it.row()), c * d + int(it.col()), it.value());
  SpMat m(d * d, d * d);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat superop_right(const SpMat& b) {
  const int d = int(b.rows());
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(size_t(b.nonZeros()) * size_t(d));
  // (rho B)(r,c) = sum_cp rho(r,cp) B(cp,c)
  for (int k = 0; k < b.outerSize(); ++k)
    for (SpMat::InnerIterator it(b, k); it; ++it)
      for (int r = 0; r < d; ++r)
        trip.emplace_back(int(it.col()) * d + r, int(it.row()) * d + r, it.value());
  SpMat m(d * d, d * d);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat superop_sandwich(const SpMat& a, const SpMat& b) {
  const int d = int(a.rows());
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(size_t(a.nonZeros()) * size_t(b.nonZeros()));
  // (A rho B)(r,c) = sum_{rp,cp} A(r,rp) rho(rp,cp) B(cp,c)
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SpMat::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SpMat::InnerIterator ib(b, kb); ib; ++ib)
          trip.emplace_back(int(ib.col()) * d + int(ia.row()), int(ib.row()) * d + int(ia.col()),
                            ia.value() * ib.value());
  SpMat m(d * d, d * d);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

QOperator build_hamiltonian(const SystemParams& params, const HilbertSpace& space, double t) {
  params.validate();
  const QOperator a1 = annihilation(space, 1);
  const QOperator a2 = annihilation(space, 2);
  QOperator h = cplx(params.delta1) * number_op(space, 1) + cplx(params.delta2) * number_op(space, 2) +
                cplx(params.u1) * kerr_op(space, 1) + cplx(params.u2) * kerr_op(space, 2) +
                cplx(params.j_coupling) * (a1.dagger() * a2 + a2.dagger() * a1);
  const double f = params.drive.at(t);
  if (f != 0.0) h = h + cplx(f) * (a1.dagger() + a1);
  return h;
}

Liouvillian::Liouvillian(const SystemParams& params, const HilbertSpace& space)
    : space_(space), params_(params) {
  params_.validate();
  SystemParams undriven = params_;
  undriven.drive = PulseShape::constant(0.0);
  const SpMat h0 = build_hamiltonian(undriven, space, 0.0).matrix();
  const SpMat a1 = annihilation(space, 1).matrix();
  const SpMat a2 = annihilation(space, 2).matrix();
  const SpMat n1 = number_op(space, 1).matrix();
  const SpMat n2 = number_op(space, 2).matrix();

  const cplx mi(0.0, -1.0);
  L0_ = SpMat(mi * (superop_left(h0) - superop_right(h0)));
  L0_ += params_.kappa1 * (superop_sandwich(a1, SpMat(a1.adjoint())) -
                           0.5 * (superop_left(n1) + superop_right(n1)));
  L0_ += params_.kappa2 * (superop_sandwich(a2, SpMat(a2.adjoint())) -
                           0.5 * (superop_left(n2) + superop_right(n2)));
  const SpMat x = SpMat(a1 + SpMat(a1.adjoint()));
  LX_ = SpMat(mi * (superop_left(x) - superop_right(x)));
  L0_.makeCompressed();
  LX_.makeCompressed();
  fused_.build(L0_, LX_);
}

void Liouvillian::apply(double t, const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const {
  fused_.apply(params_.drive.at(t), v, out);
}

double Liouvillian::frob_norm(double f) const {
  const SpMat m = matrix(f);
  double acc = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) acc += std::norm(it.value());
  return std::sqrt(acc);
}

Eigen::MatrixXcd liouvillian_apply(const SystemParams& params, const DensityMatrix& rho, double t) {
  params.validate();
  const HilbertSpace& space = rho.space();
  const SpMat h = build_hamiltonian(params, space, t).matrix();
  const SpMat a1 = annihilation(space, 1).matrix();
  const SpMat a2 = annihilation(space, 2).matrix();
  const Eigen::MatrixXcd& r = rho.matrix();
  const cplx mi(0.0, -1.0);
  Eigen::MatrixXcd out = mi * (h * r - r * h);
  auto dissipate = [&](const SpMat& a, double kappa) {
    const Eigen::MatrixXcd ar = a * r;
    const SpMat n = SpMat(SpMat(a.adjoint()) * a);
    out += kappa * (ar * a.adjoint().eval() - 0.5 * (n * r + r * n));
  };
  dissipate(a1, params.kappa1);
  dissipate(a2, params.kappa2);
  return out;
}

namespace {

Eigen::VectorXcd vec_of(const Eigen::MatrixXcd& rho) {
  return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}
Eigen::MatrixXcd mat_of(const Eigen::VectorXcd& v, int d) {
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

// diag(op) picked out of a vectorized density matrix: sum_k w_k rho(k,k)
double diag_weighted(const Eigen::VectorXcd& v, const Eigen::VectorXd& w, int d) {
  double acc = 0.0;
  for (int k = 0; k < d; ++k) acc += w(k) * v(k * d + k).real();
  return acc;
}

Eigen::VectorXd number_diag(const HilbertSpace& space, int cavity) {
  Eigen::VectorXd w(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    auto [m1, m2] = space.decode(i);
    w(i) = (cavity == 1) ? m1 : m2;
  }
  return w;
}

Eigen::VectorXd pair_diag(const HilbertSpace& space, int cavity) {
  Eigen::VectorXd w(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    auto [m1, m2] = space.decode(i);
    const double n = (cavity == 1) ? m1 : m2;
    w(i) = n * (n - 1.0);
  }
  return w;
}

struct LiouvilleRhs {
  const Liouvillian* gen;
  void operator()(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt) const {
    gen->apply(t, y, dydt);
  }
};

}  // namespace

DensityMatrix steady_state(const SystemParams& params, const HilbertSpace& space) {
  params.validate();
  if (!params.drive.is_constant())
    throw std::invalid_argument("steady_state: requires a constant drive");
  const Liouvillian gen(params, space);
  const int d = space.dim();
  const int n = d * d;
  const double f = params.drive.amplitude;
  const SpMat L = gen.matrix(f);

  // Row 0 is the equation for rho(0,0); the diagonal rows are linearly
  // dependent (trace preservation), so replace it with tr(rho) = 1.
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(size_t(L.nonZeros()) + size_t(d));
  for (int k = 0; k < L.outerSize(); ++k)
    for (SpMat::InnerIterator it(L, k); it; ++it)
      if (it.row() != 0) trip.emplace_back(int(it.row()), int(it.col()), it.value());
  for (int k = 0; k < d; ++k) trip.emplace_back(0, k * d + k, cplx(1.0));
  SpMat M(n, n);
  M.setFromTriplets(trip.begin(), trip.end());
  M.makeCompressed();

  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  b(0) = 1.0;

  Eigen::VectorXcd x;
  Eigen::SparseLU<SpMat> lu;
  lu.compute(M);
  if (lu.info() == Eigen::Success) {
    x = lu.solve(b);
  } else if (double(n) * double(n) <= 4e6) {
    // dense fallback for small systems
    Eigen::MatrixXcd Md(M);
    x = Md.partialPivLu().solve(b);
  } else {
    throw std::runtime_error("steady_state: sparse factorization failed");
  }
  if (!x.allFinite()) throw std::runtime_error("steady_state: singular or non-unique solution");

  const double resid = (L * x).norm();
  const double scale = gen.frob_norm(f);
  if (!(resid <= 1e-10 * scale)) {
    std::ostringstream os;
    os << "steady_state: residual " << resid << " exceeds 1e-10 * ||L|| = " << 1e-10 * scale;
    throw std::runtime_error(os.str());
  }

  Eigen::MatrixXcd rho = mat_of(x, d);
  rho = 0.5 * (rho + rho.adjoint().eval());  // scrub solver-level asymmetry
  return DensityMatrix(space, std::move(rho));
}

std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const SystemParams& params,
                                  const std::vector<double>& t_grid, const SolverOptions& opts) {
  params.validate();
  if (t_grid.empty()) return {};
  for (size_t i = 0; i + 1 < t_grid.size(); ++i)
    if (!(t_grid[i] < t_grid[i + 1]))
      throw std::invalid_argument("evolve: t_grid must be strictly increasing");
  const HilbertSpace& space = rho0.space();
  const Liouvillian gen(params, space);
  Rk45Options ropt;
  ropt.rtol = opts.rtol;
  ropt.atol = opts.atol;
  Rk45<LiouvilleRhs> stepper(LiouvilleRhs{&gen}, t_grid.front(), vec_of(rho0.matrix()), ropt);

  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  out.push_back(rho0);
  for (size_t i = 1; i < t_grid.size(); ++i) {
    stepper.advance_to(t_grid[i]);
    out.emplace_back(space, mat_of(stepper.y(), space.dim()));
  }
  return out;
}

double g2_zero(const DensityMatrix& rho, int mode) {
  if (mode != 1 && mode != 2) throw std::invalid_argument("g2_zero: mode must be 1 or 2");
  const HilbertSpace& space = rho.space();
  const Eigen::VectorXd nw = number_diag(space, mode);
  const Eigen::VectorXd pw = pair_diag(space, mode);
  double n = 0.0, p = 0.0;
  for (int k = 0; k < space.dim(); ++k) {
    const double d = rho.matrix()(k, k).real();
    n += nw(k) * d;
    p += pw(k) * d;
  }
  if (n < 1e-15) return std::numeric_limits<double>::quiet_NaN();
  return p / (n * n);
}

CorrelationResult g2_tau_cw(const SystemParams& params, const HilbertSpace& space,
                            const std::vector<double>& tau_grid, const SolverOptions& opts) {
  if (tau_grid.empty() || tau_grid.front() != 0.0)
    throw std::invalid_argument("g2_tau_cw: tau grid must start at 0");
  const DensityMatrix rho_ss = steady_state(params, space);
  const Eigen::VectorXd nw = number_diag(space, 1);
  const double n1ss = expectation(rho_ss, number_op(space, 1)).real();
  if (n1ss < 1e-15) throw std::runtime_error("g2_tau_cw: steady state has no cavity-1 occupation");

  const SpMat a1 = annihilation(space, 1).matrix();
  Eigen::MatrixXcd b = (a1 * rho_ss.matrix()) * a1.adjoint().eval();
  b /= n1ss;  // propagate the trace-normalized jumped state

  const Liouvillian gen(params, space);
  Rk45Options ropt;
  ropt.rtol = opts.rtol;
  ropt.atol = opts.atol;
  Rk45<LiouvilleRhs> stepper(LiouvilleRhs{&gen}, 0.0, vec_of(b), ropt);

  CorrelationResult res;
  res.grid = tau_grid;
  res.values.resize(tau_grid.size());
  res.errors.assign(tau_grid.size(), 0.0);
  res.values[0] = diag_weighted(stepper.y(), nw, space.dim()) / n1ss;
  for (size_t i = 1; i < tau_grid.size(); ++i) {
    stepper.advance_to(tau_grid[i]);
    res.values[i] = diag_weighted(stepper.y(), nw, space.dim()) / n1ss;
  }
  res.meta.emplace_back("n1_ss", std::to_string(n1ss));
  return res;
}

std::vector<DriveSweepRow> sweep_drive(const SystemParams& params, const HilbertSpace& space,
                                       const std::vector<double>& f_values,
                                       const SolverOptions& opts) {
  std::vector<DriveSweepRow> rows(f_values.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, opts.threads))
#endif
  for (long i = 0; i < long(f_values.size()); ++i) {
    DriveSweepRow row;
    row.f = f_values[size_t(i)];
    try {
      SystemParams p = params;
      p.drive = PulseShape::constant(row.f);
      const DensityMatrix rho = steady_state(p, space);
      row.n1 = expectation(rho, number_op(space, 1)).real();
      row.n2 = expectation(rho, number_op(space, 2)).real();
      row.g2 = g2_zero(rho, 1);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows[size_t(i)] = row;
  }
  return rows;
}

TwoTimeG2 two_time_g2_pulsed(const SystemParams& params, const HilbertSpace& space, double t,
                             double t_prime, const SolverOptions& opts) {
  if (!(t_prime >= t) || t < 0.0)
    throw std::invalid_argument("two_time_g2_pulsed: need 0 <= t <= t_prime");
  const Liouvillian gen(params, space);
  const int d = space.dim();
  Rk45Options ropt;
  ropt.rtol = opts.rtol;
  ropt.atol = opts.atol;

  Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(d, d);
  rho0(0, 0) = 1.0;
  Rk45<LiouvilleRhs> rho_stepper(LiouvilleRhs{&gen}, 0.0, vec_of(rho0), ropt);
  rho_stepper.advance_to(t);

  const Eigen::VectorXd nw = number_diag(space, 1);
  const double n1_t = diag_weighted(rho_stepper.y(), nw, d);

  const SpMat a1 = annihilation(space, 1).matrix();
  const Eigen::MatrixXcd rho_t = mat_of(rho_stepper.y(), d);
  const Eigen::MatrixXcd b = (a1 * rho_t) * a1.adjoint().eval();

  Rk45<LiouvilleRhs> b_stepper(LiouvilleRhs{&gen}, t, vec_of(b), ropt);
  b_stepper.advance_to(t_prime);
  rho_stepper.advance_to(t_prime);
  const double n1_tp = diag_weighted(rho_stepper.y(), nw, d);

  TwoTimeG2 res;
  res.big_g2 = diag_weighted(b_stepper.y(), nw, d);
  if (n1_t < 1e-15 || n1_tp < 1e-15) {
    res.defined = false;
    res.g2 = std::numeric_limits<double>::quiet_NaN();
  } else {
    res.defined = true;
    res.g2 = res.big_g2 / (n1_t * n1_tp);
  }
  return res;
}

PulseDiagnostics pulse_diagnostics(const SystemParams& params, const HilbertSpace& space,
                                   double horizon, int n_samples, const SolverOptions& opts,
                                   bool with_physicality) {
  if (n_samples < 2 || !(horizon > 0.0))
    throw std::invalid_argument("pulse_diagnostics: bad sampling request");
  const Liouvillian gen(params, space);
  const int d = space.dim();
  const Eigen::VectorXd nw1 = number_diag(space, 1);
  const Eigen::VectorXd nw2 = number_diag(space, 2);
  const Eigen::VectorXd pw = pair_diag(space, 1);
  Rk45Options ropt;
  ropt.rtol = opts.rtol;
  ropt.atol = opts.atol;
  Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(d, d);
  rho0(0, 0) = 1.0;
  Rk45<LiouvilleRhs> stepper(LiouvilleRhs{&gen}, 0.0, vec_of(rho0), ropt);

  PulseDiagnostics res;
  res.min_eigenvalue = 0.0;
  res.t.resize(size_t(n_samples));
  res.n1.resize(size_t(n_samples));
  res.n2.resize(size_t(n_samples));
  res.g2tt.resize(size_t(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const double ti = horizon * double(i) / double(n_samples - 1);
    if (i > 0) stepper.advance_to(ti);
    res.t[size_t(i)] = ti;
    const double n1 = diag_weighted(stepper.y(), nw1, d);
    const double p = diag_weighted(stepper.y(), pw, d);
    res.n1[size_t(i)] = n1;
    res.n2[size_t(i)] = diag_weighted(stepper.y(), nw2, d);
    res.g2tt[size_t(i)] =
        (n1 < 1e-15) ? std::numeric_limits<double>::quiet_NaN() : p / (n1 * n1);
    if (with_physicality) {
      DensityMatrix rho(space, mat_of(stepper.y(), d));
      const PhysicalityReport rep = rho.physicality();
      res.max_trace_error = std::max(res.max_trace_error, rep.trace_error);
      res.max_herm_defect = std::max(res.max_herm_defect, rep.herm_defect);
      res.min_eigenvalue = std::min(res.min_eigenvalue, rep.min_eigenvalue);
    }
  }
  return res;
}

TwoTimeGrid two_time_grid(const SystemParams& params, const HilbertSpace& space, double t1,
                          double t2, int n_points, const SolverOptions& opts) {
  if (!(t2 > t1) || t1 < 0.0 || n_points < 3)
    throw std::invalid_argument("two_time_grid: bad window");
  const Liouvillian gen(params, space);
  const int d = space.dim();
  const Eigen::VectorXd nw = number_diag(space, 1);
  const SpMat a1 = annihilation(space, 1).matrix();
  Rk45Options ropt;
  ropt.rtol = opts.rtol;
  ropt.atol = opts.atol;

  TwoTimeGrid grid;
  grid.t.resize(size_t(n_points));
  grid.n1.resize(size_t(n_points));
  grid.big_g2.setZero(n_points, n_points);
  for (int i = 0; i < n_points; ++i)
    grid.t[size_t(i)] = t1 + (t2 - t1) * double(i) / double(n_points - 1);

  // one pass over [0, t2] storing the state at every grid time
  std::vector<Eigen::MatrixXcd> rho_at(static_cast<size_t>(n_points));
  {
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(d, d);
    rho0(0, 0) = 1.0;
    Rk45<LiouvilleRhs> stepper(LiouvilleRhs{&gen}, 0.0, vec_of(rho0), ropt);
    for (int i = 0; i < n_points; ++i) {
      stepper.advance_to(grid.t[size_t(i)]);
      rho_at[size_t(i)] = mat_of(stepper.y(), d);
      grid.n1[size_t(i)] = diag_weighted(stepper.y(), nw, d);
    }
  }

  // independent forward propagation of a1 rho(t_i) a1dag per grid row
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, opts.threads))
#endif
  for (int i = 0; i < n_points; ++i) {
    const Eigen::MatrixXcd b = (a1 * rho_at[size_t(i)]) * a1.adjoint().eval();
    Rk45<LiouvilleRhs> stepper(LiouvilleRhs{&gen}, grid.t[size_t(i)], vec_of(b), ropt);
    grid.big_g2(i, i) = diag_weighted(stepper.y(), nw, d);
    for (int j = i + 1; j < n_points; ++j) {
      stepper.advance_to(grid.t[size_t(j)]);
      const double val = diag_weighted(stepper.y(), nw, d);
      grid.big_g2(i, j) = val;
      grid.big_g2(j, i) = val;
    }
  }
  return grid;
}

namespace {

// 1D trapezoid nodes/weights for [a,b] inside a uniform grid, with linear
// interpolation at the fractional edges. Returns pairs (node position within
// grid as fractional index, weight).
struct ClippedAxis {
  std::vector<double> pos;  // fractional grid indices
  std::vector<double> w;
};

ClippedAxis clip_axis(const std::vector<double>& t, double a, double b) {
  const double lo = t.front(), hi = t.back();
  a = std::max(a, lo);
  b = std::min(b, hi);
  if (!(b > a)) throw std::invalid_argument("integrate_window: window outside grid");
  const double dt = (hi - lo) / double(t.size() - 1);
  const double fa = (a - lo) / dt, fb = (b - lo) / dt;
  ClippedAxis ax;
  ax.pos.push_back(fa);
  for (int k = int(std::floor(fa)) + 1; k < int(std::ceil(fb)); ++k)
    if (double(k) > fa && double(k) < fb) ax.pos.push_back(double(k));
  ax.pos.push_back(fb);
  const size_t n = ax.pos.size();
  ax.w.assign(n, 0.0);
  for (size_t k = 0; k + 1 < n; ++k) {
    const double seg = (ax.pos[k + 1] - ax.pos[k]) * dt;
    ax.w[k] += 0.5 * seg;
    ax.w[k + 1] += 0.5 * seg;
  }
  return ax;
}

double interp1(const std::vector<double>& v, double fpos) {
  const int k = std::min(int(v.size()) - 2, std::max(0, int(std::floor(fpos))));
  const double f = fpos - double(k);
  return v[size_t(k)] * (1.0 - f) + v[size_t(k) + 1] * f;
}

double interp2(const Eigen::MatrixXd& m, double fi, double fj) {
  const int i = std::min(int(m.rows()) - 2, std::max(0, int(std::floor(fi))));
  const int j = std::min(int(m.cols()) - 2, std::max(0, int(std::floor(fj))));
  const double a = fi - double(i), b = fj - double(j);
  return m(i, j) * (1 - a) * (1 - b) + m(i + 1, j) * a * (1 - b) + m(i, j + 1) * (1 - a) * b +
         m(i + 1, j + 1) * a * b;
}

}  // namespace

WindowIntegrals integrate_window(const TwoTimeGrid& grid, double w1, double w2) {
  const ClippedAxis ax = clip_axis(grid.t, w1, w2);
  WindowIntegrals out;
  double flux = 0.0;
  for (size_t k = 0; k < ax.pos.size(); ++k) flux += ax.w[k] * interp1(grid.n1, ax.pos[k]);
  out.flux_integral = flux * flux;
  double acc = 0.0;
  for (size_t i = 0; i < ax.pos.size(); ++i)
    for (size_t j = 0; j < ax.pos.size(); ++j)
      acc += ax.w[i] * ax.w[j] * interp2(grid.big_g2, ax.pos[i], ax.pos[j]);
  out.g2_integral = acc;
  return out;
}

double filtered_g2_tiled(const TwoTimeGrid& grid, double w1, double w2, double delta_t) {
  if (!(delta_t > 0.0) || delta_t > (w2 - w1) * (1.0 + 1e-12))
    throw std::invalid_argument("filtered_g2_tiled: need 0 < delta_t <= window width");
  const long n_w = std::max<long>(1, long((w2 - w1) / delta_t + 1e-9));
  double num = 0.0, den = 0.0;
  for (long w = 0; w < n_w; ++w) {
    const WindowIntegrals wi =
        integrate_window(grid, w1 + double(w) * delta_t, w1 + double(w + 1) * delta_t);
    num += wi.g2_integral;
    den += wi.flux_integral;
  }
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

FilteredG2 filtered_g2(const SystemParams& params, const HilbertSpace& space, double t1, double t2,
                       int n_points, const SolverOptions& opts) {
  if (n_points < 9) throw std::invalid_argument("filtered_g2: grid too coarse");
  const TwoTimeGrid fine = two_time_grid(params, space, t1, t2, n_points, opts);
  const TwoTimeGrid coarse = two_time_grid(params, space, t1, t2, (n_points + 1) / 2, opts);
  const WindowIntegrals wf = integrate_window(fine, t1, t2);
  const WindowIntegrals wc = integrate_window(coarse, t1, t2);
  FilteredG2 res;
  if (wf.flux_integral <= 0.0) {
    res.defined = false;
    res.value = res.coarse_value = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  res.defined = true;
  res.value = wf.g2_integral / wf.flux_integral;
  res.coarse_value = wc.g2_integral / wc.flux_integral;
  return res;
}

}  // namespace upb
