#ifndef UPB_DYNAMICS_HPP
#define UPB_DYNAMICS_HPP

#include <string>
#include <utility>
#include <vector>

#include "upb/fock.hpp"
#include "upb/fused_csr.hpp"
#include "upb/params.hpp"
#include "upb/states.hpp"

namespace upb {

struct SolverOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  int threads = 1;  // independent-line parallelism; results identical for any value
};

/// Sampled correlation data with optional statistical errors (zero for the
/// deterministic solvers writing into it).
struct CorrelationResult {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> errors;
  std::vector<std::pair<std::string, std::string>> meta;
  void validate() const;
};

// Superoperator builders over column-major vectorization v[c*dim + r] = rho(r, c).
SpMat superop_left(const SpMat& a);                      // vec(A rho)
SpMat superop_right(const SpMat& b);                     // vec(rho B)
SpMat superop_sandwich(const SpMat& a, const SpMat& b);  // vec(A rho B)

/// Lindblad generator split into a drive-independent part and the drive
/// structure: L(t) = L0 + F(t) * LX.
class Liouvillian {
 public:
  Liouvillian(const SystemParams& params, const HilbertSpace& space);

  const HilbertSpace& space() const { return space_; }
  const SystemParams& params() const { return params_; }
  int vec_dim() const { return space_.dim() * space_.dim(); }

  void apply(double t, const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const;
  SpMat matrix(double f) const { return SpMat(L0_ + cplx(f) * LX_); }
  double frob_norm(double f) const;
  double drive_at(double t) const { return params_.drive.at(t); }
  bool constant_drive() const { return params_.drive.is_constant(); }

 private:
  HilbertSpace space_;
  SystemParams params_;
  SpMat L0_, LX_;
  FusedCsr fused_;
};

/// Rotating-frame Hamiltonian at time t (real drive envelope).
QOperator build_hamiltonian(const SystemParams& params, const HilbertSpace& space, double t);

/// Right-hand side of the master equation, returned as a dense matrix.
Eigen::MatrixXcd liouvillian_apply(const SystemParams& params, const DensityMatrix& rho, double t);

/// Steady state of the constant-drive Liouvillian via direct sparse solve with
/// the trace condition replacing the redundant row. Falls back to a dense
/// solve for small systems if the sparse factorization fails.
DensityMatrix steady_state(const SystemParams& params, const HilbertSpace& space);

/// Adaptive propagation of rho through the given strictly increasing grid;
/// result[i] is the state at t_grid[i], result[0] = rho0.
std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const SystemParams& params,
                                  const std::vector<double>& t_grid, const SolverOptions& opts = {});

/// <adag adag a a>/<adag a>^2; NaN when the occupation is below 1e-15.
double g2_zero(const DensityMatrix& rho, int mode);

/// Quantum-regression two-time correlation of cavity 1 under cw drive,
/// normalized to the squared steady-state occupation.
CorrelationResult g2_tau_cw(const SystemParams& params, const HilbertSpace& space,
                            const std::vector<double>& tau_grid, const SolverOptions& opts = {});

struct DriveSweepRow {
  double f = 0.0, n1 = 0.0, n2 = 0.0, g2 = 0.0;
  bool ok = false;
  std::string error;
};
std::vector<DriveSweepRow> sweep_drive(const SystemParams& params, const HilbertSpace& space,
                                       const std::vector<double>& f_values,
                                       const SolverOptions& opts = {});

struct TwoTimeG2 {
  double big_g2 = 0.0;  // un-normalized
  double g2 = 0.0;
  bool defined = false;
};
/// G2(t,t') = tr[n1 U_{t->t'}(a1 rho(t) a1dag)], g2 = G2/(n1(t) n1(t')),
/// starting from vacuum at time 0. Requires t <= t'.
TwoTimeG2 two_time_g2_pulsed(const SystemParams& params, const HilbertSpace& space, double t,
                             double t_prime, const SolverOptions& opts = {});

/// One propagation pass from vacuum: occupation and equal-time g2 curves.
struct PulseDiagnostics {
  std::vector<double> t, n1, n2, g2tt;  // g2tt NaN where occupation vanishes
  double max_trace_error = 0.0, max_herm_defect = 0.0, min_eigenvalue = 0.0;
};
PulseDiagnostics pulse_diagnostics(const SystemParams& params, const HilbertSpace& space,
                                   double horizon, int n_samples, const SolverOptions& opts = {},
                                   bool with_physicality = false);

/// Symmetric G2(t_i, t_j) over a uniform grid spanning [t1, t2] plus the
/// occupation n1(t_i); the workhorse behind the filtered-g2 statistics.
struct TwoTimeGrid {
  std::vector<double> t;
  std::vector<double> n1;
  Eigen::MatrixXd big_g2;
};
TwoTimeGrid two_time_grid(const SystemParams& params, const HilbertSpace& space, double t1,
                          double t2, int n_points, const SolverOptions& opts = {});

/// Window statistic over [w1, w2] within the grid (bilinear interpolation at
/// fractional edges): { integral of G2, integral of n1 n1 }.
struct WindowIntegrals {
  double g2_integral = 0.0;
  double flux_integral = 0.0;  // (int n1 dt)^2
};
WindowIntegrals integrate_window(const TwoTimeGrid& grid, double w1, double w2);

struct FilteredG2 {
  double value = 0.0;
  double coarse_value = 0.0;  // same statistic at half grid resolution
  bool defined = false;
};
/// Time-window photon statistic: double integral of G2 over the window square
/// divided by the squared occupation integral.
FilteredG2 filtered_g2(const SystemParams& params, const HilbertSpace& space, double t1, double t2,
                       int n_points = 129, const SolverOptions& opts = {});

/// Expectation of the sliding-sub-window pair estimator: sub-windows of width
/// delta_t tile [w1, w2] from the left edge; sum of per-window G2 integrals
/// over the sum of squared per-window occupation integrals.
double filtered_g2_tiled(const TwoTimeGrid& grid, double w1, double w2, double delta_t);

}  // namespace upb

#endif
