#ifndef UPB_STATES_HPP
#define UPB_STATES_HPP

#include <Eigen/Dense>

#include "upb/fock.hpp"

namespace upb {

/// Physicality probes of a density matrix, all evaluated on demand.
struct PhysicalityReport {
  double trace_error;    // |tr(rho) - 1|
  double herm_defect;    // max |rho - rho^dag|
  double min_eigenvalue;
};

/// Mixed state, dense storage (dim <= a few hundred in this project).
class DensityMatrix {
 public:
  DensityMatrix(const HilbertSpace& space, Eigen::MatrixXcd rho)
      : space_(space), rho_(std::move(rho)) {
    if (rho_.rows() != space_.dim() || rho_.cols() != space_.dim())
      throw std::invalid_argument("DensityMatrix: size does not match space");
  }

  static DensityMatrix vacuum(const HilbertSpace& space) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
    m(0, 0) = 1.0;
    return DensityMatrix(space, std::move(m));
  }
  /// |n1,n2><n1,n2|
  static DensityMatrix fock(const HilbertSpace& space, int n1, int n2) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
    m(space.encode(n1, n2), space.encode(n1, n2)) = 1.0;
    return DensityMatrix(space, std::move(m));
  }

  const HilbertSpace& space() const { return space_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Eigen::MatrixXcd& matrix() { return rho_; }
  int dim() const { return space_.dim(); }

  double trace_real() const { return rho_.trace().real(); }

  PhysicalityReport physicality() const {
    PhysicalityReport r;
    r.trace_error = std::abs(rho_.trace() - cplx(1.0));
    r.herm_defect = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho_ + rho_.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    return r;
  }

 private:
  HilbertSpace space_;
  Eigen::MatrixXcd rho_;
};

/// Pure state with a cached squared norm. The trajectory engine keeps norm2
/// in sync; refresh_norm2() recomputes it from the amplitudes.
struct WaveFunction {
  HilbertSpace space;
  Eigen::VectorXcd amplitudes;
  double norm2;

  WaveFunction(const HilbertSpace& s, Eigen::VectorXcd amp)
      : space(s), amplitudes(std::move(amp)), norm2(amplitudes.squaredNorm()) {
    if (amplitudes.size() != space.dim())
      throw std::invalid_argument("WaveFunction: size does not match space");
  }

  static WaveFunction vacuum(const HilbertSpace& s) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(s.dim());
    v(0) = 1.0;
    return WaveFunction(s, std::move(v));
  }
  static WaveFunction fock(const HilbertSpace& s, int n1, int n2) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(s.dim());
    v(s.encode(n1, n2)) = 1.0;
    return WaveFunction(s, std::move(v));
  }

  double refresh_norm2() {
    norm2 = amplitudes.squaredNorm();
    return norm2;
  }
  void normalize() {
    amplitudes /= std::sqrt(refresh_norm2());
    norm2 = 1.0;
  }
};

/// tr[rho O] for mixed states.
cplx expectation(const DensityMatrix& state, const QOperator& op);
/// <psi|O|psi>/<psi|psi> for (possibly unnormalized) pure states.
cplx expectation(const WaveFunction& state, const QOperator& op);

}  // namespace upb

#endif
