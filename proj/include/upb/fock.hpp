#ifndef UPB_FOCK_HPP
#define UPB_FOCK_HPP

#include <complex>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace upb {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx>;  // column-major, deterministic layout

/// Truncated two-mode Fock space. "n_levels = N" means occupations 0..N-1
/// (local dimension N). Flat index convention: idx = n1 * n2_levels + n2.
class HilbertSpace {
 public:
  HilbertSpace(int n1_levels, int n2_levels) : n1_(n1_levels), n2_(n2_levels) {
    if (n1_levels < 2 || n2_levels < 2)
      throw std::invalid_argument("HilbertSpace: need at least 2 levels per mode");
    dim_ = n1_ * n2_;
  }

  int n1_levels() const { return n1_; }
  int n2_levels() const { return n2_; }
  int dim() const { return dim_; }
  int levels(int cavity) const { return cavity == 1 ? n1_ : n2_; }

  int encode(int n1, int n2) const {
    if (n1 < 0 || n1 >= n1_ || n2 < 0 || n2 >= n2_)
      throw std::out_of_range("HilbertSpace::encode: occupation out of range");
    return n1 * n2_ + n2;
  }
  std::pair<int, int> decode(int idx) const {
    if (idx < 0 || idx >= dim_) throw std::out_of_range("HilbertSpace::decode: index out of range");
    return {idx / n2_, idx % n2_};
  }

  bool operator==(const HilbertSpace& o) const { return n1_ == o.n1_ && n2_ == o.n2_; }
  bool operator!=(const HilbertSpace& o) const { return !(*this == o); }

 private:
  int n1_, n2_, dim_;
};

inline HilbertSpace build_space(int n1_levels, int n2_levels) { return HilbertSpace(n1_levels, n2_levels); }

/// Sparse operator on the joint space. Value semantics; the space descriptor
/// travels with the matrix so mixed-space arithmetic can be rejected.
class QOperator {
 public:
  QOperator(const HilbertSpace& space, SpMat mat) : space_(space), mat_(std::move(mat)) {
    if (mat_.rows() != space_.dim() || mat_.cols() != space_.dim())
      throw std::invalid_argument("QOperator: matrix size does not match space");
    mat_.makeCompressed();
  }

  static QOperator zero(const HilbertSpace& space) { return QOperator(space, SpMat(space.dim(), space.dim())); }
  static QOperator identity(const HilbertSpace& space) {
    SpMat m(space.dim(), space.dim());
    m.setIdentity();
    return QOperator(space, std::move(m));
  }

  const HilbertSpace& space() const { return space_; }
  const SpMat& matrix() const { return mat_; }
  int dim() const { return space_.dim(); }
  long nonzeros() const { return mat_.nonZeros(); }

  QOperator dagger() const { return QOperator(space_, SpMat(mat_.adjoint())); }

  QOperator operator+(const QOperator& o) const { check(o); return QOperator(space_, SpMat(mat_ + o.mat_)); }
  QOperator operator-(const QOperator& o) const { check(o); return QOperator(space_, SpMat(mat_ - o.mat_)); }
  QOperator operator*(const QOperator& o) const { check(o); return QOperator(space_, SpMat(mat_ * o.mat_)); }
  QOperator operator*(cplx s) const { return QOperator(space_, SpMat(s * mat_)); }
  friend QOperator operator*(cplx s, const QOperator& op) { return op * s; }

  cplx element(int row, int col) const { return mat_.coeff(row, col); }

 private:
  void check(const QOperator& o) const {
    if (space_ != o.space_) throw std::invalid_argument("QOperator: operand spaces differ");
  }
  HilbertSpace space_;
  SpMat mat_;
};

inline QOperator commutator(const QOperator& a, const QOperator& b) { return a * b - b * a; }

/// Annihilation operator of the chosen cavity: <n-1|a|n> = sqrt(n), identity on the other mode.
QOperator annihilation(const HilbertSpace& space, int cavity);
/// n_j = a_j^dag a_j, built diagonally.
QOperator number_op(const HilbertSpace& space, int cavity);
/// Kerr quartic a^dag a^dag a a of one cavity, diagonal n(n-1).
QOperator kerr_op(const HilbertSpace& space, int cavity);

}  // namespace upb

#endif
