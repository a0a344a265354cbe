#ifndef UPB_FUSED_CSR_HPP
#define UPB_FUSED_CSR_HPP

#include <vector>

#include "upb/fock.hpp"

namespace upb {

/// One-pass y -> (C + f*D) y over the union sparsity pattern of C and D,
/// with f a real scalar per call. Hot loop of every propagation here.
class FusedCsr {
 public:
  FusedCsr() = default;
  FusedCsr(const SpMat& c, const SpMat& d) { build(c, d); }

  void build(const SpMat& c, const SpMat& d);

  int rows() const { return rows_; }
  bool has_drive_part() const { return drive_nonzero_; }

  void apply(double f, const Eigen::VectorXcd& y, Eigen::VectorXcd& out) const {
    const cplx* yv = y.data();
    cplx* ov = out.data();
    if (drive_nonzero_ && f != 0.0) {
      for (int r = 0; r < rows_; ++r) {
        double ar = 0.0, ai = 0.0;
        const int end = ptr_[size_t(r) + 1];
        for (int k = ptr_[size_t(r)]; k < end; ++k) {
          const double mr = vc_re_[size_t(k)] + f * vd_re_[size_t(k)];
          const double mi = vc_im_[size_t(k)] + f * vd_im_[size_t(k)];
          const cplx yk = yv[col_[size_t(k)]];
          ar += mr * yk.real() - mi * yk.imag();
          ai += mr * yk.imag() + mi * yk.real();
        }
        ov[r] = cplx(ar, ai);
      }
    } else {
      for (int r = 0; r < rows_; ++r) {
        double ar = 0.0, ai = 0.0;
        const int end = ptr_[size_t(r) + 1];
        for (int k = ptr_[size_t(r)]; k < end; ++k) {
          const cplx yk = yv[col_[size_t(k)]];
          ar += vc_re_[size_t(k)] * yk.real() - vc_im_[size_t(k)] * yk.imag();
          ai += vc_re_[size_t(k)] * yk.imag() + vc_im_[size_t(k)] * yk.real();
        }
        ov[r] = cplx(ar, ai);
      }
    }
  }

 private:
  int rows_ = 0;
  bool drive_nonzero_ = false;
  std::vector<int> ptr_, col_;
  std::vector<double> vc_re_, vc_im_, vd_re_, vd_im_;
};

}  // namespace upb

#endif
