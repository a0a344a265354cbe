#include "upb/fused_csr.hpp"

#include <map>

namespace upb {

void FusedCsr::build(const SpMat& c, const SpMat& d) {
  if (c.rows() != c.cols() || d.rows() != d.cols() || c.rows() != d.rows())
    throw std::invalid_argument("FusedCsr: shape mismatch");
  rows_ = int(c.rows());
  drive_nonzero_ = d.nonZeros() > 0;

  // union pattern, row-major, columns sorted
  std::vector<std::map<int, std::pair<cplx, cplx>>> rows(static_cast<size_t>(rows_));
  for (int k = 0; k < c.outerSize(); ++k)
    for (SpMat::InnerIterator it(c, k); it; ++it)
      rows[size_t(it.row())][int(it.col())].first += it.value();
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it)
      rows[size_t(it.row())][int(it.col())].second += it.value();

  ptr_.assign(size_t(rows_) + 1, 0);
  size_t nnz = 0;
  for (int r = 0; r < rows_; ++r) {
    nnz += rows[size_t(r)].size();
    ptr_[size_t(r) + 1] = int(nnz);
  }
  col_.resize(nnz);
  vc_re_.resize(nnz);
  vc_im_.resize(nnz);
  vd_re_.resize(nnz);
  vd_im_.resize(nnz);
  size_t k = 0;
  for (int r = 0; r < rows_; ++r)
    for (const auto& [colidx, vals] : rows[size_t(r)]) {
      col_[k] = colidx;
      vc_re_[k] = vals.first.real();
      vc_im_[k] = vals.first.imag();
      vd_re_[k] = vals.second.real();
      vd_im_[k] = vals.second.imag();
      ++k;
    }
}

}  // namespace upb
