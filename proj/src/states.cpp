#include "upb/states.hpp"

namespace upb {

cplx expectation(const DensityMatrix& state, const QOperator& op) {
  if (state.space() != op.space())
    throw std::invalid_argument("expectation: state and operator spaces differ");
  // tr[rho O] = sum_{r,c} O(r,c) rho(c,r), iterating the sparse factor only
  cplx acc(0.0, 0.0);
  const SpMat& m = op.matrix();
  const Eigen::MatrixXcd& rho = state.matrix();
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
  return acc;
}

cplx expectation(const WaveFunction& state, const QOperator& op) {
  if (state.space != op.space())
    throw std::invalid_argument("expectation: state and operator spaces differ");
  const double n2 = state.amplitudes.squaredNorm();
  if (n2 <= 0.0) throw std::invalid_argument("expectation: zero-norm wave function");
  const cplx val = state.amplitudes.dot(op.matrix() * state.amplitudes);
  return val / n2;
}

}  // namespace upb
