#include "upb/fock.hpp"

#include <vector>

namespace upb {

namespace {
void check_cavity(int cavity) {
  if (cavity != 1 && cavity != 2) throw std::invalid_argument("cavity index must be 1 or 2");
}
}  // namespace

QOperator annihilation(const HilbertSpace& space, int cavity) {
  check_cavity(cavity);
  const int d = space.dim();
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<size_t>(d));
  for (int n1 = 0; n1 < space.n1_levels(); ++n1) {
    for (int n2 = 0; n2 < space.n2_levels(); ++n2) {
      if (cavity == 1 && n1 > 0)
        trip.emplace_back(space.encode(n1 - 1, n2), space.encode(n1, n2), std::sqrt(double(n1)));
      if (cavity == 2 && n2 > 0)
        trip.emplace_back(space.encode(n1, n2 - 1), space.encode(n1, n2), std::sqrt(double(n2)));
    }
  }
  SpMat m(d, d);
  m.setFromTriplets(trip.begin(), trip.end());
  return QOperator(space, std::move(m));
}

QOperator number_op(const HilbertSpace& space, int cavity) {
  check_cavity(cavity);
  const int d = space.dim();
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    auto [n1, n2] = space.decode(i);
    const double n = (cavity == 1) ? n1 : n2;
    if (n > 0) trip.emplace_back(i, i, n);
  }
  SpMat m(d, d);
  m.setFromTriplets(trip.begin(), trip.end());
  return QOperator(space, std::move(m));
}

QOperator kerr_op(const HilbertSpace& space, int cavity) {
  check_cavity(cavity);
  const int d = space.dim();
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int i = 0; i < d; ++i) {
    auto [n1, n2] = space.decode(i);
    const double n = (cavity == 1) ? n1 : n2;
    if (n > 1) trip.emplace_back(i, i, n * (n - 1.0));
  }
  SpMat m(d, d);
  m.setFromTriplets(trip.begin(), trip.end());
  return QOperator(space, std::move(m));
}

}  // namespace upb
