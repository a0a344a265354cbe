#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "support/oracles.hpp"
#include "upb/dynamics.hpp"
#include "upb/rk45.hpp"
#include "upb/rng.hpp"

using namespace upb;

namespace {

SystemParams molecule_params(double f, double delta = -0.29, double u = -0.001, double j = 19.6) {
  // UPB branch of the silicon photonic molecule: self-focusing Kerr (u < 0)
  // with the laser above the bare resonance (delta = omega_c - omega_L < 0).
  SystemParams p;
  p.delta1 = p.delta2 = delta;
  p.u1 = p.u2 = u;
  p.j_coupling = j;
  p.kappa1 = p.kappa2 = 1.0;
  p.drive = PulseShape::constant(f);
  return p;
}

}  // namespace

TEST_CASE("hamiltonian: single-excitation splitting, hermiticity, kerr diagonal") {
  const HilbertSpace s(4, 4);

  SUBCASE("normal-mode splitting +-J for the bare coupled pair") {
    SystemParams p;
    p.j_coupling = 1.7;
    p.drive = PulseShape::constant(0.0);
    const Eigen::MatrixXcd h = Eigen::MatrixXcd(build_hamiltonian(p, s, 0.0).matrix());
    Eigen::Matrix2cd block;
    block << h(s.encode(1, 0), s.encode(1, 0)), h(s.encode(1, 0), s.encode(0, 1)),
        h(s.encode(0, 1), s.encode(1, 0)), h(s.encode(0, 1), s.encode(0, 1));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(block);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1.7).epsilon(1e-14));
    CHECK(es.eigenvalues()(1) == doctest::Approx(+1.7).epsilon(1e-14));
  }
  SUBCASE("hermitian at the interference-point parameters") {
    const SystemParams p = molecule_params(30.0);
    const Eigen::MatrixXcd h = Eigen::MatrixXcd(build_hamiltonian(p, s, 0.0).matrix());
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("<2,0|H|2,0> = 2 delta1 + 2 u1") {
    SystemParams p;
    p.delta1 = 0.37;
    p.delta2 = -0.11;
    p.u1 = 0.023;
    p.u2 = 0.4;
    p.j_coupling = 3.0;
    p.drive = PulseShape::constant(0.9);
    const QOperator h = build_hamiltonian(p, s, 0.0);
    const cplx v = h.element(s.encode(2, 0), s.encode(2, 0));
    CHECK(v.real() == doctest::Approx(2 * 0.37 + 2 * 0.023).epsilon(1e-14));
    CHECK(v.imag() == 0.0);
  }
}

TEST_CASE("superoperator builders match direct dense products") {
  const HilbertSpace s(3, 2);
  const int d = s.dim();
  SplitMix64 rng(77);
  auto rand_mat = [&](bool herm) {
    Eigen::MatrixXcd m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = cplx(rng.uniform_oo() - 0.5, rng.uniform_oo() - 0.5);
    if (herm) m = (m + m.adjoint()).eval();
    return m;
  };
  const Eigen::MatrixXcd a = rand_mat(false), b = rand_mat(false), rho = rand_mat(true);
  const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), d * d);
  auto to_mat = [&](const Eigen::VectorXcd& x) {
    return Eigen::MatrixXcd(Eigen::Map<const Eigen::MatrixXcd>(x.data(), d, d));
  };
  const SpMat asp = a.sparseView(), bsp = b.sparseView();
  CHECK((to_mat(superop_left(asp) * v) - a * rho).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((to_mat(superop_right(bsp) * v) - rho * b).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((to_mat(superop_sandwich(asp, bsp) * v) - a * rho * b).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("liouvillian_apply basics") {
  const HilbertSpace s(3, 3);

  SUBCASE("vacuum is stationary without drive") {
    SystemParams p = molecule_params(0.0);
    const Eigen::MatrixXcd dd = liouvillian_apply(p, DensityMatrix::vacuum(s), 0.0);
    CHECK(dd.cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("occupation of |1,0><1,0| decays at kappa1") {
    SystemParams p;
    p.kappa1 = 0.8;
    p.kappa2 = 1.3;
    p.drive = PulseShape::constant(0.0);
    const Eigen::MatrixXcd dd = liouvillian_apply(p, DensityMatrix::fock(s, 1, 0), 0.0);
    double dn1 = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) dn1 += a * dd(s.encode(a, b), s.encode(a, b)).real();
    CHECK(dn1 == doctest::Approx(-0.8).epsilon(1e-13));
  }
  SUBCASE("trace of the derivative vanishes for random hermitian rho") {
    SystemParams p = molecule_params(4.0);
    SplitMix64 rng(5);
    Eigen::MatrixXcd m(s.dim(), s.dim());
    for (int i = 0; i < s.dim(); ++i)
      for (int j = 0; j < s.dim(); ++j) m(i, j) = cplx(rng.uniform_oo() - 0.5, rng.uniform_oo() - 0.5);
    m = (m + m.adjoint()).eval();
    m /= m.trace().real();
    const Eigen::MatrixXcd dd = liouvillian_apply(p, DensityMatrix(s, m), 0.0);
    CHECK(std::abs(dd.trace()) < 1e-12);
  }
}

TEST_CASE("steady state") {
  SUBCASE("single driven linear cavity matches the analytic occupation") {
    SystemParams p;
    p.delta1 = 0.3;
    p.kappa1 = 1.0;
    p.kappa2 = 1.0;
    p.drive = PulseShape::constant(0.8);
    const HilbertSpace s(20, 2);
    const DensityMatrix rho = steady_state(p, s);
    const double n1 = expectation(rho, number_op(s, 1)).real();
    const double analytic = 0.8 * 0.8 / (0.3 * 0.3 + 0.25);
    CHECK(n1 == doctest::Approx(analytic).epsilon(1e-6));
    CHECK(g2_zero(rho, 1) == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("no drive gives the vacuum projector") {
    const HilbertSpace s(3, 4);
    const DensityMatrix rho = steady_state(molecule_params(0.0), s);
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(s.dim(), s.dim());
    expect(0, 0) = 1.0;
    CHECK((rho.matrix() - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("pulsed drive rejected") {
    SystemParams p = molecule_params(1.0);
    p.drive = PulseShape::gaussian_train(1.0, 1.0, 10.0, 5.0);
    CHECK_THROWS_AS(steady_state(p, HilbertSpace(3, 3)), std::invalid_argument);
  }
  SUBCASE("physicality of the interference-point steady state") {
    const HilbertSpace s(4, 18);
    const DensityMatrix rho = steady_state(molecule_params(30.0), s);
    const PhysicalityReport rep = rho.physicality();
    CHECK(rep.trace_error < 1e-9);
    CHECK(rep.herm_defect < 1e-9);
    CHECK(rep.min_eigenvalue > -1e-7);
  }
}

TEST_CASE("linear-system factorization: u = 0 gives coherent statistics") {
  // random parameter draws kept at low occupation; J = 0 cases against the
  // closed form, J != 0 against the hand-rolled dense solve
  SplitMix64 rng(20250809);
  int done = 0;
  while (done < 6) {
    const double f = 0.3 + 0.9 * rng.uniform_oo();
    const double d1 = -1.5 + 3.0 * rng.uniform_oo();
    const double d2 = -1.5 + 3.0 * rng.uniform_oo();
    const double k1 = 0.7 + 1.3 * rng.uniform_oo();
    const double k2 = 0.7 + 1.3 * rng.uniform_oo();
    const double j = (done % 2 == 0) ? 0.0 : 0.5 + 3.5 * rng.uniform_oo();
    const auto lin = oracle::linear_response(d1, d2, j, f, k1, k2);
    if (lin.n1() > 0.35 || lin.n2() > 0.35 || lin.n1() < 0.02) continue;
    ++done;

    SystemParams p;
    p.delta1 = d1;
    p.delta2 = d2;
    p.j_coupling = j;
    p.kappa1 = k1;
    p.kappa2 = k2;
    p.drive = PulseShape::constant(f);
    // g2 = 1 needs truncation tails far below 1e-6 * n1^2; size the space for that
    const HilbertSpace s = (j == 0.0) ? HilbertSpace(14, 2) : HilbertSpace(12, 12);
    const DensityMatrix rho = steady_state(p, s);
    const double n1 = expectation(rho, number_op(s, 1)).real();
    CHECK(g2_zero(rho, 1) == doctest::Approx(1.0).epsilon(1e-6));
    if (j == 0.0) {
      CHECK(n1 == doctest::Approx(f * f / (d1 * d1 + 0.25 * k1 * k1)).epsilon(1e-6));
    } else {
      // solver cross-check against the hand-rolled dense oracle at matched truncation
      const HilbertSpace s6(6, 6);
      const double n1_6 = expectation(steady_state(p, s6), number_op(s6, 1)).real();
      const auto ref = oracle::dense_steady_state(6, 6, d1, d2, 0.0, 0.0, j, f, k1, k2);
      CHECK(std::abs(n1_6 - ref.n1) < 1e-9);
    }
  }
}

TEST_CASE("evolve") {
  SUBCASE("fock decay law") {
    SystemParams p;
    p.kappa1 = 1.0;
    p.kappa2 = 2.0;
    p.drive = PulseShape::constant(0.0);
    const HilbertSpace s(3, 2);
    std::vector<double> grid{0.0, 0.5, 1.0, 2.0, 3.5};
    const auto states = evolve(DensityMatrix::fock(s, 1, 0), p, grid);
    for (size_t i = 0; i < grid.size(); ++i) {
      const double n1 = expectation(states[i], number_op(s, 1)).real();
      CHECK(std::abs(n1 - std::exp(-grid[i])) < 1e-6);
    }
  }
  SUBCASE("long-time evolution converges to the steady state") {
    const SystemParams p = molecule_params(8.0);
    const HilbertSpace s(4, 10);
    const DensityMatrix rho_ss = steady_state(p, s);
    std::vector<double> grid{0.0, 40.0};
    const auto states = evolve(DensityMatrix::vacuum(s), p, grid, SolverOptions{1e-10, 1e-14, 1});
    // trace distance = (1/2) sum |eigs|
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(states[1].matrix() - rho_ss.matrix(),
                                                       Eigen::EigenvaluesOnly);
    CHECK(0.5 * es.eigenvalues().cwiseAbs().sum() < 1e-6);
  }
  SUBCASE("physicality along a driven transient") {
    SystemParams p = molecule_params(30.0);
    const HilbertSpace s(4, 12);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.2 * i);
    const auto states = evolve(DensityMatrix::vacuum(s), p, grid);
    for (const auto& st : states) {
      const PhysicalityReport rep = st.physicality();
      CHECK(rep.trace_error <= 1e-8);
      CHECK(rep.herm_defect <= 1e-9);
      CHECK(rep.min_eigenvalue >= -1e-7);
    }
  }
  SUBCASE("non-monotone grid rejected") {
    const HilbertSpace s(2, 2);
    std::vector<double> bad{0.0, 1.0, 0.5};
    CHECK_THROWS_AS(evolve(DensityMatrix::vacuum(s), molecule_params(0.0), bad),
                    std::invalid_argument);
  }
}

TEST_CASE("g2_zero special states") {
  const HilbertSpace s(8, 2);
  SUBCASE("single photon gives zero") {
    CHECK(g2_zero(DensityMatrix::fock(s, 1, 0), 1) == 0.0);
  }
  SUBCASE("vacuum is undefined") { CHECK(std::isnan(g2_zero(DensityMatrix::vacuum(s), 1))); }
  SUBCASE("coherent-like steady state gives one") {
    SystemParams p;
    p.delta1 = -0.4;
    p.drive = PulseShape::constant(0.5);
    CHECK(g2_zero(steady_state(p, HilbertSpace(12, 2)), 1) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("g2_tau_cw consistency and decorrelation") {
  const SystemParams p = molecule_params(1.0, -0.2887, -0.001, 19.62);
  const HilbertSpace s(4, 12);
  std::vector<double> taus;
  for (int i = 0; i <= 120; ++i) taus.push_back(i * 0.05);
  const CorrelationResult res = g2_tau_cw(p, s, taus);
  res.validate();

  const DensityMatrix rho_ss = steady_state(p, s);
  CHECK(std::abs(res.values[0] - g2_zero(rho_ss, 1)) < 1e-9);

  double tail = 0.0;
  int count = 0;
  for (size_t i = 0; i < taus.size(); ++i)
    if (taus[i] >= 5.0) {
      tail += res.values[i];
      ++count;
    }
  CHECK(std::abs(tail / count - 1.0) < 0.02);
}

TEST_CASE("g2_tau_cw is flat unity for the linear system") {
  SystemParams p;
  p.delta1 = p.delta2 = 0.2;
  p.j_coupling = 1.4;
  p.drive = PulseShape::constant(0.6);
  const HilbertSpace s(10, 10);
  std::vector<double> taus{0.0, 0.3, 0.9, 2.0, 4.0};
  const CorrelationResult res = g2_tau_cw(p, s, taus);
  for (double v : res.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("two_time undefined on vacuum occupation") {
  SystemParams p;
  p.drive = PulseShape::gaussian_train(0.5, 1.0, 12.0, 3.0);
  const auto tt = two_time_g2_pulsed(p, HilbertSpace(3, 3), 0.0, 0.5);
  CHECK(!tt.defined);
  CHECK(std::isnan(tt.g2));
}

TEST_CASE("integrator reports unrecoverable steps") {
  const HilbertSpace s(2, 2);
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(s.dim(), s.dim());
  bad(0, 0) = std::numeric_limits<double>::infinity();
  std::vector<double> grid{0.0, 1.0};
  CHECK_THROWS_AS(evolve(DensityMatrix(s, bad), SystemParams{}, grid), IntegrationError);
}

TEST_CASE("sweep_drive isolates per-point failures") {
  SystemParams base;
  base.delta1 = 0.1;
  const HilbertSpace s(4, 4);
  const std::vector<double> fs{0.5, std::numeric_limits<double>::quiet_NaN(), 0.7};
  const auto rows = sweep_drive(base, s, fs);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].ok);
  CHECK(!rows[1].ok);
  CHECK(!rows[1].error.empty());
  CHECK(rows[2].ok);
}

TEST_CASE("sweep_drive rows") {
  const SystemParams base = molecule_params(0.0);
  const HilbertSpace s(4, 12);
  const std::vector<double> fs{1.0, 5.0, 10.0};
  const auto rows = sweep_drive(base, s, fs, SolverOptions{1e-8, 1e-12, 2});
  REQUIRE(rows.size() == 3);
  double prev = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].ok);
    CHECK(rows[i].f == fs[i]);
    CHECK(rows[i].n1 > prev);  // monotone in this range
    prev = rows[i].n1;
    CHECK(rows[i].n2 > rows[i].n1);  // the non-detected cavity dominates
  }
}

TEST_CASE("two-time correlation under pulsed drive") {
  SystemParams p;
  p.delta1 = p.delta2 = 0.2;
  p.j_coupling = 0.9;
  p.kappa1 = 1.0;
  p.kappa2 = 1.2;
  p.drive = PulseShape::gaussian_train(0.9, 1.0, 12.0, 3.0);

  SUBCASE("diagonal consistency with the equal-time curve") {
    const HilbertSpace s(5, 5);
    const auto tt = two_time_g2_pulsed(p, s, 3.2, 3.2);
    const PulseDiagnostics diag = pulse_diagnostics(p, s, 4.0, 201);
    // 3.2 lands on the 161st node of the 201-point grid over [0,4]
    const double ref = diag.g2tt[160];
    CHECK(tt.defined);
    CHECK(tt.g2 == doctest::Approx(ref).epsilon(1e-6));
  }
  SUBCASE("gaussian-state factorization: linear system gives unity") {
    const HilbertSpace s(10, 10);
    for (auto [t, tp] : {std::pair{2.5, 2.5}, {2.5, 3.4}, {1.8, 4.0}}) {
      const auto tt = two_time_g2_pulsed(p, s, t, tp);
      CHECK(tt.defined);
      CHECK(tt.g2 == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  SUBCASE("t > t_prime rejected") {
    CHECK_THROWS_AS(two_time_g2_pulsed(p, HilbertSpace(3, 3), 2.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("filtered g2 window statistic") {
  SystemParams p;
  p.delta1 = p.delta2 = 0.2;
  p.j_coupling = 0.9;
  p.kappa1 = 1.0;
  p.kappa2 = 1.2;
  p.drive = PulseShape::gaussian_train(0.5, 1.0, 12.0, 3.0);
  const HilbertSpace s(10, 10);

  SUBCASE("degenerate window reduces to the equal-time value") {
    const auto narrow = filtered_g2(p, s, 3.18, 3.22, 17);
    const auto tt = two_time_g2_pulsed(p, s, 3.2, 3.2);
    CHECK(narrow.defined);
    CHECK(narrow.value == doctest::Approx(tt.g2).epsilon(1e-3));
  }
  SUBCASE("linear system stays at unity and refinement is tight") {
    const auto res = filtered_g2(p, s, 2.0, 4.5, 33);
    CHECK(res.defined);
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(res.value - res.coarse_value) <= 0.01 * std::abs(res.value));
  }
}

TEST_CASE("truncation convergence of the occupation at the working drive") {
  const SystemParams p = molecule_params(30.0);
  const DensityMatrix a = steady_state(p, HilbertSpace(4, 18));
  const DensityMatrix b = steady_state(p, HilbertSpace(5, 19));
  const double n1a = expectation(a, number_op(HilbertSpace(4, 18), 1)).real();
  const double n1b = expectation(b, number_op(HilbertSpace(5, 19), 1)).real();
  CHECK(std::abs(n1b - n1a) / n1a < 0.005);
}
