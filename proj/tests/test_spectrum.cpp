#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include "monolab/errors.hpp"
#include "monolab/spectrum.hpp"

using namespace monolab;

namespace {

// Normalized associated Legendre function; the Condon-Shortley phase cancels in products.
double legendre_normalized(int l, int m, double x) {
  const double norm = std::sqrt((2.0 * l + 1.0) / 2.0 * std::tgamma(l - m + 1.0) / std::tgamma(l + m + 1.0));
  return norm * std::assoc_legendre(static_cast<unsigned>(l), static_cast<unsigned>(m), x);
}

// Lowest eigenvalue of -hbar^2/2 d/dx((1 - x^2) d/dx) + x on [-1, 1] by
// cell-centred finite volumes.
double polar_ground_state(double hbar, int nodes) {
  const double dx = 2.0 / nodes;
  Eigen::VectorXd diag(nodes), sub(nodes - 1);
  const double k = 0.5 * hbar * hbar / (dx * dx);
  for (int i = 0; i < nodes; ++i) {
    const double x = -1.0 + (i + 0.5) * dx;
    const double xl = -1.0 + i * dx, xr = xl + dx;
    diag[i] = k * ((1.0 - xl * xl) + (1.0 - xr * xr)) + x;
    if (i + 1 < nodes) sub[i] = -k * (1.0 - xr * xr);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()[0];
}

}  // namespace

TEST_CASE("z matrix elements against quadrature") {
  boost::math::quadrature::gauss<double, 40> q;
  for (int m = 0; m <= 5; ++m)
    for (int l = m; l <= 10; ++l) {
      auto f = [&](double x) { return legendre_normalized(l + 1, m, x) * x * legendre_normalized(l, m, x); };
      const double direct = q.integrate(f, -1.0, 1.0);
      CHECK(std::abs(std::abs(direct) - z_matrix_element(l, m)) < 1e-12);
      CHECK(z_matrix_element(l, -m) == z_matrix_element(l, m));
    }
}

TEST_CASE("Sturm bisection against a dense solver") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    Tridiagonal t;
    const int n = 40 + 10 * trial;
    for (int i = 0; i < n; ++i) t.diag.push_back(u(rng));
    for (int i = 0; i + 1 < n; ++i) t.off.push_back(u(rng));
    Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(t.diag.data(), n);
    Eigen::VectorXd s = Eigen::Map<Eigen::VectorXd>(t.off.data(), n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(d, s, Eigen::EigenvaluesOnly);
    const auto [lo, hi] = t.bounds();
    const std::vector<double> ev = t.eigenvalues(lo, hi);
    REQUIRE(ev.size() == static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(ev[i] - solver.eigenvalues()[i]) < 1e-12);
      CHECK(std::abs(t.eigenvalue(i) - ev[i]) < 1e-13);
    }
    CHECK(t.count_below(lo - 1.0) == 0);
    CHECK(t.count_below(hi + 1.0) == static_cast<std::size_t>(n));
  }
}

TEST_CASE("free sphere spectrum is exact") {
  SpectrumOptions o;
  o.gravity = 0.0;
  o.l_max = 200;
  const SpectralLattice s = pendulum_joint_spectrum(1.0, -20, 20, 5100.0, o);
  double err = 0.0;
  int checked = 0;
  for (const auto& p : s.points) {
    const int l = std::abs(p.m) + p.n;
    if (l > 100) continue;
    err = std::max(err, std::abs(p.e - 0.5 * l * (l + 1.0)));
    ++checked;
  }
  CHECK(err < 1e-10);
  // Degrees |m|..100 for each of the 41 columns.
  int expected = 0;
  for (int m = -20; m <= 20; ++m) expected += 101 - std::abs(m);
  CHECK(checked == expected);
}

TEST_CASE("pendulum ground state against finite differences") {
  const SpectralLattice s = pendulum_joint_spectrum(0.1, 0, 0, -0.8);
  REQUIRE(!s.points.empty());
  const double fd = polar_ground_state(0.1, 4000);
  CHECK(std::abs(s.points[0].e - fd) < 1e-6);
}

TEST_CASE("l_max doubling and exact columns") {
  const SpectralLattice s = pendulum_joint_spectrum(0.1, Window{-1.5, 1.5, -1.0, 2.5});
  SpectrumOptions big;
  big.l_max = 400;
  const SpectralLattice t = pendulum_joint_spectrum(0.1, Window{-1.5, 1.5, -1.0, 2.5}, big);
  REQUIRE(s.points.size() == t.points.size());
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    CHECK(std::abs(s.points[i].e - t.points[i].e) < 1e-10);
    CHECK(s.points[i].j == 0.1 * s.points[i].m);
  }
  // The defect: (0, 1) is not a lattice point but the columns around it are populated.
  CHECK(!s.column(0).empty());
  CHECK(!s.column(5).empty());

  SpectrumOptions tiny;
  tiny.l_max = 12;
  try {
    pendulum_joint_spectrum(0.1, 0, 0, 2.0, tiny);
    FAIL("expected truncation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Truncation);
  }
  CHECK_THROWS_AS(pendulum_joint_spectrum(-0.1, 0, 0, 2.0), Error);
}

TEST_CASE("lattice CSV round trip") {
  const SpectralLattice s = pendulum_joint_spectrum(0.1, Window{-0.5, 0.5, -1.0, 0.0});
  std::stringstream buf;
  write_lattice_csv(s, buf);
  const SpectralLattice r = read_lattice_csv(buf);
  REQUIRE(r.points.size() == s.points.size());
  CHECK(r.hbar == doctest::Approx(0.1).epsilon(1e-15));
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    CHECK(r.points[i].e == s.points[i].e);
    CHECK(r.points[i].m == s.points[i].m);
    CHECK(r.points[i].n == s.points[i].n);
  }
  std::stringstream bad("x,y\n1,2\n");
  CHECK_THROWS_AS(read_lattice_csv(bad), Error);
}
