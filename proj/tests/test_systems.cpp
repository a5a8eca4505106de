#include <doctest.h>

#include <complex>
#include <numbers>
#include <random>

#include "monolab/bifurcation.hpp"
#include "monolab/errors.hpp"
#include "monolab/systems.hpp"

using namespace monolab;
using std::numbers::pi;

namespace {

Vec state(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

bool has_value(const std::vector<CriticalPoint>& d, EMValue v, double tol, CriticalKind kind) {
  for (const auto& c : d)
    if (c.kind == kind && std::hypot(c.value.j - v.j, c.value.h - v.h) < tol) return true;
  return false;
}

}  // namespace

TEST_CASE("catalog values") {
  SphericalPendulum p;
  EMValue bottom = energy_momentum(p, state({0, 0, -1, 0, 0, 0}));
  CHECK(bottom.j == 0.0);
  CHECK(bottom.h == -1.0);
  EMValue top = energy_momentum(p, state({0, 0, 1, 0, 0, 0}));
  CHECK(top.j == 0.0);
  CHECK(top.h == 1.0);
  // x p_y - y p_x and |p|^2/2 + z on the equator.
  EMValue eq = energy_momentum(p, state({1, 0, 0, 0, 0.5, 0.2}));
  CHECK(eq.j == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eq.h == doctest::Approx(0.145).epsilon(1e-15));

  Resonance1m2 r;
  EMValue origin = energy_momentum(r, Vec::Zero(4));
  CHECK(origin.j == 0.0);
  CHECK(origin.h == 0.0);
  // (q1, q2, p1, p2) = (1, 0, 0, 1): H = 1 + R^2 with R = 3/2, J = 1/2 - 1.
  EMValue v = energy_momentum(r, state({1, 0, 0, 1}));
  CHECK(v.j == doctest::Approx(-0.5));
  CHECK(v.h == doctest::Approx(1.0 + 2.25));

  RadialScattering bump(2.0, 0.5);
  EMValue b = energy_momentum(bump, state({0.5, 0, 0, 1}));
  CHECK(b.j == doctest::Approx(0.5));
  CHECK(b.h == doctest::Approx(0.5 + 2.0 * std::exp(-1.0)));

  ChampagneBottle c;
  CHECK(c.potential(1.0) == 0.0);
  CHECK(c.hamiltonian(state({std::sqrt(0.5), 0, 0, 0})) == doctest::Approx(-0.25));
}

TEST_CASE("constraint violations are rejected") {
  SphericalPendulum p;
  CHECK_THROWS_AS(energy_momentum(p, state({0, 0, 1.1, 0, 0, 0})), Error);
  try {
    energy_momentum(p, state({0, 0, 1, 0, 0, 0.3}));
    FAIL("expected a constraint violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConstraintViolation);
  }
  CHECK_THROWS_AS(energy_momentum(p, state({0, 0, 1})), Error);
}

TEST_CASE("gradient checks") {
  std::mt19937_64 rng(7);
  SphericalPendulum p;
  HarmonicOscillator2D o;
  for (int k = 0; k < 20; ++k) {
    CHECK(gradient_check(p, p.random_state(rng), 1e-5) < 1e-7);
    CHECK(gradient_check(o, o.random_state(rng), 1e-5) < 1e-9);
  }
  Resonance1m2 r;
  CHECK(gradient_check(r, Vec::Zero(4), 1e-5) <= 1e-12);
  CHECK(r.grad_h(Vec::Zero(4)).norm() == 0.0);
  CHECK(r.grad_j(Vec::Zero(4)).norm() == 0.0);
  CHECK_THROWS_AS(gradient_check(r, Vec::Zero(4), 0.0), Error);
}

TEST_CASE("pendulum projection is idempotent") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  SphericalPendulum p;
  for (int k = 0; k < 50; ++k) {
    Vec x(6);
    for (auto& v : x) v = n01(rng);
    const Vec y = p.project(x);
    const Vec z = p.project(y);
    CHECK((z - y).norm() < 1e-12);
    const EMValue a = p.energy_momentum(y), b = p.energy_momentum(z);
    CHECK(std::abs(a.j - b.j) < 1e-12);
    CHECK(std::abs(a.h - b.h) < 1e-12);
    CHECK_NOTHROW(p.check_admissible(y));
  }
}

TEST_CASE("resonance circle action in complex coordinates") {
  Resonance1m2 r;
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const Vec x = r.random_state(rng);
    const std::complex<double> z(x[2], x[0]), w(x[3], x[1]);
    for (int i = 0; i <= 64; ++i) {
      const double t = 2.0 * pi * i / 64.0;
      const Vec y = r.j_flow(x, t);
      const std::complex<double> z1 = std::polar(1.0, t) * z, w1 = std::polar(1.0, -2.0 * t) * w;
      CHECK(std::abs(y[2] - z1.real()) < 1e-10);
      CHECK(std::abs(y[0] - z1.imag()) < 1e-10);
      CHECK(std::abs(y[3] - w1.real()) < 1e-10);
      CHECK(std::abs(y[1] - w1.imag()) < 1e-10);
    }
  }
}

TEST_CASE("closed-form circle actions") {
  SphericalPendulum p;
  std::mt19937_64 rng(5);
  const Vec x = p.random_state(rng);
  CHECK((p.j_flow(x, 2.0 * pi) - x).norm() < 1e-12);
  Resonance1m2 r;
  const Vec y = r.j_flow(state({0, 0, 1, 1}), pi);
  CHECK((y - state({0, 0, -1, 1})).norm() < 1e-12);
  RadialScattering s;
  const Vec q = s.j_flow(state({1, 0, 0, 0}), pi / 2);
  CHECK((q - state({0, 1, 0, 0})).norm() < 1e-12);
  CHECK(p.circle_period() == doctest::Approx(2.0 * pi));
}

TEST_CASE("system ids") {
  for (SystemId id : all_system_ids()) {
    auto s = make_system(system_id_string(id));
    CHECK(s->id() == id);
    CHECK(s->name() == system_id_string(id));
  }
  CHECK_THROWS_AS(make_system("double-pendulum"), Error);
  auto b = make_system("radial-bump", SystemParams{2.0, 0.5});
  CHECK(b->hamiltonian(Vec::Zero(4)) == 2.0);
}

TEST_CASE("bifurcation diagrams") {
  SphericalPendulum p;
  const auto dp = bifurcation_diagram(p, Window{-3, 3, -2, 4}, 30);
  CHECK(has_value(dp, {0.0, 1.0}, 1e-8, CriticalKind::Isolated));
  CHECK(has_value(dp, {0.0, -1.0}, 1e-6, CriticalKind::Branch));
  int iso = 0;
  bool lower_branch = false;
  for (const auto& c : dp) {
    iso += c.kind == CriticalKind::Isolated;
    if (c.kind == CriticalKind::Branch && std::abs(c.value.j) > 0.3) lower_branch = true;
  }
  CHECK(iso == 1);
  CHECK(lower_branch);

  Resonance1m2 r;
  const auto dr = bifurcation_diagram(r, Window{-2, 2, -1, 2}, 30);
  CHECK(has_value(dr, {0.0, 0.0}, 1e-8, CriticalKind::Isolated));
  // The exceptional branch h = j^2 on -1/4 < j < 0.
  bool hyperbolic = false;
  for (const auto& c : dr)
    if (c.kind == CriticalKind::Branch && c.value.j < -0.02 && c.value.j > -0.24 &&
        std::abs(c.value.h - c.value.j * c.value.j) < 1e-8)
      hyperbolic = true;
  CHECK(hyperbolic);

  HarmonicOscillator2D o;
  for (const auto& c : bifurcation_diagram(o, Window{-2, 2, -1, 3}, 30)) CHECK(c.kind != CriticalKind::Isolated);
}
