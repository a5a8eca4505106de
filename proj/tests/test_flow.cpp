#include <doctest.h>

#include <numbers>
#include <random>

#include "monolab/errors.hpp"
#include "monolab/flow.hpp"

using namespace monolab;
using std::numbers::pi;

TEST_CASE("oscillator period") {
  HarmonicOscillator2D o;
  Vec x(4);
  x << 0.3, -0.2, 0.5, 0.1;
  const Trajectory t = integrate(o, x, 2.0 * pi);
  CHECK((t.final_state - x).norm() < 1e-9);
  CHECK(t.final_time == doctest::Approx(2.0 * pi).epsilon(1e-15));
}

TEST_CASE("pendulum conservation") {
  SphericalPendulum p;
  const Vec x = p.torus_seed({0.5, 1.0});
  const Trajectory t = integrate(p, x, 10.0);
  CHECK(t.drift_h < 1e-9);
  CHECK(t.drift_j < 1e-9);
  FlowOptions half;
  half.rtol = half.atol = 5e-13;
  const Trajectory t2 = integrate(p, x, 10.0, {}, half);
  CHECK((t2.final_state - t.final_state).norm() < 1e-8);
  CHECK_NOTHROW(p.check_admissible(t.final_state));
}

TEST_CASE("resonance J-flow is 2 pi periodic") {
  Resonance1m2 r;
  Vec x(4);
  // z = w = 1 + 0i.
  x << 0.0, 0.0, 1.0, 1.0;
  auto jfield = [&](const Vec& y) { return r.vector_field_j(y); };
  const Trajectory t = integrate_field(jfield, x, 2.0 * pi, {}, FlowOptions{});
  CHECK((t.final_state - x).norm() < 1e-9);
  CHECK((j_flow(r, x, 2.0 * pi) - x).norm() < 1e-12);
}

TEST_CASE("drift gate rejects loose runs") {
  SphericalPendulum p;
  const Vec x = p.torus_seed({0.5, 1.0});
  FlowOptions loose;
  loose.rtol = loose.atol = 1e-4;
  loose.drift_gate = 1e-12;
  try {
    integrate(p, x, 10.0, {}, loose);
    FAIL("expected drift rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DriftExceeded);
  }
  CHECK_THROWS_AS(integrate(p, x, -1.0), Error);
  Vec bad = x;
  bad[2] += 0.1;
  CHECK_THROWS_AS(integrate(p, bad, 1.0), Error);
}

TEST_CASE("event location") {
  HarmonicOscillator2D o;
  Vec x(4);
  x << 1.0, 0.0, 0.0, 1.0;
  // q1 = cos t crosses zero downward at pi/2.
  EventSpec e{[](const Vec& y) { return y[0]; }, Direction::Decreasing, true};
  const Trajectory t = integrate(o, x, 10.0, std::span<const EventSpec>(&e, 1));
  REQUIRE(t.terminated);
  REQUIRE(t.hits.size() == 1);
  CHECK(std::abs(t.hits[0].t - pi / 2) < 1e-12);
  CHECK(std::abs(t.hits[0].value) < 1e-10);

  // Non-terminal upward crossings at 3 pi / 2 and 7 pi / 2.
  EventSpec up{[](const Vec& y) { return y[0]; }, Direction::Increasing, false};
  const Trajectory t2 = integrate(o, x, 12.0, std::span<const EventSpec>(&up, 1));
  REQUIRE(t2.hits.size() == 2);
  CHECK(std::abs(t2.hits[0].t - 1.5 * pi) < 1e-11);
  CHECK(std::abs(t2.hits[1].t - 3.5 * pi) < 1e-11);
  for (const auto& h : t2.hits) CHECK(std::abs(h.value) < 1e-10);
}

TEST_CASE("accumulated rate") {
  HarmonicOscillator2D o;
  Vec x(4);
  x << 1.0, 0.0, 0.0, 1.0;
  // Polar angle rate j / r^2 = 1 on the unit circle.
  auto rate = [](const Vec& y, const Vec& v) { return (y[0] * v[1] - y[1] * v[0]) / y.head(2).squaredNorm(); };
  const Trajectory t = integrate(o, x, 3.0, {}, FlowOptions{}, rate);
  CHECK(t.accumulated == doctest::Approx(3.0).epsilon(1e-11));
}

TEST_CASE("closed-form J-flows") {
  SphericalPendulum p;
  std::mt19937_64 rng(2);
  const Vec x = p.random_state(rng);
  CHECK((j_flow(p, x, 2.0 * pi) - x).norm() < 1e-12);
  Vec s(4);
  s << 1.0, 0.0, 0.0, 0.0;
  RadialScattering b;
  Vec expect(4);
  expect << 0.0, 1.0, 0.0, 0.0;
  CHECK((j_flow(b, s, pi / 2) - expect).norm() < 1e-12);
}
