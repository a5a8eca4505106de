#include <doctest.h>

#include <cmath>
#include <numbers>

#include "monolab/errors.hpp"
#include "monolab/scattering.hpp"

using namespace monolab;
using std::numbers::pi;

namespace {

/// Repulsive Coulomb tail, for the long-range check.
class Coulomb : public CentralForceSystem {
 public:
  SystemId id() const override { return SystemId::RadialScattering; }
  std::string name() const override { return "coulomb"; }
  double potential(double r) const override { return 1.0 / r; }
  double potential_slope(double r) const override { return -1.0 / (r * r); }
};

const RadialScattering kBump;
const RadialScattering kFree(0.0, 1.0);

}  // namespace

TEST_CASE("free flow") {
  for (double j : {0.5, -0.3, 2.0}) {
    const double expect = j > 0 ? 0.5 : -0.5;
    CHECK(std::abs(deflection_angle(kFree, {j, 1.0}).phi - expect) < 1e-8);
    CHECK(std::abs(deflection_angle(kFree, {j, 1.0}, DeflectionMethod::Quadrature).phi - expect) < 1e-8);
    CHECK(std::abs(radial_action_difference(kFree, {j, 1.0}).value) < 1e-12);
  }
}

TEST_CASE("trajectory and quadrature agree") {
  for (EMValue em : {EMValue{0.5, 1.5}, EMValue{0.1, 0.8}, EMValue{-0.2, 1.3}, EMValue{1.0, 0.6}}) {
    const double t = deflection_angle(kBump, em).phi;
    const double q = deflection_angle(kBump, em, DeflectionMethod::Quadrature).phi;
    CHECK(std::abs(t - q) < 1e-5);
  }
  CHECK(deflection_angle(kBump, {0.0, 1.5}).phi == 0.5);
  CHECK(deflection_angle(kBump, {0.0, 0.5}).phi == 0.0);
}

TEST_CASE("asymptotic states") {
  const Vec x = incoming_state(kBump, {0.5, 1.5}, 50.0);
  const AsymptoticState a = asymptote(x, AsymptoticSide::Incoming);
  CHECK(std::abs(a.p_hat.norm() - 1.0) < 1e-12);
  CHECK(std::abs(a.q_perp.dot(a.p_hat)) < 1e-10);
  CHECK(a.speed == doctest::Approx(std::sqrt(3.0)).epsilon(1e-6));

  // Rotating the initial condition rotates the asymptotes; the deflection is unchanged.
  const ScatteringRun r0 = scatter(kBump, x);
  const Vec xr = kBump.j_flow(x, 0.7);
  const ScatteringRun r1 = scatter(kBump, xr);
  const Eigen::Rotation2Dd rot(0.7);
  CHECK((rot * r0.outgoing.p_hat - r1.outgoing.p_hat).norm() < 1e-8);
  CHECK((rot * r0.outgoing.q_perp - r1.outgoing.q_perp).norm() < 1e-6);
  CHECK(std::abs(r0.swept - r1.swept) < 1e-8);

  // Time reversal: reversed outgoing state retraces the orbit.
  Vec back = r0.end;
  back.tail(2) = -back.tail(2);
  const ScatteringRun rb = scatter(kBump, back);
  CHECK((rb.outgoing.p_hat + r0.incoming.p_hat).norm() < 1e-8);
  CHECK(std::abs(rb.swept + r0.swept) < 1e-8);
}

TEST_CASE("radial action difference") {
  const ActionDifference d = radial_action_difference(kBump, {0.5, 1.5});
  CHECK(std::abs(d.truncated[1] - d.truncated[0]) < 1e-8);
  CHECK(std::isfinite(d.value));
  const double from_action = deflection_from_action(kBump, {0.5, 1.5});
  CHECK(std::abs(from_action - deflection_angle(kBump, {0.5, 1.5}).phi) < 1e-5);

  // Variation of the action-derived deflection along the loop.
  auto eval = [](EMValue em) {
    if (std::abs(em.j) < 1e-9) return deflection_angle(kBump, em).phi;
    return deflection_from_action(kBump, em);
  };
  const TrackResult t = track_along_loop(LoopPath::circle({0.0, 1.0}, 0.4, 32), eval, 0.4, 256);
  CHECK(std::abs(t.variation + 1.0) < 1e-3);

  Coulomb c;
  try {
    radial_action_difference(c, {0.5, 1.0});
    FAIL("expected a long-range error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LongRange);
  }
}

TEST_CASE("scattering monodromy") {
  const auto loop = LoopPath::circle({0.0, 1.0}, 0.4);
  const ScatteringMonodromy m = scattering_monodromy(kBump, kFree, loop);
  CHECK(std::abs(m.variation + 1.0) < 1e-2);
  CHECK(m.matrix == RationalMatrix::unipotent(Rational(1)));
  CHECK(m.map_matrix == m.matrix);
  CHECK(m.max_reference_residual < 1e-8);

  const ScatteringMonodromy self = scattering_monodromy(kBump, kBump, loop);
  CHECK(self.map_matrix.is_identity());
  for (const auto& s : self.map_samples) CHECK(std::abs(nearest_branch(s.rotation, 0.0)) < 1e-6);

  const ScatteringMonodromy back = scattering_monodromy(kBump, kFree, loop.reversed());
  CHECK(back.matrix == m.matrix.inverse());
  CHECK(scattering_monodromy(kBump, kFree, LoopPath::circle({0.5, 2.0}, 0.3)).matrix.is_identity());
}

TEST_CASE("orbits that do not escape in time count as captured") {
  ScatteringOptions o;
  o.t_max = 5.0;
  const Vec x = incoming_state(kBump, {0.3, 1.2}, 50.0);
  try {
    scatter(kBump, x, o);
    FAIL("expected capture");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Captured);
  }
}
