#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "monolab/classical.hpp"
#include "monolab/errors.hpp"

using namespace monolab;
using std::numbers::pi;

namespace {

const RationalMatrix kM1 = RationalMatrix::unipotent(Rational(1));

// (1/pi) int j / r^2 dr / sqrt(2 (h - V) - j^2 / r^2) between the turning points.
double central_rotation_oracle(const CentralForceSystem& s, EMValue em) {
  const auto [r_lo, r_hi] = s.turning_points(em);
  boost::math::quadrature::tanh_sinh<double> q;
  auto f = [&](double r) {
    const double rad = 2.0 * (em.h - s.potential(r)) - em.j * em.j / (r * r);
    return rad > 0.0 ? em.j / (r * r) / std::sqrt(rad) : 0.0;
  };
  return q.integrate(f, r_lo, r_hi, 1e-14) / pi;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("torus points") {
  SphericalPendulum p;
  const Vec x = torus_point(p, {0.5, 1.0});
  const EMValue f = p.energy_momentum(x);
  CHECK(std::abs(f.j - 0.5) <= 1e-10);
  CHECK(std::abs(f.h - 1.0) <= 1e-10);
  CHECK_NOTHROW(p.check_admissible(x));

  const ErrorKind k = kind_of([&] { torus_point(p, {0.0, -1.0}); });
  CHECK((k == ErrorKind::CriticalValue || k == ErrorKind::Seeding));

  HarmonicOscillator2D o;
  for (EMValue em : {EMValue{0.3, 1.0}, EMValue{-0.7, 2.0}, EMValue{0.05, 0.4}}) {
    const EMValue g = o.energy_momentum(torus_point(o, em, 1e-12));
    CHECK(std::abs(g.j - em.j) < 1e-12);
    CHECK(std::abs(g.h - em.h) < 1e-12);
  }
}

TEST_CASE("rotation number against the central-force quadrature") {
  ChampagneBottle c;
  const EMValue em{0.5, 1.0};
  const RotationRecord r = rotation_number(c, em);
  const double oracle = central_rotation_oracle(c, em);
  CHECK(std::abs(nearest_branch(r.theta, oracle) - oracle) < 1e-6);
  CHECK(r.check_residual < 1e-7);
  CHECK(r.T > 0.0);

  HarmonicOscillator2D o;
  const double t0 = rotation_number(o, {0.3, 1.0}).theta_mod;
  for (EMValue em2 : {EMValue{0.7, 1.5}, EMValue{0.1, 0.5}, EMValue{1.2, 2.0}})
    CHECK(std::abs(rotation_number(o, em2).theta_mod - t0) < 1e-8);
}

TEST_CASE("pendulum monodromy by rotation numbers") {
  SphericalPendulum p;
  const auto loop = LoopPath::circle({0.0, 1.0}, 0.5);
  const MonodromyResult m = monodromy_by_rotation(p, loop);
  CHECK(std::abs(m.m_raw - 1.0) < 1e-3);
  CHECK(m.matrix == kM1);
  CHECK(m.max_check_residual < 1e-7);

  const MonodromyResult back = monodromy_by_rotation(p, loop.reversed());
  CHECK(back.matrix == kM1.inverse());

  const MonodromyResult small = monodromy_by_rotation(p, LoopPath::circle({1.5, 2.5}, 0.3, 32));
  CHECK(small.matrix.is_identity());
  CHECK(std::abs(small.m_raw) < 1e-3);
}

TEST_CASE("isotropy weights") {
  SphericalPendulum p;
  Vec top = Vec::Zero(6);
  top[2] = 1.0;
  const FixedPointRecord t = isotropy_weights(p, top);
  CHECK(t.m == 1);
  CHECK(t.n == -1);
  CHECK(t.sign == 1);
  CHECK(t.residual < 1e-8);

  Resonance1m2 r;
  const FixedPointRecord o = isotropy_weights(r, Vec::Zero(4));
  CHECK(o.m == 1);
  CHECK(o.n == -2);
  CHECK(o.sign == 1);

  HarmonicOscillator2D osc;
  const FixedPointRecord w = isotropy_weights(osc, Vec::Zero(4));
  CHECK(std::abs(w.m) == 1);
  CHECK(std::abs(w.n) == 1);

  Vec moving = Vec::Zero(4);
  moving[0] = 1.0;
  CHECK_THROWS_AS(isotropy_weights(osc, moving), Error);
}

TEST_CASE("monodromy by fixed points") {
  SphericalPendulum p;
  const FixedPointMonodromy m = monodromy_by_fixed_points(p, LoopPath::circle({0.0, 1.0}, 0.5));
  CHECK(m.matrix == kM1);
  REQUIRE(m.inside.size() == 1);
  CHECK(m.inside[0].sign == 1);
  CHECK(m.inside[0].value.h == doctest::Approx(1.0));

  CHECK(monodromy_by_fixed_points(p, LoopPath::circle({1.5, 2.5}, 0.3)).matrix.is_identity());
  CHECK(monodromy_by_fixed_points(p, LoopPath::circle({0.0, 1.0}, 0.5).reversed()).matrix == kM1.inverse());
  CHECK(kind_of([&] { monodromy_by_fixed_points(p, LoopPath::circle({0.0, 0.5}, 0.5)); }) ==
        ErrorKind::RepositionLoop);
}

TEST_CASE("Chern sequence") {
  SphericalPendulum p;
  const auto levels = chern_sequence(p, -2.0, 3.0);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0].lo == doctest::Approx(-1.0));
  CHECK(levels[0].hi == doctest::Approx(1.0));
  CHECK(levels[0].chern == 1);
  CHECK(levels[1].lo == doctest::Approx(1.0));
  CHECK(levels[1].chern == 2);
  CHECK(gluing_product(levels[1].chern, levels[0].chern) == kM1);

  HarmonicOscillator2D o;
  const auto flat = chern_sequence(o, -1.0, 3.0);
  REQUIRE(flat.size() == 1);
  CHECK(flat[0].chern == 1);
}

TEST_CASE("branch tracking") {
  // A quantity winding once along the loop.
  const auto loop = LoopPath::circle({0.0, 0.0}, 1.0, 16);
  auto winding = [](EMValue v) { return frac01(std::atan2(v.j, v.h) / (2.0 * pi)); };
  const TrackResult t = track_along_loop(loop, winding, 0.4, 1024);
  CHECK(t.variation == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.samples >= 16);
  auto jumpy = [](EMValue v) { return v.j > 0.99 ? 0.5 : 0.0; };
  CHECK_THROWS_AS(track_along_loop(loop, jumpy, 0.4, 64), Error);
}
