#include "monolab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "monolab/errors.hpp"

namespace monolab {

namespace {

constexpr double kPi = std::numbers::pi;

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

template <class F>
double integrate(F f, double a, double b, double tol = 1e-13) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol);
}

void require_scattering_value(EMValue em) {
  if (!(em.h > 0.0) || !std::isfinite(em.j))
    throw Error(ErrorKind::InvalidInput, "scattering needs h > 0 and finite j, got " + describe(em));
}

Vec state_on_line(const CentralForceSystem& system, const AsymptoticState& a, double radius, double h) {
  const double b = a.q_perp.norm();
  if (radius <= b) throw Error(ErrorKind::InvalidInput, "far-field radius inside the impact parameter");
  const double s = std::sqrt(radius * radius - b * b);
  const double along = a.side == AsymptoticSide::Incoming ? -s : s;
  const double v = std::sqrt(2.0 * (h - system.potential(radius)));
  Vec x(4);
  x.head<2>() = a.q_perp + along * a.p_hat;
  x.tail<2>() = v * a.p_hat;
  return x;
}

double polar_rate(const Vec& x, const Vec& xdot) {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  if (r2 < 1e-300) return 0.0;
  return (x[0] * xdot[1] - x[1] * xdot[0]) / r2;
}

}  // namespace

std::string to_string(DeflectionMethod method) {
  return method == DeflectionMethod::Trajectory ? "trajectory" : "quadrature";
}

double length_scale(const CentralForceSystem& system) {
  if (const auto* bump = dynamic_cast<const RadialScattering*>(&system)) return bump->sigma();
  return 1.0;
}

Vec incoming_state(const CentralForceSystem& system, EMValue em, double radius, double direction) {
  require_scattering_value(em);
  const double v = std::sqrt(2.0 * (em.h - system.potential(radius)));
  AsymptoticState a;
  a.p_hat = {std::cos(direction), std::sin(direction)};
  // (b n) x (v p_hat) = b v for n = (sin, -cos).
  a.q_perp = (em.j / v) * Eigen::Vector2d(std::sin(direction), -std::cos(direction));
  a.speed = v;
  return state_on_line(system, a, radius, em.h);
}

AsymptoticState asymptote(const Vec& x, AsymptoticSide side) {
  AsymptoticState a;
  const Eigen::Vector2d q = x.head<2>(), p = x.tail<2>();
  a.speed = p.norm();
  if (a.speed == 0.0) throw Error(ErrorKind::InvalidInput, "asymptote of a state at rest");
  a.p_hat = p / a.speed;
  a.q_perp = q - q.dot(a.p_hat) * a.p_hat;
  a.side = side;
  return a;
}

ScatteringRun scatter(const CentralForceSystem& system, const Vec& start, const ScatteringOptions& options) {
  const double r0 = start.head<2>().norm();
  const double r02 = r0 * r0;
  EventSpec out_event{[r02](const Vec& x) { return x[0] * x[0] + x[1] * x[1] - r02; }, Direction::Increasing, true};
  const std::vector<EventSpec> events{out_event};
  Trajectory tr;
  try {
    tr = integrate(system, start, options.t_max, events, options.flow, polar_rate);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoReturn) throw;
    throw Error(ErrorKind::Captured, system.name() + ": trajectory exhausted its step budget near the bump");
  }
  if (!tr.terminated) {
    std::ostringstream msg;
    msg << system.name() << ": trajectory did not escape within t = " << options.t_max;
    throw Error(ErrorKind::Captured, msg.str());
  }
  ScatteringRun run;
  run.start = start;
  run.end = tr.final_state;
  const bool backward = options.flow.backward;
  run.incoming = asymptote(backward ? run.end : run.start, AsymptoticSide::Incoming);
  run.outgoing = asymptote(backward ? run.start : run.end, AsymptoticSide::Outgoing);
  run.swept = backward ? -tr.accumulated : tr.accumulated;
  run.time = tr.final_time;
  return run;
}

double scattering_turning_point(const CentralForceSystem& system, EMValue em) {
  require_scattering_value(em);
  auto g = [&](double r) { return system.radial_function(r, em); };
  const double scale = length_scale(system);
  const double r_top = 2.0 * std::abs(em.j) / std::sqrt(2.0 * em.h) + 10.0 * scale;
  constexpr int kSamples = 8000;
  double hi = r_top;
  for (int k = kSamples - 1; k >= 0; --k) {
    const double r = r_top * k / kSamples;
    if (g(r) <= 0.0) {
      if (r == 0.0 && em.j == 0.0) return 0.0;
      std::uintmax_t iters = 200;
      auto tol = [](double a, double b) { return b - a < 1e-15 * std::max(1.0, b); };
      const auto root = boost::math::tools::toms748_solve(g, r, hi, g(r), g(hi), tol, iters);
      const double rm = 0.5 * (root.first + root.second);
      const double slope = (g(rm + 1e-6) - g(rm - 1e-6)) / 2e-6;
      if (std::abs(slope) < 1e-8)
        throw Error(ErrorKind::Captured, system.name() + ": orbiting turning point at " + describe(em));
      return rm;
    }
    hi = r;
  }
  return 0.0;
}

DeflectionRecord deflection_angle(const CentralForceSystem& system, EMValue em, DeflectionMethod method,
                                  const ScatteringOptions& options) {
  require_scattering_value(em);
  DeflectionRecord rec{em, 0.0, method};
  if (em.j == 0.0) {
    rec.phi = em.h > system.potential(0.0) ? 0.5 : 0.0;
    return rec;
  }
  if (method == DeflectionMethod::Trajectory) {
    const double r0 = options.far_field * length_scale(system);
    const ScatteringRun run = scatter(system, incoming_state(system, em, r0), options);
    const double tail_in = std::asin(em.j / (run.incoming.speed * r0));
    const double tail_out = std::asin(em.j / (run.outgoing.speed * r0));
    rec.phi = (run.swept + tail_in + tail_out) / (2.0 * kPi);
    return rec;
  }
  // u = 1/r, then u = u_max sin(t) to absorb the turning-point singularity.
  const double r_min = scattering_turning_point(system, em);
  const double u_max = 1.0 / r_min;
  const double v_min = system.potential(r_min);
  // Radicand written as j^2 (u_max^2 - u^2) + 2 (V(r_min) - V(r)), which
  // vanishes exactly at the turning point.
  auto f = [&](double t) {
    const double u = u_max * std::sin(t);
    const double c = u_max * std::cos(t);
    const double d = em.j * em.j * c * c + 2.0 * (v_min - (u > 0.0 ? system.potential(1.0 / u) : 0.0));
    return d > 0.0 ? em.j * u_max * std::cos(t) / std::sqrt(d) : 0.0;
  };
  rec.phi = integrate(f, 0.0, 0.5 * kPi) / kPi;
  return rec;
}

ActionDifference radial_action_difference(const CentralForceSystem& system, EMValue em) {
  require_scattering_value(em);
  const double scale = length_scale(system);
  const double k = std::sqrt(2.0 * em.h);
  const double aj = std::abs(em.j);
  const double r_min = scattering_turning_point(system, em);
  const double r_ref = aj / k;
  const double a = std::max(r_min, r_ref) + scale;
  auto p = [&](double r) {
    const double d = 2.0 * (em.h - system.potential(r)) - (r > 0.0 ? em.j * em.j / (r * r) : 0.0);
    return d > 0.0 ? std::sqrt(d) : 0.0;
  };
  auto p_ref = [&](double r) { return std::sqrt(std::max(0.0, k * k - em.j * em.j / (r * r))); };
  // Inner piece with r = r_min + (a - r_min) s^2.
  const double w = a - r_min;
  const double inner = integrate([&](double s) { return p(r_min + w * s * s) * 2.0 * w * s; }, 0.0, 1.0);
  const double inner_ref = std::sqrt(k * k * a * a - em.j * em.j) - aj * std::acos(std::min(1.0, aj / (a * k)));
  auto truncated = [&](double R) {
    const double tail = integrate(
        [&](double r) {
          const double pr = p(r), qr = p_ref(r);
          return pr + qr > 0.0 ? -2.0 * system.potential(r) / (pr + qr) : 0.0;
        },
        a, R);
    return (inner - inner_ref + tail) / kPi;
  };
  ActionDifference out;
  out.radius = 40.0 * scale;
  for (int i = 0; i < 3; ++i) out.truncated[i] = truncated(out.radius * (1 << i));
  const double d1 = out.truncated[1] - out.truncated[0];
  const double d2 = out.truncated[2] - out.truncated[1];
  if (std::abs(d2) <= 1e-13 * std::max(1.0, std::abs(out.truncated[2]))) {
    out.value = out.truncated[2];
    return out;
  }
  const double ratio = d2 / d1;
  if (!(std::abs(ratio) < 0.75)) {
    std::ostringstream msg;
    msg << system.name() << ": action difference does not converge (successive changes " << d1 << ", " << d2
        << ")";
    throw Error(ErrorKind::LongRange, msg.str());
  }
  out.value = out.truncated[2] + d2 * ratio / (1.0 - ratio);
  return out;
}

double deflection_from_action(const CentralForceSystem& system, EMValue em, double step) {
  const double plus = radial_action_difference(system, {em.j + step, em.h}).value;
  const double minus = radial_action_difference(system, {em.j - step, em.h}).value;
  return 0.5 * sign(em.j) - (plus - minus) / (2.0 * step);
}

ScatteringMapSample scattering_map(const CentralForceSystem& system, const CentralForceSystem& reference, EMValue em,
                                   const ScatteringOptions& options) {
  require_scattering_value(em);
  const double r0 = options.far_field * length_scale(system);
  auto f_error = [&](const CentralForceSystem& s, const Vec& x) {
    const EMValue v = s.energy_momentum(x);
    return std::hypot(v.j - em.j, v.h - em.h);
  };
  ScatteringOptions back = options;
  back.flow.backward = true;

  // Reference orbit with incoming direction 0 and its incoming asymptote.
  const Vec ref_in = incoming_state(reference, em, r0);
  const AsymptoticState a_in = asymptote(ref_in, AsymptoticSide::Incoming);
  // Orbit of the system with the same incoming asymptote, and where it leaves.
  const ScatteringRun orbit = scatter(system, state_on_line(system, a_in, r0, em.h), options);
  // Reference orbit with that outgoing asymptote, run back to its incoming side.
  const Vec ref_out_state = state_on_line(reference, orbit.outgoing, r0, em.h);
  const ScatteringRun ref_back = scatter(reference, ref_out_state, back);

  ScatteringMapSample out;
  out.em = em;
  const Eigen::Vector2d d0 = a_in.p_hat, d1 = ref_back.incoming.p_hat;
  out.rotation = frac01(std::atan2(d0.x() * d1.y() - d0.y() * d1.x(), d0.dot(d1)) / (2.0 * kPi));
  out.reference_residual = f_error(reference, ref_in) + f_error(reference, ref_back.end);
  return out;
}

ScatteringMonodromy scattering_monodromy(const CentralForceSystem& system, const CentralForceSystem& reference,
                                         const LoopPath& loop, const ScatteringMonodromyOptions& options) {
  ScatteringMonodromy out;
  const TrackResult phi = track_along_loop(
      loop, [&](EMValue em) { return deflection_angle(system, em, options.method, options.scattering).phi; },
      options.jump_gate, options.max_samples);
  out.variation = phi.variation;
  out.m_raw = -phi.variation;
  out.matrix = round_unipotent(out.m_raw, options.rounding_gate);
  out.samples = phi.samples;
  out.values = phi.values;
  out.phi = phi.track;

  std::mutex mutex;
  std::map<std::pair<double, double>, ScatteringMapSample> records;
  const TrackResult map = track_along_loop(
      loop,
      [&](EMValue em) {
        const ScatteringMapSample s = scattering_map(system, reference, em, options.scattering);
        std::lock_guard lock(mutex);
        records[{em.j, em.h}] = s;
        return s.rotation;
      },
      options.jump_gate, options.max_samples);
  out.map_variation = map.variation;
  out.map_matrix = round_unipotent(-map.variation, options.rounding_gate);
  for (std::size_t i = 0; i + 1 < map.values.size(); ++i) {
    const ScatteringMapSample& s = records.at({map.values[i].j, map.values[i].h});
    out.max_reference_residual = std::max(out.max_reference_residual, s.reference_residual);
    out.map_samples.push_back(s);
  }
  if (out.max_reference_residual > options.reference_tol) {
    std::ostringstream msg;
    msg << "reference dynamics does not preserve F: residual " << out.max_reference_residual;
    throw Error(ErrorKind::InconsistentData, msg.str());
  }
  return out;
}

}  // namespace monolab
