#include "monolab/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "monolab/errors.hpp"
#include "monolab/parallel.hpp"

namespace monolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double segment_distance(EMValue p, EMValue a, EMValue b) {
  const double dx = b.h - a.h, dy = b.j - a.j;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.h - a.h) * dx + (p.j - a.j) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.h - a.h - t * dx, p.j - a.j - t * dy);
}

double curve_distance(const IsotropyCurve& c, EMValue p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < c.values.size(); ++i) best = std::min(best, segment_distance(p, c.values[i], c.values[i + 1]));
  return best;
}

/// Parameters (s along a, t along b) of the intersection of two segments.
bool intersect(EMValue a0, EMValue a1, EMValue b0, EMValue b1, double& s, double& t) {
  const double rx = a1.h - a0.h, ry = a1.j - a0.j;
  const double qx = b1.h - b0.h, qy = b1.j - b0.j;
  const double den = rx * qy - ry * qx;
  if (den == 0.0) return false;
  const double wx = b0.h - a0.h, wy = b0.j - a0.j;
  s = (wx * qy - wy * qx) / den;
  t = (wx * ry - wy * rx) / den;
  return s >= 0.0 && s < 1.0 && t >= 0.0 && t < 1.0;
}

long long lcm_all(const std::vector<int>& v) {
  long long n = 1;
  for (int k : v) n = std::lcm(n, static_cast<long long>(k));
  return n;
}

}  // namespace

std::vector<IsotropyCurve> isotropy_curves(const System& system) {
  std::vector<IsotropyCurve> out;
  for (const Vec& x0 : find_fixed_points(system)) {
    const FixedPointRecord rec = isotropy_weights(system, x0);
    for (int w : {rec.m, rec.n}) {
      if (std::abs(w) <= 1) continue;
      IsotropyCurve c;
      c.fixed_point = x0;
      c.plane = weight_plane(system, x0, w);
      c.weight = w;
      constexpr int kPoints = 4000;
      constexpr double kRadius = 4.0;
      for (int i = 1; i <= kPoints; ++i) {
        const double rho = kRadius * (static_cast<double>(i) / kPoints) * (static_cast<double>(i) / kPoints);
        const Vec x = system.project(x0 + rho * c.plane.col(0));
        c.radii.push_back(rho);
        c.values.push_back(system.energy_momentum(x));
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

int isotropy_order(const System& system, const Vec& x, double tol) {
  constexpr int kMaxOrder = 12;
  const double scale = std::max(1.0, x.norm());
  if (system.vector_field_j(x).norm() < 1e-10) throw Error(ErrorKind::InvalidInput, "state is fixed by the circle action");
  int order = 0;
  for (int k = kMaxOrder; k >= 1; --k) {
    if ((system.j_flow(x, kTwoPi / k) - x).norm() < tol * scale) {
      order = k;
      break;
    }
  }
  if (order == 0) throw Error(ErrorKind::IsotropyAmbiguous, "circle-action orbit does not close after 2 pi");
  // No near return strictly inside the minimal period.
  const double period = kTwoPi / order;
  constexpr int kScan = 720;
  for (int i = 1; i < kScan; ++i) {
    const double t = period * i / kScan;
    if (t < 0.02 * period || t > 0.98 * period) continue;
    if ((system.j_flow(x, t) - x).norm() < 1e-6 * scale)
      throw Error(ErrorKind::IsotropyAmbiguous, "circle-action orbit nearly closes at a non-integer period ratio");
  }
  return order;
}

SeifertData isotropy_census(const System& system, const LoopPath& loop) {
  loop.validate();
  SeifertData data;
  for (const Vec& x : find_fixed_points(system)) {
    const EMValue v = system.energy_momentum(x);
    if (loop.distance_to(v) < 1e-6)
      throw Error(ErrorKind::RepositionLoop, system.name() + ": a fixed value lies on the loop");
    const int w = loop.winding_number(v);
    if (w == 0) continue;
    FixedPointRecord rec = isotropy_weights(system, x);
    data.euler_raw += Rational(w, static_cast<long long>(rec.m) * rec.n);
    data.fixed_points.push_back(std::move(rec));
    data.winding.push_back(w);
  }
  // Exceptional orbits met by the preimage of the loop.
  const double total = loop.length();
  for (const auto& curve : isotropy_curves(system)) {
    double arc = 0.0;
    for (std::size_t k = 0; k + 1 < loop.vertices.size(); ++k) {
      const EMValue a0 = loop.vertices[k], a1 = loop.vertices[k + 1];
      const double seg = std::hypot(a1.h - a0.h, a1.j - a0.j);
      for (std::size_t i = 0; i + 1 < curve.values.size(); ++i) {
        double s = 0.0, t = 0.0;
        if (!intersect(a0, a1, curve.values[i], curve.values[i + 1], s, t)) continue;
        ExceptionalCrossing c;
        c.fraction = (arc + s * seg) / total;
        c.value = {a0.j + s * (a1.j - a0.j), a0.h + s * (a1.h - a0.h)};
        const double rho = curve.radii[i] + t * (curve.radii[i + 1] - curve.radii[i]);
        c.state = system.project(curve.fixed_point + rho * curve.plane.col(0));
        c.order = isotropy_order(system, c.state);
        if (c.order > 1) data.exceptional.push_back(std::move(c));
      }
      arc += seg;
    }
  }
  std::sort(data.exceptional.begin(), data.exceptional.end(),
            [](const ExceptionalCrossing& a, const ExceptionalCrossing& b) { return a.fraction < b.fraction; });
  for (const auto& c : data.exceptional) data.exceptional_orders.push_back(c.order);
  data.N = lcm_all(data.exceptional_orders);
  data.euler_number = -data.euler_raw;
  return data;
}

std::string transport_statement(Rational euler, long long n) {
  const Rational k = euler * Rational(n);
  auto multiple = [](Rational c, const std::string& name) {
    if (c == Rational(1)) return name;
    if (c == Rational(-1)) return "-" + name;
    return to_string(c) + name;
  };
  std::ostringstream s;
  const std::string a = multiple(Rational(n), "a0");
  s << a << " -> " << a;
  if (k > Rational(0))
    s << " + " << multiple(k, "b0");
  else if (k < Rational(0))
    s << " - " << multiple(-k, "b0");
  s << ", b0 -> b0";
  return s.str();
}

FractionalMatrix fractional_matrix(const SeifertData& data) {
  if (data.N < 1) throw Error(ErrorKind::InconsistentData, "N must be positive");
  const Rational k = data.euler_number * Rational(data.N);
  if (k.denominator() != 1) {
    std::ostringstream msg;
    msg << "euler number " << to_string(data.euler_number) << " times N = " << data.N << " is not an integer";
    throw Error(ErrorKind::InconsistentData, msg.str());
  }
  return {RationalMatrix::unipotent(data.euler_number), transport_statement(data.euler_number, data.N)};
}

namespace {

/// Rotation number against the quotient circle action, modulo 1 and lifted.
double quotient_rotation(const System& system, EMValue em, int order, const RotationOptions& options) {
  const FirstReturn ret = first_return(system, em, options);
  const double lift = order * ret.connection / kTwoPi;
  if (dynamic_cast<const Resonance1m2*>(&system) && order == 2) {
    // Invariants of the half-turn: u = z^2 and w; the quotient action is
    // (e^{is} u, e^{-is} w).
    auto invariants = [](const Vec& x) {
      const std::complex<double> z(x[2], x[0]), w(x[3], x[1]);
      return std::pair{z * z, w};
    };
    const auto [ux, wx] = invariants(ret.start);
    const auto [uy, wy] = invariants(ret.end);
    const double s = -std::arg(ux * std::conj(uy) + std::conj(wx) * wy);
    const std::complex<double> rot = std::polar(1.0, s);
    const double residual = std::hypot(std::abs(rot * ux - uy), std::abs(std::conj(rot) * wx - wy));
    if (residual > options.self_check_tol) {
      std::ostringstream msg;
      msg << "quotient return point is off the quotient orbit by " << residual;
      throw Error(ErrorKind::InconsistentData, msg.str());
    }
    return nearest_branch(frac01(s / kTwoPi), lift);
  }
  if (order == 1) return rotation_number(system, em, options).theta;
  throw Error(ErrorKind::Unsupported, system.name() + ": no invariant coordinates for this quotient");
}

}  // namespace

QuotientResult quotient_monodromy(const System& system, const LoopPath& loop, const QuotientOptions& options) {
  loop.validate();
  const auto curves = isotropy_curves(system);
  std::vector<int> weights;
  for (const auto& c : curves) weights.push_back(std::abs(c.weight));
  const int order = static_cast<int>(lcm_all(weights));
  const SeifertData census = isotropy_census(system, loop);

  // Gaps of loop fraction around each crossing where the distance to the
  // exceptional curve is below the gate.
  auto dist = [&](double f) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : curves) d = std::min(d, curve_distance(c, loop.at(f)));
    return d;
  };
  QuotientResult out;
  out.order = order;
  const double gate = options.separatrix_gate;
  for (const auto& c : census.exceptional) {
    std::pair<double, double> gap;
    for (int side : {-1, 1}) {
      double step = 1e-4;
      while (dist(c.fraction + side * step) < gate) {
        step *= 2.0;
        if (step > 0.25) throw Error(ErrorKind::RepositionLoop, "loop runs along the exceptional curve");
      }
      auto g = [&](double t) { return dist(c.fraction + side * t) - gate; };
      std::uintmax_t iters = 100;
      auto tol = [](double a, double b) { return b - a < 1e-12; };
      const auto r = boost::math::tools::toms748_solve(g, 0.0, step, g(0.0), g(step), tol, iters);
      const double f = c.fraction + side * 0.5 * (r.first + r.second);
      (side < 0 ? gap.first : gap.second) = f;
    }
    out.gaps.push_back(gap);
  }
  auto in_gap = [&](double f) {
    for (const auto& [a, b] : out.gaps) {
      const double fa = a - std::floor(a), len = b - a;
      double d = f - fa;
      d -= std::floor(d);
      if (d > 0.0 && d < len) return true;
    }
    return false;
  };

  std::map<double, double> cache;
  const auto& mo = options.monodromy;
  for (int n = loop.samples;; n *= 2) {
    std::vector<double> fr;
    for (int k = 0; k < n; ++k) {
      const double f = static_cast<double>(k) / n;
      if (!in_gap(f)) fr.push_back(f);
    }
    for (const auto& [a, b] : out.gaps) {
      fr.push_back(a - std::floor(a));
      fr.push_back(b - std::floor(b));
    }
    std::sort(fr.begin(), fr.end());
    std::vector<double> todo;
    for (double f : fr)
      if (!cache.count(f)) todo.push_back(f);
    std::vector<double> vals(todo.size());
    parallel_for(todo.size(), [&](std::size_t i) { vals[i] = quotient_rotation(system, loop.at(todo[i]), order, mo.rotation); });
    for (std::size_t i = 0; i < todo.size(); ++i) cache[todo[i]] = vals[i];

    std::vector<double> track{cache[fr[0]]};
    bool refine = false;
    for (std::size_t k = 1; k <= fr.size(); ++k) {
      const double next = nearest_branch(cache[fr[k % fr.size()]], track.back());
      if (std::abs(next - track.back()) > mo.jump_gate) {
        const double a = fr[k - 1], b = fr[k % fr.size()];
        bool across_gap = false;
        for (const auto& [ga, gb] : out.gaps)
          across_gap = across_gap || (std::abs(a - (ga - std::floor(ga))) < 1e-15 && std::abs(b - (gb - std::floor(gb))) < 1e-15);
        if (across_gap) {
          std::ostringstream msg;
          msg << "quotient rotation number jumps by " << next - track.back()
              << " across the exceptional crossing; increase the separatrix gate";
          throw Error(ErrorKind::InconsistentData, msg.str());
        }
        refine = true;
        break;
      }
      track.push_back(next);
    }
    if (refine) {
      if (2 * n > mo.max_samples) throw Error(ErrorKind::BranchJump, "quotient branch tracking did not settle");
      continue;
    }
    out.samples = static_cast<int>(fr.size());
    out.fractions = fr;
    out.fractions.push_back(fr.front() + 1.0);
    for (double f : out.fractions) out.values.push_back(loop.at(f));
    out.track = track;
    out.m_raw = -(track.back() - track.front());
    out.quotient_matrix = round_unipotent(out.m_raw, mo.rounding_gate);
    out.unquotiented = RationalMatrix::unipotent(out.quotient_matrix(0, 1) / Rational(order));
    return out;
  }
}

}  // namespace monolab
