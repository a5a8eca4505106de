#include "monolab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "monolab/errors.hpp"

namespace monolab {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
  Vec x;
  Vec k7;  // field at the new point (first stage of the next step)
  double error = 0.0;
};

using Field = std::function<Vec(const Vec&)>;

StepResult dopri_step(const Field& f, const Vec& x, const Vec& k1, double h, double rtol, double atol) {
  const Vec k2 = f(x + h * a21 * k1);
  const Vec k3 = f(x + h * (a31 * k1 + a32 * k2));
  const Vec k4 = f(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const Vec k5 = f(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Vec k6 = f(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  StepResult out;
  out.x = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  out.k7 = f(out.x);
  const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * out.k7);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double scale = atol + rtol * std::max(std::abs(x[i]), std::abs(out.x[i]));
    acc += (err[i] / scale) * (err[i] / scale);
  }
  out.error = std::sqrt(acc / static_cast<double>(x.size()));
  return out;
}

bool crossed(double g0, double g1, Direction dir) {
  const bool up = g0 < 0.0 && g1 >= 0.0;
  const bool down = g0 > 0.0 && g1 <= 0.0;
  switch (dir) {
    case Direction::Increasing: return up;
    case Direction::Decreasing: return down;
    case Direction::Either: return up || down;
  }
  return false;
}

}  // namespace

Trajectory integrate_field(const Field& field, const Vec& start, double t_end, std::span<const EventSpec> events,
                           const FlowOptions& opt, const Field& project,
                           const std::function<void(const Vec&)>& on_step) {
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidInput, "integration horizon must be positive");
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0))
    throw Error(ErrorKind::InvalidInput, "integration tolerances must be positive");
  const Field f = opt.backward ? Field([&](const Vec& x) { return Vec(-field(x)); }) : field;

  Trajectory traj;
  Vec x = project ? project(start) : start;
  double t = 0.0;
  double h = std::min(opt.initial_step, t_end);
  Vec k1 = f(x);
  std::vector<double> g_prev(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].fn(x);
  if (opt.record_samples) {
    traj.t.push_back(t);
    traj.states.push_back(x);
  }

  while (t < t_end) {
    if (traj.steps >= opt.max_steps)
      throw Error(ErrorKind::NoReturn, "step budget exhausted before the integration horizon");
    h = std::min({h, t_end - t, opt.max_step});
    StepResult step = dopri_step(f, x, k1, h, opt.rtol, opt.atol);
    if (!step.x.allFinite()) {
      h *= 0.25;
      if (h < 1e-14) throw Error(ErrorKind::DriftExceeded, "integration produced non-finite values");
      continue;
    }
    if (step.error > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(step.error, -0.2));
      if (h < 1e-14) throw Error(ErrorKind::DriftExceeded, "step size underflow");
      continue;
    }
    Vec x_new = project ? project(step.x) : step.x;
    const Vec k_new = project ? f(x_new) : step.k7;
    const double t_new = t + h;
    ++traj.steps;

    // Earliest event in this step.
    bool stop = false;
    double t_hit_min = t_new;
    std::vector<EventHit> step_hits;
    for (std::size_t e = 0; e < events.size(); ++e) {
      const double g1 = events[e].fn(x_new);
      if (crossed(g_prev[e], g1, events[e].direction) && t_new > opt.min_event_time) {
        const Vec x0 = x;
        const Vec k0 = k1;
        auto g_of = [&](double tau) {
          if (tau <= 0.0) return g_prev[e];
          Vec y = dopri_step(f, x0, k0, tau, opt.rtol, opt.atol).x;
          if (project) y = project(y);
          return events[e].fn(y);
        };
        const double ga = g_prev[e];
        const double gb = g_of(h);
        if ((ga > 0.0) == (gb > 0.0) && gb != 0.0)
          throw Error(ErrorKind::MissedEvent, "event root not bracketed within the step");
        std::uintmax_t iters = 200;
        auto tol = [&](double lo, double hi) { return hi - lo <= opt.event_tol; };
        const auto r = boost::math::tools::toms748_solve(g_of, 0.0, h, ga, gb, tol, iters);
        const double tau = r.second;
        Vec y = dopri_step(f, x0, k0, tau, opt.rtol, opt.atol).x;
        if (project) y = project(y);
        EventHit hit{e, t + tau, y, events[e].fn(y)};
        if (t + tau < opt.min_event_time) {
          g_prev[e] = g1;
          continue;
        }
        step_hits.push_back(hit);
        if (events[e].terminal) {
          stop = true;
          t_hit_min = std::min(t_hit_min, hit.t);
        }
      }
      g_prev[e] = g1;
    }
    std::sort(step_hits.begin(), step_hits.end(), [](const EventHit& a, const EventHit& b) { return a.t < b.t; });
    for (auto& hit : step_hits) {
      if (hit.t <= t_hit_min) traj.hits.push_back(hit);
    }

    if (stop) {
      // Finish exactly on the terminal event.
      const auto it = std::find_if(traj.hits.rbegin(), traj.hits.rend(),
                                   [&](const EventHit& hh) { return events[hh.event].terminal; });
      if (on_step) on_step(it->state);
      traj.final_state = it->state;
      traj.final_time = it->t;
      traj.terminated = true;
      if (opt.record_samples) {
        traj.t.push_back(it->t);
        traj.states.push_back(it->state);
      }
      return traj;
    }

    x = std::move(x_new);
    k1 = k_new;
    t = t_new;
    if (on_step) on_step(x);
    if (opt.record_samples) {
      traj.t.push_back(t);
      traj.states.push_back(x);
    }
    const double fac = step.error > 0.0 ? 0.9 * std::pow(step.error, -0.2) : 5.0;
    h *= std::clamp(fac, 0.2, 5.0);
  }
  traj.final_state = x;
  traj.final_time = t;
  return traj;
}

Trajectory integrate(const System& system, const Vec& start, double t_end, std::span<const EventSpec> events,
                     const FlowOptions& options, const RateFunction& rate) {
  system.check_admissible(start, 1e-8);
  const int d = system.dim();
  const double h0 = system.hamiltonian(start);
  const double j0 = system.momentum(start);
  double drift_h = 0.0, drift_j = 0.0;

  // The optional accumulator rides along as one extra state component.
  const bool aug = static_cast<bool>(rate);
  Vec x0 = start;
  if (aug) {
    x0.conservativeResize(d + 1);
    x0[d] = 0.0;
  }
  auto field = [&](const Vec& x) -> Vec {
    if (!aug) return system.vector_field_h(x);
    const Vec xs = x.head(d);
    const Vec v = system.vector_field_h(xs);
    Vec out(d + 1);
    out.head(d) = v;
    out[d] = rate(xs, v);
    return out;
  };
  std::function<Vec(const Vec&)> project;
  if (system.constrained()) {
    project = [&](const Vec& x) -> Vec {
      if (!aug) return system.project(x);
      Vec y = x;
      y.head(d) = system.project(x.head(d));
      return y;
    };
  }
  std::vector<EventSpec> wrapped;
  if (aug) {
    wrapped.reserve(events.size());
    for (const auto& e : events) {
      EventSpec w = e;
      auto fn = e.fn;
      w.fn = [fn, d](const Vec& x) { return fn(x.head(d)); };
      wrapped.push_back(std::move(w));
    }
  }
  auto on_step = [&](const Vec& x) {
    const Vec xs = x.head(d);
    drift_h = std::max(drift_h, std::abs(system.hamiltonian(xs) - h0));
    drift_j = std::max(drift_j, std::abs(system.momentum(xs) - j0));
    if (drift_h > options.drift_gate || drift_j > options.drift_gate) {
      std::ostringstream msg;
      msg << system.name() << ": conserved-quantity drift |dH|=" << drift_h << ", |dJ|=" << drift_j
          << " exceeds gate " << options.drift_gate;
      throw Error(ErrorKind::DriftExceeded, msg.str());
    }
  };
  Trajectory traj = integrate_field(field, x0, t_end, aug ? std::span<const EventSpec>(wrapped) : events, options,
                                    project, on_step);
  traj.drift_h = drift_h;
  traj.drift_j = drift_j;
  if (aug) {
    traj.accumulated = traj.final_state[d];
    traj.final_state = Vec(traj.final_state.head(d));
    for (auto& hit : traj.hits) hit.state = Vec(hit.state.head(d));
    for (auto& s : traj.states) s = Vec(s.head(d));
  }
  return traj;
}

Vec j_flow(const System& system, const Vec& start, double angle) { return system.j_flow(start, angle); }

}  // namespace monolab
