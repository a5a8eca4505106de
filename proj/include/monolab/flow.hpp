#pragma once

#include <functional>
#include <span>
#include <vector>

#include "monolab/systems.hpp"

namespace monolab {

struct FlowOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  /// Maximum tolerated |dH| and |dJ| over a run.
  double drift_gate = 1e-9;
  double initial_step = 1e-3;
  double max_step = 0.5;
  std::size_t max_steps = 5'000'000;
  /// Event times are located to this absolute accuracy.
  double event_tol = 1e-12;
  /// Crossings earlier than this are ignored (start points on a section).
  double min_event_time = 1e-9;
  bool record_samples = false;
  /// Integrate -X_H instead of X_H.
  bool backward = false;
};

enum class Direction { Increasing, Decreasing, Either };

struct EventSpec {
  std::function<double(const Vec&)> fn;
  Direction direction = Direction::Either;
  bool terminal = false;
};

struct EventHit {
  std::size_t event = 0;
  double t = 0.0;
  Vec state;
  double value = 0.0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> states;
  std::vector<EventHit> hits;
  Vec final_state;
  double final_time = 0.0;
  /// max |H - H0| and |J - J0| over accepted steps.
  double drift_h = 0.0;
  double drift_j = 0.0;
  /// Integral of the optional rate functional along the run.
  double accumulated = 0.0;
  std::size_t steps = 0;
  bool terminated = false;
};

/// Optional scalar integrated alongside the flow: d(acc)/dt = rate(x, xdot).
using RateFunction = std::function<double(const Vec& x, const Vec& xdot)>;

/// Adaptive Dormand-Prince 5(4) integration of the H-flow with constraint
/// projection after each accepted step, drift monitoring and event location.
/// Throws DriftExceeded when the conserved quantities wander past the gate.
Trajectory integrate(const System& system, const Vec& start, double t_end, std::span<const EventSpec> events = {},
                     const FlowOptions& options = {}, const RateFunction& rate = nullptr);

/// Closed-form J-flow.
Vec j_flow(const System& system, const Vec& start, double angle);

/// Generic engine used by `integrate`; exposed for tests on plain ODEs.
/// `project` may be null.
Trajectory integrate_field(const std::function<Vec(const Vec&)>& field, const Vec& start, double t_end,
                           std::span<const EventSpec> events, const FlowOptions& options,
                           const std::function<Vec(const Vec&)>& project = nullptr,
                           const std::function<void(const Vec&)>& on_step = nullptr);

}  // namespace monolab
