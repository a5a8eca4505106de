#pragma once

#include <string>
#include <vector>

#include "monolab/classical.hpp"

namespace monolab {

enum class DeflectionMethod { Trajectory, Quadrature };
std::string to_string(DeflectionMethod method);

/// Total polar-angle sweep of a scattering trajectory, in turns.
struct DeflectionRecord {
  EMValue em;
  double phi = 0.0;
  DeflectionMethod method = DeflectionMethod::Trajectory;
};

enum class AsymptoticSide { Incoming, Outgoing };

/// Free-motion asymptote of a scattering trajectory.
struct AsymptoticState {
  /// Unit direction of motion.
  Eigen::Vector2d p_hat;
  /// Point of closest approach of the asymptotic line, orthogonal to p_hat.
  Eigen::Vector2d q_perp;
  double speed = 0.0;
  AsymptoticSide side = AsymptoticSide::Incoming;
};

struct ScatteringOptions {
  FlowOptions flow;
  /// Far-field radius in units of the bump width.
  double far_field = 50.0;
  /// Trajectories that have not escaped by this time count as captured.
  double t_max = 1e4;
};

/// Incoming far-field state with momentum along +x, impact parameter set by j.
Vec incoming_state(const CentralForceSystem& system, EMValue em, double radius, double direction = 0.0);

/// Asymptote of the free line through `x` (position, momentum).
AsymptoticState asymptote(const Vec& x, AsymptoticSide side);

struct ScatteringRun {
  Vec start;
  Vec end;
  AsymptoticState incoming;
  AsymptoticState outgoing;
  /// Polar angle swept between the far-field crossings.
  double swept = 0.0;
  double time = 0.0;
};

/// Integrates from the far-field circle back out to it. Throws Captured if
/// the trajectory does not escape before t_max.
ScatteringRun scatter(const CentralForceSystem& system, const Vec& start, const ScatteringOptions& options = {});

/// At j = 0 the value is the one-sided limit modulo 1: 1/2 if the orbit
/// passes the centre, 0 if it is reflected.
DeflectionRecord deflection_angle(const CentralForceSystem& system, EMValue em,
                                  DeflectionMethod method = DeflectionMethod::Trajectory,
                                  const ScatteringOptions& options = {});

/// Bump width of the radial-bump system, 1 otherwise.
double length_scale(const CentralForceSystem& system);

/// Outermost turning point of the incoming radial motion.
double scattering_turning_point(const CentralForceSystem& system, EMValue em);

struct ActionDifference {
  double value = 0.0;
  /// Truncated differences at R, 2R and 4R.
  double truncated[3] = {0.0, 0.0, 0.0};
  double radius = 0.0;
};

/// (1/pi) int p_r dr - (1/pi) int p_r^free dr, truncated at R = 40, 80 and
/// 160 length scales and extrapolated geometrically. Throws LongRange
/// when the truncations do not settle.
ActionDifference radial_action_difference(const CentralForceSystem& system, EMValue em);

/// sign(j)/2 - d(action difference)/dj by central differences.
double deflection_from_action(const CentralForceSystem& system, EMValue em, double step = 1e-4);

struct ScatteringMonodromyOptions {
  ScatteringOptions scattering;
  DeflectionMethod method = DeflectionMethod::Trajectory;
  double jump_gate = 0.4;
  int max_samples = 4096;
  double rounding_gate = 0.01;
  /// Tolerated mismatch of F between an orbit and its reference images.
  double reference_tol = 1e-8;
};

struct ScatteringMapSample {
  EMValue em;
  /// Rotation of the outgoing direction relative to the reference, in turns.
  double rotation = 0.0;
  /// |F(reference in) - F| + |F(reference out) - F|
  double reference_residual = 0.0;
};

struct ScatteringMonodromy {
  RationalMatrix matrix;
  double variation = 0.0;
  double m_raw = 0.0;
  int samples = 0;
  std::vector<EMValue> values;
  std::vector<double> phi;
  /// Scattering-map realisation on the trajectory space over the loop.
  RationalMatrix map_matrix;
  double map_variation = 0.0;
  std::vector<ScatteringMapSample> map_samples;
  double max_reference_residual = 0.0;
};

/// Scattering map on the orbit space of one fiber: reference trajectory with
/// incoming asymptote a -> orbit with that asymptote -> reference trajectory
/// with the orbit's outgoing asymptote. Returns the induced rotation.
ScatteringMapSample scattering_map(const CentralForceSystem& system, const CentralForceSystem& reference,
                                   EMValue em, const ScatteringOptions& options = {});

/// m = -(variation of the deflection angle); the scattering map against
/// `reference` gives map_matrix from the variation of its rotation.
ScatteringMonodromy scattering_monodromy(const CentralForceSystem& system, const CentralForceSystem& reference,
                                         const LoopPath& loop, const ScatteringMonodromyOptions& options = {});

}  // namespace monolab
