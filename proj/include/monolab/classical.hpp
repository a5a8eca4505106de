#pragma once

#include <string>
#include <vector>

#include "monolab/flow.hpp"
#include "monolab/loop.hpp"
#include "monolab/rational.hpp"

namespace monolab {

struct RotationOptions {
  FlowOptions flow;
  /// Give up on a first return after this much time.
  double t_max = 2000.0;
  /// Tolerance of the check phi_J^{2 pi theta}(x) = phi_H^T(x).
  double self_check_tol = 1e-7;
};

struct RotationRecord {
  EMValue em;
  Vec start;
  /// First-return time to the J-orbit of `start`.
  double T = 0.0;
  /// Rotation number lifted by the accumulated connection angle.
  double theta = 0.0;
  /// theta modulo 1, in [0, 1).
  double theta_mod = 0.0;
  /// |phi_J^{2 pi theta}(start) - phi_H^T(start)|
  double check_residual = 0.0;
};

/// Point on F^{-1}(em), seeded on the system's reduced section and polished
/// by minimum-norm Newton to |F - em| <= tol. Throws CriticalValue at
/// critical values and Seeding if Newton fails.
Vec torus_point(const System& system, EMValue em, double tol = 1e-10);

/// Angle s in [0, 2 pi) with phi_J^s(x) closest to y.
double orbit_angle(const System& system, const Vec& x, const Vec& y);

/// H-flow from torus_point(em) to its first return to the section level,
/// with the connection angle integral of <X_J, xdot> / |X_J|^2.
struct FirstReturn {
  Vec start;
  Vec end;
  double T = 0.0;
  double connection = 0.0;
};
FirstReturn first_return(const System& system, EMValue em, const RotationOptions& options = {});

RotationRecord rotation_number(const System& system, EMValue em, const RotationOptions& options = {});

struct MonodromyOptions {
  RotationOptions rotation;
  /// Largest tolerated jump of theta between neighbouring samples.
  double jump_gate = 0.4;
  int max_samples = 4096;
  /// Accepted distance of the variation from the nearest integer.
  double rounding_gate = 0.01;
};

struct MonodromyResult {
  RationalMatrix matrix;
  /// Unrounded off-diagonal entry.
  double m_raw = 0.0;
  std::string method;
  int samples = 0;
  /// Branch-tracked values along the loop (closing sample included).
  std::vector<EMValue> values;
  std::vector<double> track;
  double max_check_residual = 0.0;
};

/// m = -(variation of theta along the loop).
MonodromyResult monodromy_by_rotation(const System& system, const LoopPath& loop, const MonodromyOptions& options = {});

/// Branch-tracks a mod-1 quantity along the loop: `eval` returns the value at
/// a loop point (any representative). Samples double until every step is
/// below the gate. Shared by the rotation, quotient and scattering pipelines.
struct TrackResult {
  std::vector<EMValue> values;
  std::vector<double> track;
  double variation = 0.0;
  int samples = 0;
};
TrackResult track_along_loop(const LoopPath& loop, const std::function<double(EMValue)>& eval, double jump_gate,
                             int max_samples);

/// [[1, m],[0,1]] from a real variation, enforcing the rounding gate.
RationalMatrix round_unipotent(double m_raw, double rounding_gate);

struct FixedPointRecord {
  Vec state;
  EMValue value;
  /// Isotropy weights, larger first.
  int m = 0;
  int n = 0;
  /// +1 anti-Hopf (weights of opposite sign), -1 Hopf.
  int sign = 0;
  /// Largest |real part| or |omega - weight| seen in the linearisation.
  double residual = 0.0;
};

/// Isolated J-flow fixed points found by Newton from a regular grid over the
/// system's chart box (11 points per chart dimension by default).
std::vector<Vec> find_fixed_points(const System& system, int per_dim = 11);
std::vector<Vec> find_fixed_points(const System& system, const ChartBox& box, int per_dim);

/// Throws DegenerateFixedPoint for non-semisimple, non-integer or
/// zero weights, InvalidInput if `x` is not fixed.
FixedPointRecord isotropy_weights(const System& system, const Vec& x);

/// Orthonormal real basis (columns, ambient coordinates) of the invariant
/// plane on which the linearised circle action at the fixed point x rotates
/// with speed |weight|.
Mat weight_plane(const System& system, const Vec& x, int weight);

struct FixedPointMonodromy {
  RationalMatrix matrix;
  std::vector<FixedPointRecord> inside;
  /// Winding number of the loop around each enclosed fixed value.
  std::vector<int> winding;
};

/// [[1, sum of winding * sign],[0,1]] over fixed points whose value lies
/// inside the loop. Throws RepositionLoop when a fixed value is within
/// `margin` of the loop.
FixedPointMonodromy monodromy_by_fixed_points(const System& system, const LoopPath& loop, double margin = 1e-6);

struct ChernLevel {
  double lo = 0.0;
  double hi = 0.0;
  int chern = 0;
};

/// Chern numbers of the circle bundles over energy levels between the
/// critical values of H inside (lo, hi). Starts at 1 above the minimum and
/// adds the sign of each later critical fixed point.
std::vector<ChernLevel> chern_sequence(const System& system, double lo, double hi);

/// [[1,c1],[0,1]] * [[1,c2],[0,1]]^{-1}
RationalMatrix gluing_product(long long c1, long long c2);

}  // namespace monolab
