#pragma once

#include <string>
#include <vector>

#include "monolab/loop.hpp"
#include "monolab/systems.hpp"

namespace monolab {

/// Rectangle in the image plane.
struct Window {
  double j_lo = -1.0, j_hi = 1.0;
  double h_lo = -1.0, h_hi = 1.0;
  bool contains(EMValue v) const { return v.j >= j_lo && v.j <= j_hi && v.h >= h_lo && v.h <= h_hi; }
};

enum class CriticalKind { Isolated, Branch };
std::string to_string(CriticalKind kind);

struct CriticalPoint {
  EMValue value;
  CriticalKind kind = CriticalKind::Branch;
  /// 0 or 1.
  int rank = 1;
  Vec state;
};

/// Critical values of F inside `window`. Seeds are resolution^2 Halton points
/// in the chart box; each is refined by Gauss-Newton on the condition that a
/// combination cos(a) dH + sin(a) dJ vanishes on the admissible manifold, and
/// kept when the smallest singular value of dF is below 1e-8. Rank-zero
/// points whose Hessians admit no definite combination are tagged isolated.
std::vector<CriticalPoint> bifurcation_diagram(const System& system, const Window& window, int resolution);
std::vector<CriticalPoint> bifurcation_diagram(const System& system, const Window& window, int resolution,
                                               const ChartBox& seeds);

/// Hessian of f + c.g restricted to the tangent space at x, with the
/// multipliers c fitted so that x is critical for the restriction.
Mat restricted_hessian(const System& system, const Vec& x, const std::function<Vec(const Vec&)>& grad);

/// Throws RepositionLoop if some loop sample lies within `margin` of a
/// critical value in `diagram`.
void check_loop_clearance(const std::vector<CriticalPoint>& diagram, const LoopPath& loop, double margin);

}  // namespace monolab
