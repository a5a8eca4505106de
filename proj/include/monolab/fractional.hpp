#pragma once

#include <string>
#include <vector>

#include "monolab/classical.hpp"

namespace monolab {

/// Point where the loop meets the image of an orbit with finite nontrivial
/// isotropy.
struct ExceptionalCrossing {
  /// Arc-length fraction along the loop.
  double fraction = 0.0;
  EMValue value;
  /// Order of the isotropy group.
  int order = 1;
  Vec state;
};

struct SeifertData {
  std::vector<FixedPointRecord> fixed_points;
  std::vector<int> winding;
  std::vector<ExceptionalCrossing> exceptional;
  std::vector<int> exceptional_orders;
  /// Sum of winding / (m n) over enclosed fixed points.
  Rational euler_raw;
  /// Reported Euler number, oriented so that an anti-Hopf point counts +1.
  Rational euler_number;
  long long N = 1;
};

/// Image curve of the weight plane of |weight| > 1 at each fixed point,
/// as a polyline in the image plane with the radii that produced it.
struct IsotropyCurve {
  Vec fixed_point;
  Mat plane;
  int weight = 0;
  std::vector<double> radii;
  std::vector<EMValue> values;
};
std::vector<IsotropyCurve> isotropy_curves(const System& system);

/// Minimal-period order of the J-orbit through x (1 for a free orbit).
/// Throws IsotropyAmbiguous when the orbit nearly closes at a time that is
/// not 2 pi / k.
int isotropy_order(const System& system, const Vec& x, double tol = 1e-8);

/// Fixed points inside the loop and crossings of the loop with curves of
/// exceptional orbits, assembled into Seifert data with exact arithmetic.
SeifertData isotropy_census(const System& system, const LoopPath& loop);

struct FractionalMatrix {
  RationalMatrix matrix;
  /// Integer statement on the sublattice, e.g. "2a0 -> 2a0 + b0, b0 -> b0".
  std::string transport;
};

/// [[1, e],[0,1]]; throws InconsistentData unless e N is an integer.
FractionalMatrix fractional_matrix(const SeifertData& data);
std::string transport_statement(Rational euler, long long n);

struct QuotientOptions {
  MonodromyOptions monodromy;
  /// Samples closer than this to an exceptional curve are not evaluated.
  double separatrix_gate = 1e-3;
};

struct QuotientResult {
  /// Integer monodromy of the torus bundle of the quotient by the isotropy group.
  RationalMatrix quotient_matrix;
  /// Quotient matrix expressed on the original lattice of cycles.
  RationalMatrix unquotiented;
  double m_raw = 0.0;
  /// Order of the isotropy group divided out.
  int order = 1;
  int samples = 0;
  std::vector<double> fractions;
  std::vector<EMValue> values;
  std::vector<double> track;
  /// Excluded intervals of loop fraction around each crossing.
  std::vector<std::pair<double, double>> gaps;
};

/// Rotation-number pipeline on the quotient by the isotropy group of the
/// exceptional orbits: the rotation number is measured against the quotient
/// circle action in invariant coordinates, tracked along the loop with the
/// crossings gated out, and m = -(variation).
QuotientResult quotient_monodromy(const System& system, const LoopPath& loop, const QuotientOptions& options = {});

}  // namespace monolab
