#pragma once

#include <vector>

namespace monolab {

/// Symmetric tridiagonal matrix with diagonal `diag` (size n) and
/// off-diagonal `off` (size n - 1).
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }
  /// Number of eigenvalues strictly below x (Sturm sequence count).
  std::size_t count_below(double x) const;
  /// Gershgorin interval containing the spectrum.
  std::pair<double, double> bounds() const;
  /// Eigenvalues in [lo, hi], ascending, located by bisection to the
  /// resolution of double precision.
  std::vector<double> eigenvalues(double lo, double hi) const;
  /// Eigenvalue k (0-based, ascending).
  double eigenvalue(std::size_t k) const;
};

}  // namespace monolab
