#include "monolab/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "monolab/errors.hpp"

namespace monolab {

std::size_t Tridiagonal::count_below(double x) const {
  const double tiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double e2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
    q = diag[i] - x - (i == 0 ? 0.0 : e2 / q);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

std::pair<double, double> Tridiagonal::bounds() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < diag.size() ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  return {lo, hi};
}

double Tridiagonal::eigenvalue(std::size_t k) const {
  if (k >= size()) throw Error(ErrorKind::InvalidInput, "eigenvalue index out of range");
  auto [lo, hi] = bounds();
  const double pad = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  lo -= pad;
  hi += pad;
  // Invariant: count_below(lo) <= k < count_below(hi).
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> Tridiagonal::eigenvalues(double lo, double hi) const {
  if (diag.empty()) return {};
  if (off.size() + 1 != diag.size()) throw Error(ErrorKind::InvalidInput, "tridiagonal size mismatch");
  const std::size_t first = count_below(lo);
  const std::size_t last = std::min(count_below(std::nextafter(hi, std::numeric_limits<double>::infinity())), size());
  std::vector<double> out;
  for (std::size_t k = first; k < last; ++k) out.push_back(eigenvalue(k));
  return out;
}

}  // namespace monolab
