#pragma once

#include <array>
#include <string>

#include <boost/rational.hpp>

namespace monolab {

using Rational = boost::rational<long long>;

std::string to_string(const Rational& r);

/// Parses "p" or "p/q".
Rational parse_rational(const std::string& text);

/// Exact 2x2 matrix. Row i holds the image of basis vector i, so a
/// monodromy [[1,m],[0,1]] sends a -> a + m b and fixes b.
struct RationalMatrix {
  std::array<Rational, 4> e{Rational(1), Rational(0), Rational(0), Rational(1)};

  static RationalMatrix identity() { return {}; }
  static RationalMatrix unipotent(const Rational& m) {
    RationalMatrix r;
    r.e[1] = m;
    return r;
  }

  const Rational& operator()(int i, int j) const { return e[2 * i + j]; }
  Rational& operator()(int i, int j) { return e[2 * i + j]; }

  Rational det() const { return e[0] * e[3] - e[1] * e[2]; }
  RationalMatrix inverse() const;
  bool is_identity() const { return *this == identity(); }
  /// Off-diagonal entry when the matrix has the form [[1,m],[0,1]].
  bool is_unipotent_upper() const;

  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) { return a.e == b.e; }
  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
};

/// "[[1,1/2],[0,1]]"
std::string to_string(const RationalMatrix& m);

}  // namespace monolab
