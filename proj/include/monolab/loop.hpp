#pragma once

#include <vector>

#include "monolab/systems.hpp"

namespace monolab {

/// Loops are oriented in the (h, j) plane: h is the abscissa and j the
/// ordinate, so a counter-clockwise circle is h = hc + r cos s,
/// j = jc + r sin s.
enum class Orientation { Ccw, Cw };

/// Closed polyline of values of F; the first vertex repeats as the last.
struct LoopPath {
  std::vector<EMValue> vertices;
  /// Number of evaluation samples along the loop.
  int samples = 64;

  static LoopPath circle(EMValue center, double radius, int samples = 64, Orientation o = Orientation::Ccw);
  /// Axis-aligned ellipse with semi-axes along h and j.
  static LoopPath ellipse(EMValue center, double semi_h, double semi_j, int samples = 64,
                          Orientation o = Orientation::Ccw);
  /// Closes the polyline if needed.
  static LoopPath polygon(std::vector<EMValue> points, int samples = 64);

  Orientation orientation() const;
  LoopPath reversed() const;
  /// `n` points equally spaced in arc length, starting at the first vertex
  /// (the closing point is not repeated).
  std::vector<EMValue> sample(int n) const;
  /// Point at the given fraction of the arc length (taken modulo 1).
  EMValue at(double fraction) const;
  /// Winding number of the loop around `p`.
  int winding_number(EMValue p) const;
  double distance_to(EMValue p) const;
  double length() const;
  /// Throws InvalidInput unless closed, finite and with positive length.
  void validate() const;
};

}  // namespace monolab
