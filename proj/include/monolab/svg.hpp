#pragma once

#include <string>
#include <utility>
#include <vector>

namespace monolab {

using Point2 = std::pair<double, double>;

/// Minimal SVG plot in data coordinates. Output is deterministic: every
/// coordinate is printed with two decimals.
class SvgPlot {
 public:
  SvgPlot(double x_lo, double x_hi, double y_lo, double y_hi, std::string title, std::string x_label,
          std::string y_label, int width = 640, int height = 480);

  void points(const std::vector<Point2>& pts, const std::string& color, double radius);
  void polyline(const std::vector<Point2>& pts, const std::string& color, double stroke, bool closed = false,
                bool dashed = false);
  /// Filled polygon with the given opacity.
  void polygon(const std::vector<Point2>& pts, const std::string& color, double opacity);
  void marker(Point2 p, const std::string& color, double radius, const std::string& label = "");
  /// Arrow head at `tip`, pointing from `from`.
  void arrow(Point2 from, Point2 tip, const std::string& color);
  void legend(const std::string& text, const std::string& color);

  std::string str() const;

 private:
  double px(double x) const;
  double py(double y) const;

  double x_lo_, x_hi_, y_lo_, y_hi_;
  std::string title_, x_label_, y_label_;
  int width_, height_;
  std::vector<std::string> body_;
  std::vector<std::pair<std::string, std::string>> legend_;
};

}  // namespace monolab
