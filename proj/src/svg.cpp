#include "monolab/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "monolab/errors.hpp"

namespace monolab {

namespace {

constexpr double kMarginLeft = 64, kMarginRight = 24, kMarginTop = 40, kMarginBottom = 52;
constexpr const char* kVersion = "monolab 0.1.0";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Round tick spacing giving about five ticks over `span`.
double tick_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

std::string tick_label(double v, double step) {
  const int digits = std::max(0, static_cast<int>(-std::floor(std::log10(step))));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, std::abs(v) < 1e-12 * step ? 0.0 : v);
  return buf;
}

}  // namespace

SvgPlot::SvgPlot(double x_lo, double x_hi, double y_lo, double y_hi, std::string title, std::string x_label,
                 std::string y_label, int width, int height)
    : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi), title_(std::move(title)), x_label_(std::move(x_label)),
      y_label_(std::move(y_label)), width_(width), height_(height) {
  if (!(x_hi > x_lo) || !(y_hi > y_lo)) throw Error(ErrorKind::InvalidInput, "empty plot range");
}

double SvgPlot::px(double x) const {
  return kMarginLeft + (x - x_lo_) / (x_hi_ - x_lo_) * (width_ - kMarginLeft - kMarginRight);
}

double SvgPlot::py(double y) const {
  return height_ - kMarginBottom - (y - y_lo_) / (y_hi_ - y_lo_) * (height_ - kMarginTop - kMarginBottom);
}

void SvgPlot::points(const std::vector<Point2>& pts, const std::string& color, double radius) {
  std::ostringstream s;
  s << "<g fill=\"" << color << "\">";
  for (const auto& [x, y] : pts) {
    if (x < x_lo_ || x > x_hi_ || y < y_lo_ || y > y_hi_) continue;
    s << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"" << fmt(radius) << "\"/>";
  }
  s << "</g>";
  body_.push_back(s.str());
}

void SvgPlot::polyline(const std::vector<Point2>& pts, const std::string& color, double stroke, bool closed,
                       bool dashed) {
  if (pts.empty()) return;
  std::ostringstream s;
  s << "<" << (closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
    << fmt(stroke) << "\"" << (dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) s << (i ? " " : "") << fmt(px(pts[i].first)) << ',' << fmt(py(pts[i].second));
  s << "\"/>";
  body_.push_back(s.str());
}

void SvgPlot::polygon(const std::vector<Point2>& pts, const std::string& color, double opacity) {
  if (pts.empty()) return;
  std::ostringstream s;
  s << "<polygon fill=\"" << color << "\" fill-opacity=\"" << fmt(opacity) << "\" stroke=\"" << color
    << "\" stroke-width=\"1.50\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) s << (i ? " " : "") << fmt(px(pts[i].first)) << ',' << fmt(py(pts[i].second));
  s << "\"/>";
  body_.push_back(s.str());
}

void SvgPlot::marker(Point2 p, const std::string& color, double radius, const std::string& label) {
  std::ostringstream s;
  s << "<circle cx=\"" << fmt(px(p.first)) << "\" cy=\"" << fmt(py(p.second)) << "\" r=\"" << fmt(radius)
    << "\" fill=\"" << color << "\"/>";
  if (!label.empty())
    s << "<text x=\"" << fmt(px(p.first) + radius + 3) << "\" y=\"" << fmt(py(p.second) - radius - 3)
      << "\" font-size=\"12\" fill=\"" << color << "\">" << escape(label) << "</text>";
  body_.push_back(s.str());
}

void SvgPlot::arrow(Point2 from, Point2 tip, const std::string& color) {
  const double x0 = px(from.first), y0 = py(from.second), x1 = px(tip.first), y1 = py(tip.second);
  const double len = std::hypot(x1 - x0, y1 - y0);
  if (len == 0.0) return;
  const double ux = (x1 - x0) / len, uy = (y1 - y0) / len;
  constexpr double kSize = 9.0;
  const double bx = x1 - kSize * ux, by = y1 - kSize * uy;
  std::ostringstream s;
  s << "<polygon fill=\"" << color << "\" points=\"" << fmt(x1) << ',' << fmt(y1) << ' ' << fmt(bx - 0.5 * kSize * uy)
    << ',' << fmt(by + 0.5 * kSize * ux) << ' ' << fmt(bx + 0.5 * kSize * uy) << ',' << fmt(by - 0.5 * kSize * ux)
    << "\"/>";
  body_.push_back(s.str());
}

void SvgPlot::legend(const std::string& text, const std::string& color) { legend_.emplace_back(text, color); }

std::string SvgPlot::str() const {
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- " << kVersion << " -->\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
    << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\" font-family=\"sans-serif\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << fmt(width_ / 2.0) << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">" << escape(title_)
    << "</text>\n";
  const double left = px(x_lo_), right = px(x_hi_), top = py(y_hi_), bottom = py(y_lo_);
  s << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(right - left) << "\" height=\""
    << fmt(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double xs = tick_step(x_hi_ - x_lo_), ys = tick_step(y_hi_ - y_lo_);
  for (double t = std::ceil(x_lo_ / xs) * xs; t <= x_hi_ + 1e-9 * xs; t += xs)
    s << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(bottom) << "\" x2=\"" << fmt(px(t)) << "\" y2=\""
      << fmt(bottom + 5) << "\" stroke=\"black\"/><text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(bottom + 18)
      << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_label(t, xs) << "</text>\n";
  for (double t = std::ceil(y_lo_ / ys) * ys; t <= y_hi_ + 1e-9 * ys; t += ys)
    s << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << fmt(left) << "\" y2=\""
      << fmt(py(t)) << "\" stroke=\"black\"/><text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(py(t) + 4)
      << "\" font-size=\"11\" text-anchor=\"end\">" << tick_label(t, ys) << "</text>\n";
  s << "<text x=\"" << fmt(0.5 * (left + right)) << "\" y=\"" << fmt(height_ - 12.0)
    << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(x_label_) << "</text>\n";
  s << "<text x=\"16\" y=\"" << fmt(0.5 * (top + bottom)) << "\" font-size=\"13\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 16 " << fmt(0.5 * (top + bottom)) << ")\">" << escape(y_label_) << "</text>\n";
  s << "<svg x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(right - left) << "\" height=\""
    << fmt(bottom - top) << "\" viewBox=\"" << fmt(left) << ' ' << fmt(top) << ' ' << fmt(right - left) << ' '
    << fmt(bottom - top) << "\" overflow=\"hidden\">\n";
  for (const auto& b : body_) s << b << '\n';
  s << "</svg>\n";
  double ly = top + 16;
  if (!legend_.empty())
    s << "<rect x=\"" << fmt(right - 176) << "\" y=\"" << fmt(top + 3) << "\" width=\"172\" height=\""
      << fmt(16.0 * legend_.size() + 4) << "\" fill=\"white\" fill-opacity=\"0.85\" stroke=\"#cccccc\"/>\n";
  for (const auto& [text, color] : legend_) {
    s << "<rect x=\"" << fmt(right - 170) << "\" y=\"" << fmt(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
      << color << "\"/><text x=\"" << fmt(right - 155) << "\" y=\"" << fmt(ly) << "\" font-size=\"11\">"
      << escape(text) << "</text>\n";
    ly += 16;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace monolab
