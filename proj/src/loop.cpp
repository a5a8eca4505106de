#include "monolab/loop.hpp"

#include <algorithm>
#include <limits>

#include <cmath>
#include <numbers>

#include "monolab/errors.hpp"

namespace monolab {

namespace {
constexpr int kDenseVertices = 2048;
}

LoopPath LoopPath::circle(EMValue center, double radius, int samples, Orientation o) {
  return ellipse(center, radius, radius, samples, o);
}

LoopPath LoopPath::ellipse(EMValue center, double semi_h, double semi_j, int samples, Orientation o) {
  if (!(semi_h > 0.0) || !(semi_j > 0.0)) throw Error(ErrorKind::InvalidInput, "loop radius must be positive");
  LoopPath loop;
  loop.samples = samples;
  const double sign = o == Orientation::Ccw ? 1.0 : -1.0;
  for (int k = 0; k <= kDenseVertices; ++k) {
    const double s = 2.0 * std::numbers::pi * (k % kDenseVertices) / kDenseVertices;
    loop.vertices.push_back({center.j + sign * semi_j * std::sin(s), center.h + semi_h * std::cos(s)});
  }
  return loop;
}

LoopPath LoopPath::polygon(std::vector<EMValue> points, int samples) {
  LoopPath loop;
  loop.samples = samples;
  loop.vertices = std::move(points);
  if (!loop.vertices.empty()) {
    const auto& a = loop.vertices.front();
    const auto& b = loop.vertices.back();
    if (a.j != b.j || a.h != b.h) loop.vertices.push_back(a);
  }
  loop.validate();
  return loop;
}

Orientation LoopPath::orientation() const {
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k)
    area += vertices[k].h * vertices[k + 1].j - vertices[k + 1].h * vertices[k].j;
  return area >= 0.0 ? Orientation::Ccw : Orientation::Cw;
}

LoopPath LoopPath::reversed() const {
  LoopPath r = *this;
  std::reverse(r.vertices.begin(), r.vertices.end());
  return r;
}

double LoopPath::length() const {
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k)
    len += std::hypot(vertices[k + 1].h - vertices[k].h, vertices[k + 1].j - vertices[k].j);
  return len;
}

std::vector<EMValue> LoopPath::sample(int n) const {
  validate();
  if (n < 3) throw Error(ErrorKind::InvalidInput, "a loop needs at least 3 samples");
  const double total = length();
  std::vector<EMValue> out;
  out.reserve(n);
  std::size_t seg = 0;
  double seg_start = 0.0;
  for (int i = 0; i < n; ++i) {
    const double target = total * i / n;
    while (seg + 2 < vertices.size()) {
      const double len = std::hypot(vertices[seg + 1].h - vertices[seg].h, vertices[seg + 1].j - vertices[seg].j);
      if (seg_start + len >= target) break;
      seg_start += len;
      ++seg;
    }
    const auto& a = vertices[seg];
    const auto& b = vertices[seg + 1];
    const double len = std::hypot(b.h - a.h, b.j - a.j);
    const double t = len > 0.0 ? std::clamp((target - seg_start) / len, 0.0, 1.0) : 0.0;
    out.push_back({a.j + t * (b.j - a.j), a.h + t * (b.h - a.h)});
  }
  return out;
}

EMValue LoopPath::at(double fraction) const {
  validate();
  fraction -= std::floor(fraction);
  double remaining = fraction * length();
  for (std::size_t seg = 0; seg + 1 < vertices.size(); ++seg) {
    const auto& a = vertices[seg];
    const auto& b = vertices[seg + 1];
    const double len = std::hypot(b.h - a.h, b.j - a.j);
    if (remaining <= len || seg + 2 == vertices.size()) {
      const double t = len > 0.0 ? std::clamp(remaining / len, 0.0, 1.0) : 0.0;
      return {a.j + t * (b.j - a.j), a.h + t * (b.h - a.h)};
    }
    remaining -= len;
  }
  return vertices.front();
}

int LoopPath::winding_number(EMValue p) const {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
    const double a = std::atan2(vertices[k].j - p.j, vertices[k].h - p.h);
    const double b = std::atan2(vertices[k + 1].j - p.j, vertices[k + 1].h - p.h);
    total += std::remainder(b - a, 2.0 * std::numbers::pi);
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

double LoopPath::distance_to(EMValue p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
    const auto& a = vertices[k];
    const auto& b = vertices[k + 1];
    const double dh = b.h - a.h, dj = b.j - a.j;
    const double len2 = dh * dh + dj * dj;
    const double t = len2 > 0.0 ? std::clamp(((p.h - a.h) * dh + (p.j - a.j) * dj) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, std::hypot(a.h + t * dh - p.h, a.j + t * dj - p.j));
  }
  return best;
}

void LoopPath::validate() const {
  if (vertices.size() < 4) throw Error(ErrorKind::InvalidInput, "a loop needs at least three distinct vertices");
  for (const auto& v : vertices)
    if (!std::isfinite(v.j) || !std::isfinite(v.h)) throw Error(ErrorKind::InvalidInput, "loop vertex is not finite");
  if (vertices.front().j != vertices.back().j || vertices.front().h != vertices.back().h)
    throw Error(ErrorKind::InvalidInput, "loop is not closed");
  if (!(length() > 0.0)) throw Error(ErrorKind::InvalidInput, "loop has zero length");
}

}  // namespace monolab
