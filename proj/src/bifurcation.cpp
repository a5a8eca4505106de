#include "monolab/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "monolab/errors.hpp"
#include "monolab/numerics.hpp"
#include "monolab/parallel.hpp"

namespace monolab {

namespace {

double halton(std::size_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

bool definite(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  return ev.minCoeff() > 1e-8 * scale || ev.maxCoeff() < -1e-8 * scale;
}

bool has_definite_combination(const System& system, const Vec& x) {
  const Mat hh = restricted_hessian(system, x, [&system](const Vec& v) { return system.grad_h(v); });
  const Mat hj = restricted_hessian(system, x, [&system](const Vec& v) { return system.grad_j(v); });
  constexpr int kAngles = 72;
  for (int k = 0; k < kAngles; ++k) {
    const double a = std::numbers::pi * k / kAngles;
    if (definite(std::cos(a) * hh + std::sin(a) * hj)) return true;
  }
  return false;
}

}  // namespace

std::string to_string(CriticalKind kind) { return kind == CriticalKind::Isolated ? "isolated" : "branch"; }

Mat restricted_hessian(const System& system, const Vec& x, const std::function<Vec(const Vec&)>& grad) {
  const Mat basis = system.tangent_basis(x);
  Vec c = Vec::Zero(0);
  const Mat dg = system.constraint_jacobian(x);
  if (dg.rows() > 0) c = -(dg * dg.transpose()).ldlt().solve(dg * grad(x));
  auto lagrangian = [&](const Vec& v) {
    Vec g = grad(v);
    if (c.size() > 0) g += system.constraint_jacobian(v).transpose() * c;
    return g;
  };
  const Mat h = basis.transpose() * fd_jacobian(lagrangian, x) * basis;
  return 0.5 * (h + h.transpose());
}

std::vector<CriticalPoint> bifurcation_diagram(const System& system, const Window& window, int resolution) {
  return bifurcation_diagram(system, window, resolution, system.default_chart_box());
}

std::vector<CriticalPoint> bifurcation_diagram(const System& system, const Window& window, int resolution,
                                               const ChartBox& seeds) {
  if (resolution < 1) throw Error(ErrorKind::InvalidInput, "resolution must be positive");
  if (!(window.j_hi > window.j_lo) || !(window.h_hi > window.h_lo))
    throw Error(ErrorKind::InvalidInput, "empty window");
  const int d = system.dim();
  const int k = system.chart_dim();
  if (k + 1 > static_cast<int>(std::size(kPrimes))) throw Error(ErrorKind::Unsupported, "chart dimension too large");
  const int n_g = static_cast<int>(system.constraints(system.chart_to_state(seeds.lo)).size());

  // Unknowns (x, angle, multipliers).
  auto residual = [&](const Vec& z) {
    const Vec x = z.head(d);
    const double a = z[d];
    const Vec g = system.constraints(x);
    Vec r(d + n_g);
    r.head(d) = std::cos(a) * system.grad_h(x) + std::sin(a) * system.grad_j(x);
    if (n_g > 0) {
      r.head(d) += system.constraint_jacobian(x).transpose() * z.tail(n_g);
      r.tail(n_g) = g;
    }
    return r;
  };

  const std::size_t count = static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution);
  std::vector<std::optional<CriticalPoint>> found(count);
  parallel_for(count, [&](std::size_t i) {
    Vec u(k);
    for (int c = 0; c < k; ++c) u[c] = seeds.lo[c] + (seeds.hi[c] - seeds.lo[c]) * halton(i + 1, kPrimes[c]);
    Vec z = Vec::Zero(d + 1 + n_g);
    z.head(d) = system.chart_to_state(u);
    z[d] = std::numbers::pi * halton(i + 1, kPrimes[k]);
    const auto res = gauss_newton(residual, z, 1e-12, 40);
    if (!res.converged) return;
    const Vec x = system.project(res.x.head(d));
    if (!x.allFinite()) return;
    const Eigen::Vector2d sv = system.em_singular_values(x);
    if (sv[1] >= 1e-8) return;
    CriticalPoint p;
    p.value = system.energy_momentum(x);
    if (!window.contains(p.value)) return;
    p.rank = sv[0] < 1e-8 ? 0 : 1;
    p.kind = p.rank == 0 && !has_definite_combination(system, x) ? CriticalKind::Isolated : CriticalKind::Branch;
    p.state = x;
    found[i] = std::move(p);
  });

  std::vector<CriticalPoint> out;
  for (auto& f : found)
    if (f) out.push_back(std::move(*f));
  std::stable_sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    return a.value.j != b.value.j ? a.value.j < b.value.j : a.value.h < b.value.h;
  });
  // Merge values closer than 1e-9; an isolated tag wins.
  std::vector<CriticalPoint> merged;
  for (auto& p : out) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const CriticalPoint& m) {
      return std::hypot(m.value.j - p.value.j, m.value.h - p.value.h) < 1e-9;
    });
    if (it == merged.end()) {
      merged.push_back(std::move(p));
    } else if (p.kind == CriticalKind::Isolated) {
      *it = std::move(p);
    }
  }
  return merged;
}

void check_loop_clearance(const std::vector<CriticalPoint>& diagram, const LoopPath& loop, double margin) {
  for (const auto& v : loop.sample(std::max(loop.samples, 256))) {
    for (const auto& p : diagram) {
      const double dist = std::hypot(p.value.j - v.j, p.value.h - v.h);
      if (dist < margin) {
        std::ostringstream msg;
        msg << "loop passes within " << dist << " of the critical value (" << p.value.j << "," << p.value.h << ")";
        throw Error(ErrorKind::RepositionLoop, msg.str());
      }
    }
  }
}

}  // namespace monolab
