#include "monolab/classical.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "monolab/errors.hpp"
#include "monolab/parallel.hpp"

namespace monolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Residual of "x is a critical point of f on the admissible manifold",
/// unknowns (x, multipliers).
std::function<Vec(const Vec&)> lagrange_residual(const System& system, std::function<Vec(const Vec&)> grad) {
  const int d = system.dim();
  return [&system, grad = std::move(grad), d](const Vec& z) {
    const Vec x = z.head(d);
    const Vec c = z.tail(z.size() - d);
    const Vec g = system.constraints(x);
    Vec r(d + g.size());
    r.head(d) = grad(x);
    if (g.size() > 0) {
      r.head(d) += system.constraint_jacobian(x).transpose() * c;
      r.tail(g.size()) = g;
    }
    return r;
  };
}

std::vector<Vec> grid_critical_points(const System& system, const ChartBox& box, int per_dim,
                                      const std::function<Vec(const Vec&)>& grad) {
  const int k = system.chart_dim();
  const int n_g = static_cast<int>(system.constraints(system.chart_to_state(box.lo)).size());
  const auto residual = lagrange_residual(system, grad);
  std::size_t total = 1;
  for (int i = 0; i < k; ++i) total *= static_cast<std::size_t>(per_dim);
  std::vector<Vec> found;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vec u(k);
    std::size_t rem = idx;
    for (int i = 0; i < k; ++i) {
      const int c = static_cast<int>(rem % per_dim);
      rem /= per_dim;
      u[i] = per_dim == 1 ? box.lo[i] : box.lo[i] + (box.hi[i] - box.lo[i]) * c / (per_dim - 1);
    }
    Vec z(system.dim() + n_g);
    z.head(system.dim()) = system.chart_to_state(u);
    z.tail(n_g).setZero();
    const auto res = gauss_newton(residual, z, 1e-12, 30);
    if (!res.converged) continue;
    const Vec x = system.project(res.x.head(system.dim()));
    const bool dup = std::any_of(found.begin(), found.end(), [&](const Vec& f) { return (f - x).norm() < 1e-6; });
    if (!dup) found.push_back(x);
  }
  return found;
}

}  // namespace

// ------------------------------------------------------- torus points

Vec torus_point(const System& system, EMValue em, double tol) {
  if (!std::isfinite(em.j) || !std::isfinite(em.h)) throw Error(ErrorKind::InvalidInput, "non-finite value");
  const Vec seed = system.torus_seed(em);
  auto residual = [&](const Vec& x) {
    const Vec g = system.constraints(x);
    Vec r(2 + g.size());
    r[0] = system.hamiltonian(x) - em.h;
    r[1] = system.momentum(x) - em.j;
    r.tail(g.size()) = g;
    return r;
  };
  const auto res = gauss_newton(residual, seed, 0.1 * tol, 40);
  const Vec x = res.x;
  const EMValue got = system.energy_momentum(x);
  if (!(std::abs(got.h - em.h) <= tol && std::abs(got.j - em.j) <= tol))
    throw Error(ErrorKind::Seeding, system.name() + ": Newton did not reach the fiber at " + describe(em));
  if (system.em_singular_values(x)[1] < 1e-8)
    throw Error(ErrorKind::CriticalValue, system.name() + ": rank-deficient dF at " + describe(em));
  return x;
}

double orbit_angle(const System& system, const Vec& x, const Vec& y) {
  constexpr int kScan = 256;
  int best = 0;
  double dbest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kScan; ++k) {
    const double d = (system.j_flow(x, kTwoPi * k / kScan) - y).squaredNorm();
    if (d < dbest) {
      dbest = d;
      best = k;
    }
  }
  auto slope = [&](double s) {
    const Vec xs = system.j_flow(x, s);
    return system.vector_field_j(xs).dot(xs - y);
  };
  const double step = kTwoPi / kScan;
  double a = kTwoPi * best / kScan - step;
  double b = a + 2.0 * step;
  double fa = slope(a), fb = slope(b);
  double s = kTwoPi * best / kScan;
  if (fa < 0.0 && fb > 0.0) {
    std::uintmax_t iters = 200;
    auto tol = [](double lo, double hi) { return hi - lo <= 1e-15; };
    const auto r = boost::math::tools::toms748_solve(slope, a, b, fa, fb, tol, iters);
    s = 0.5 * (r.first + r.second);
  }
  s = std::fmod(s, kTwoPi);
  return s < 0.0 ? s + kTwoPi : s;
}

FirstReturn first_return(const System& system, EMValue em, const RotationOptions& options) {
  FirstReturn out;
  out.start = torus_point(system, em);
  const double level = system.section_value(out.start);
  EventSpec ret{[&](const Vec& v) { return system.section_value(v) - level; }, Direction::Increasing, true};
  // Connection form <X_J, xdot> / |X_J|^2 gives the natural lift of theta.
  auto rate = [&](const Vec& v, const Vec& vdot) {
    const Vec xj = system.vector_field_j(v);
    return xj.dot(vdot) / xj.squaredNorm();
  };
  const Trajectory traj = integrate(system, out.start, options.t_max, std::span<const EventSpec>(&ret, 1),
                                    options.flow, rate);
  if (!traj.terminated)
    throw Error(ErrorKind::NoReturn, system.name() + ": no first return before t_max at " + describe(em));
  out.end = traj.final_state;
  out.T = traj.final_time;
  out.connection = traj.accumulated;
  return out;
}

RotationRecord rotation_number(const System& system, EMValue em, const RotationOptions& options) {
  const FirstReturn ret = first_return(system, em, options);
  RotationRecord rec;
  rec.em = em;
  rec.start = ret.start;
  rec.T = ret.T;
  const double s = orbit_angle(system, rec.start, ret.end);
  rec.theta_mod = frac01(s / kTwoPi);
  rec.theta = nearest_branch(rec.theta_mod, ret.connection / kTwoPi);
  rec.check_residual = (system.j_flow(rec.start, s) - ret.end).norm();
  if (rec.check_residual > options.self_check_tol) {
    std::ostringstream msg;
    msg << system.name() << ": return point is off the J-orbit by " << rec.check_residual << " at " << describe(em);
    throw Error(ErrorKind::InconsistentData, msg.str());
  }
  return rec;
}

// ------------------------------------------------------ loop tracking

TrackResult track_along_loop(const LoopPath& loop, const std::function<double(EMValue)>& eval, double jump_gate,
                             int max_samples) {
  loop.validate();
  std::map<double, double> cache;  // arc fraction -> value
  int n = loop.samples;
  while (true) {
    const auto pts = loop.sample(n);
    std::vector<double> vals(n);
    std::vector<std::size_t> todo;
    for (int k = 0; k < n; ++k) {
      const auto it = cache.find(static_cast<double>(k) / n);
      if (it != cache.end())
        vals[k] = it->second;
      else
        todo.push_back(k);
    }
    parallel_for(todo.size(), [&](std::size_t i) { vals[todo[i]] = eval(pts[todo[i]]); });
    for (std::size_t k : todo) cache[static_cast<double>(k) / n] = vals[k];

    TrackResult out;
    out.samples = n;
    out.values = pts;
    out.values.push_back(pts.front());
    out.track.push_back(vals[0]);
    bool jumped = false;
    for (int k = 1; k <= n; ++k) {
      const double raw = vals[k % n];
      const double next = nearest_branch(raw, out.track.back());
      if (std::abs(next - out.track.back()) > jump_gate) {
        jumped = true;
        break;
      }
      out.track.push_back(next);
    }
    if (!jumped) {
      out.variation = out.track.back() - out.track.front();
      return out;
    }
    if (2 * n > max_samples) {
      std::ostringstream msg;
      msg << "branch tracking jump exceeds gate " << jump_gate << " even with " << n << " samples";
      throw Error(ErrorKind::BranchJump, msg.str());
    }
    n *= 2;
  }
}

RationalMatrix round_unipotent(double m_raw, double rounding_gate) {
  const double m = std::round(m_raw);
  if (std::abs(m_raw - m) >= rounding_gate) {
    std::ostringstream msg;
    msg << "variation " << m_raw << " is not within " << rounding_gate << " of an integer";
    throw Error(ErrorKind::NonInteger, msg.str());
  }
  return RationalMatrix::unipotent(Rational(static_cast<long long>(m)));
}

MonodromyResult monodromy_by_rotation(const System& system, const LoopPath& loop, const MonodromyOptions& options) {
  std::mutex mutex;
  double max_check = 0.0;
  auto eval = [&](EMValue em) {
    const RotationRecord r = rotation_number(system, em, options.rotation);
    std::lock_guard lock(mutex);
    max_check = std::max(max_check, r.check_residual);
    return r.theta;
  };
  const TrackResult tr = track_along_loop(loop, eval, options.jump_gate, options.max_samples);
  MonodromyResult out;
  out.method = "rotation";
  out.m_raw = -tr.variation;
  out.matrix = round_unipotent(out.m_raw, options.rounding_gate);
  out.samples = tr.samples;
  out.values = tr.values;
  out.track = tr.track;
  out.max_check_residual = max_check;
  return out;
}

// ------------------------------------------------------- fixed points

std::vector<Vec> find_fixed_points(const System& system, int per_dim) {
  return find_fixed_points(system, system.default_chart_box(), per_dim);
}

std::vector<Vec> find_fixed_points(const System& system, const ChartBox& box, int per_dim) {
  auto grad = [&system](const Vec& x) { return system.grad_j(x); };
  return grid_critical_points(system, box, per_dim, grad);
}

FixedPointRecord isotropy_weights(const System& system, const Vec& x) {
  const int d = system.dim();
  const Mat basis = system.tangent_basis(x);
  const Vec xj = system.vector_field_j(x);
  if ((basis.transpose() * xj).norm() > 1e-10)
    throw Error(ErrorKind::InvalidInput, system.name() + ": state is not a fixed point of the circle action");

  auto field = [&system](const Vec& v) { return system.vector_field_j(v); };
  const Mat lin = basis.transpose() * fd_jacobian(field, x) * basis;

  // Hessian of the Lagrangian J + c.g restricted to the tangent space.
  Vec c = Vec::Zero(0);
  const Mat dg = system.constraint_jacobian(x);
  if (dg.rows() > 0) c = -(dg * dg.transpose()).ldlt().solve(dg * system.grad_j(x));
  auto lagrangian_grad = [&system, &c](const Vec& v) {
    Vec g = system.grad_j(v);
    if (c.size() > 0) g += system.constraint_jacobian(v).transpose() * c;
    return g;
  };
  Mat hess = basis.transpose() * fd_jacobian(lagrangian_grad, x) * basis;
  hess = 0.5 * (hess + hess.transpose()).eval();

  Eigen::EigenSolver<Mat> es(lin);
  const Eigen::VectorXcd ev = es.eigenvalues();
  double residual = 0.0;
  std::vector<double> omegas;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    residual = std::max(residual, std::abs(ev[i].real()));
    if (std::abs(ev[i].imag()) < 1e-8)
      throw Error(ErrorKind::DegenerateFixedPoint, system.name() + ": zero eigenvalue in the linearised circle action");
    if (ev[i].imag() > 0.0) omegas.push_back(ev[i].imag());
  }
  if (residual > 1e-8)
    throw Error(ErrorKind::DegenerateFixedPoint, system.name() + ": linearised circle action is not elliptic");
  std::sort(omegas.begin(), omegas.end());

  std::vector<int> weights;
  for (std::size_t i = 0; i < omegas.size();) {
    std::size_t j = i;
    while (j < omegas.size() && omegas[j] - omegas[i] < 1e-6) ++j;
    const double omega = omegas[i];
    const long w = std::lround(omega);
    residual = std::max(residual, std::abs(omega - w));
    if (std::abs(omega - w) > 1e-8 || w == 0)
      throw Error(ErrorKind::DegenerateFixedPoint, system.name() + ": non-integer isotropy weight");
    // Signature of J on the eigenspace of i*omega gives the weight signs.
    const Eigen::MatrixXcd shifted =
        lin.cast<std::complex<double>>() - std::complex<double>(0.0, omega) * Eigen::MatrixXcd::Identity(lin.rows(), lin.cols());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index kdim = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv[k] < 1e-6) ++kdim;
    if (kdim != static_cast<Eigen::Index>(j - i))
      throw Error(ErrorKind::DegenerateFixedPoint, system.name() + ": non-semisimple circle action linearisation");
    const Eigen::MatrixXcd kernel = svd.matrixV().rightCols(kdim);
    const Eigen::MatrixXcd form = kernel.adjoint() * hess.cast<std::complex<double>>() * kernel;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sa(0.5 * (form + form.adjoint()));
    for (Eigen::Index k = 0; k < kdim; ++k) {
      const double s = sa.eigenvalues()[k];
      if (std::abs(s) < 1e-10)
        throw Error(ErrorKind::DegenerateFixedPoint, system.name() + ": degenerate quadratic part of J");
      weights.push_back(s > 0.0 ? static_cast<int>(w) : -static_cast<int>(w));
    }
    i = j;
  }
  if (weights.size() != 2)
    throw Error(ErrorKind::DegenerateFixedPoint, system.name() + ": expected two isotropy weights");
  std::sort(weights.begin(), weights.end(), std::greater<>());
  FixedPointRecord rec;
  rec.state = x;
  rec.value = system.energy_momentum(x);
  rec.m = weights[0];
  rec.n = weights[1];
  rec.sign = rec.m * rec.n < 0 ? 1 : -1;
  rec.residual = residual;
  (void)d;
  return rec;
}

Mat weight_plane(const System& system, const Vec& x, int weight) {
  const Mat basis = system.tangent_basis(x);
  auto field = [&system](const Vec& v) { return system.vector_field_j(v); };
  const Mat lin = basis.transpose() * fd_jacobian(field, x) * basis;
  const double omega = std::abs(static_cast<double>(weight));
  const Eigen::MatrixXcd shifted =
      lin.cast<std::complex<double>>() - std::complex<double>(0.0, omega) * Eigen::MatrixXcd::Identity(lin.rows(), lin.cols());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv[sv.size() - 1] > 1e-6)
    throw Error(ErrorKind::InvalidInput, system.name() + ": no invariant plane with the requested weight");
  if (sv.size() > 1 && sv[sv.size() - 2] < 1e-6)
    throw Error(ErrorKind::DegenerateFixedPoint, system.name() + ": weight plane is not unique");
  const Eigen::VectorXcd k = svd.matrixV().col(sv.size() - 1);
  Mat plane(x.size(), 2);
  plane.col(0) = basis * k.real();
  plane.col(1) = basis * k.imag();
  Eigen::HouseholderQR<Mat> qr(plane);
  return qr.householderQ() * Mat::Identity(x.size(), 2);
}

FixedPointMonodromy monodromy_by_fixed_points(const System& system, const LoopPath& loop, double margin) {
  loop.validate();
  FixedPointMonodromy out;
  long long total = 0;
  for (const Vec& x : find_fixed_points(system)) {
    const EMValue v = system.energy_momentum(x);
    if (loop.distance_to(v) < margin)
      throw Error(ErrorKind::RepositionLoop, system.name() + ": fixed value " + describe(v) + " lies on the loop");
    const int w = loop.winding_number(v);
    if (w == 0) continue;
    FixedPointRecord rec = isotropy_weights(system, x);
    total += static_cast<long long>(w) * rec.sign;
    out.inside.push_back(std::move(rec));
    out.winding.push_back(w);
  }
  out.matrix = RationalMatrix::unipotent(Rational(total));
  return out;
}

// ------------------------------------------------------- Chern levels

std::vector<ChernLevel> chern_sequence(const System& system, double lo, double hi) {
  if (!(hi > lo)) throw Error(ErrorKind::InvalidInput, "empty energy range");
  auto grad = [&system](const Vec& x) { return system.grad_h(x); };
  const auto points = grid_critical_points(system, system.default_chart_box(), 11, grad);
  if (points.empty()) throw Error(ErrorKind::Unsupported, system.name() + ": H has no critical points");
  struct Crit {
    double value;
    int sign;
  };
  std::vector<Crit> crits;
  for (const Vec& x : points) {
    const FixedPointRecord rec = isotropy_weights(system, x);
    crits.push_back({system.hamiltonian(x), rec.sign});
  }
  std::sort(crits.begin(), crits.end(), [](const Crit& a, const Crit& b) { return a.value < b.value; });
  for (std::size_t i = 1; i < crits.size(); ++i)
    if (crits[i].value - crits[i - 1].value < 1e-9)
      throw Error(ErrorKind::Unsupported, system.name() + ": several critical points share one critical value");

  std::vector<ChernLevel> levels;
  int chern = 1;
  for (std::size_t i = 0; i < crits.size(); ++i) {
    if (i > 0) chern += crits[i].sign;
    const double a = crits[i].value;
    const double b = i + 1 < crits.size() ? crits[i + 1].value : std::numeric_limits<double>::infinity();
    const double l = std::max(a, lo), r = std::min(b, hi);
    if (l < r) levels.push_back({l, r, chern});
  }
  return levels;
}

RationalMatrix gluing_product(long long c1, long long c2) {
  return RationalMatrix::unipotent(Rational(c1)) * RationalMatrix::unipotent(Rational(c2)).inverse();
}

}  // namespace monolab
