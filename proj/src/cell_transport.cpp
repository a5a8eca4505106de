#include "monolab/cell_transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "monolab/errors.hpp"

namespace monolab {

LatticeIndex::LatticeIndex(const SpectralLattice& lattice) : lattice_(&lattice) {
  if (!(lattice.hbar > 0.0)) throw Error(ErrorKind::InvalidInput, "lattice hbar must be positive");
  for (int i = 0; i < static_cast<int>(lattice.points.size()); ++i) columns_[lattice.points[i].m].push_back(i);
  for (auto& [m, col] : columns_)
    std::sort(col.begin(), col.end(), [&](int a, int b) { return lattice.points[a].e < lattice.points[b].e; });
}

std::optional<int> LatticeIndex::find(int m, int n) const {
  const auto it = columns_.find(m);
  if (it == columns_.end()) return std::nullopt;
  for (int idx : it->second)
    if (point(idx).n == n) return idx;
  return std::nullopt;
}

double LatticeIndex::vertical_spacing(int idx, double e) const {
  const auto& col = columns_.at(point(idx).m);
  const auto pos = std::find(col.begin(), col.end(), idx) - col.begin();
  const bool has_up = pos + 1 < static_cast<long>(col.size());
  const bool has_down = pos > 0;
  const double up = has_up ? point(col[pos + 1]).e - point(idx).e : 0.0;
  const double down = has_down ? point(idx).e - point(col[pos - 1]).e : 0.0;
  if (has_up && (e >= point(idx).e || !has_down)) return up;
  if (has_down) return down;
  return std::numeric_limits<double>::infinity();
}

double LatticeIndex::nearest_neighbor_distance(int idx) const {
  double best = std::numeric_limits<double>::infinity();
  const auto& p = point(idx);
  for (int dm = -1; dm <= 1; ++dm) {
    const auto it = columns_.find(p.m + dm);
    if (it == columns_.end()) continue;
    for (int k : it->second) {
      if (k == idx) continue;
      best = std::min(best, std::hypot(point(k).j - p.j, point(k).e - p.e));
    }
  }
  return best;
}

std::optional<int> LatticeIndex::snap(double j, double e, double threshold, double* distance) const {
  const double hbar = lattice_->hbar;
  const int m = static_cast<int>(std::lround(j / hbar));
  const auto it = columns_.find(m);
  if (it == columns_.end() || it->second.empty()) return std::nullopt;
  const auto& col = it->second;
  const auto pos = std::lower_bound(col.begin(), col.end(), e, [&](int idx, double v) { return point(idx).e < v; });
  std::optional<int> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (auto p = pos == col.begin() ? pos : pos - 1; p != col.end() && p <= pos; ++p) {
    const int idx = *p;
    const double dx = (j - point(idx).j) / hbar;
    const double dy = (e - point(idx).e) / vertical_spacing(idx, e);
    const double d = std::hypot(dx, dy);
    if (d < best_d) {
      best_d = d;
      best = idx;
    }
  }
  if (distance) *distance = best_d;
  if (!best || !(best_d < threshold)) return std::nullopt;
  return best;
}

std::array<int, 3> resolve_cell(const LatticeIndex& index, const ElementaryCell& cell, int multiplier) {
  if (multiplier < 1) throw Error(ErrorKind::InvalidInput, "multiplier must be at least 1");
  const auto base = index.find(cell.m, cell.n);
  const auto elem = index.find(cell.m + cell.edge_u[0], cell.n + cell.edge_u[1]);
  const auto up = index.find(cell.m + multiplier * cell.edge_u[0], cell.n + multiplier * cell.edge_u[1]);
  const auto side = index.find(cell.m + cell.edge_v[0], cell.n + cell.edge_v[1]);
  if (!base || !elem || !up || !side) {
    std::ostringstream msg;
    msg << "cell at (m,n)=(" << cell.m << "," << cell.n << ") has a vertex outside the lattice";
    throw Error(ErrorKind::InvalidInput, msg.str());
  }
  const double det = static_cast<double>(cell.edge_u[0] * cell.edge_v[1] - cell.edge_u[1] * cell.edge_v[0]);
  if (det == 0.0) throw Error(ErrorKind::InvalidInput, "cell edges are parallel");
  // Local minimality in the scaled metric: both elementary edges near one unit.
  const double hbar = index.lattice().hbar;
  const auto& p0 = index.point(*base);
  for (int other : {*elem, *side}) {
    const auto& q = index.point(other);
    const double dx = (q.j - p0.j) / hbar;
    const double dy = (q.e - p0.e) / index.vertical_spacing(*base, q.e);
    if (std::hypot(dx, dy) > 1.8)
      throw Error(ErrorKind::InvalidInput, "cell edge is not locally minimal");
  }
  return {*base, *up, *side};
}

namespace {

struct Walker {
  const LatticeIndex& index;
  double threshold;
  std::array<int, 3> cell;
  std::vector<std::array<int, 3>> path;
  double max_snap = 0.0;

  EMValue pos(int k) const { return {index.point(cell[k]).j, index.point(cell[k]).e}; }
  std::array<double, 2> edge(int k) const {
    return {index.point(cell[k]).j - index.point(cell[0]).j, index.point(cell[k]).e - index.point(cell[0]).e};
  }
  /// Distance in units of hbar horizontally and the level spacing at the base vertically.
  double distance(double j, double e, EMValue target) const {
    const double se = index.vertical_spacing(cell[0], target.h);
    return std::hypot((j - target.j) / index.lattice().hbar, (e - target.h) / se);
  }
  void translate(double dj, double de) {
    std::array<int, 3> next{};
    for (int k = 0; k < 3; ++k) {
      double d = 0.0;
      const auto p = pos(k);
      const auto hit = index.snap(p.j + dj, p.h + de, threshold, &d);
      if (!hit) {
        std::ostringstream msg;
        msg << "no lattice point within " << threshold << " of the predicted vertex (" << p.j + dj << ","
            << p.h + de << "), scaled distance " << d;
        throw Error(ErrorKind::SnapFailure, msg.str());
      }
      max_snap = std::max(max_snap, d);
      next[k] = *hit;
    }
    if (next[0] == next[1] || next[0] == next[2] || next[1] == next[2])
      throw Error(ErrorKind::SnapFailure, "cell collapsed while snapping");
    cell = next;
    path.push_back(cell);
  }
  /// Greedy lattice translations toward the target; stops when no move
  /// gets closer or a base point repeats.
  void walk_to(EMValue target) {
    std::vector<int> visited{cell[0]};
    for (int guard = 0; guard < 10000; ++guard) {
      const auto u = edge(1), v = edge(2);
      const auto b = pos(0);
      double best = distance(b.j, b.h, target);
      int choice = -1;
      // Moves a u + c v with |a|, |c| <= 2, so that a unit step in either
      // action direction stays reachable after one shear of the cell.
      double moves[24][2];
      int count = 0;
      for (int a = -2; a <= 2; ++a)
        for (int c = -2; c <= 2; ++c)
          if (a != 0 || c != 0) {
            moves[count][0] = a * u[0] + c * v[0];
            moves[count][1] = a * u[1] + c * v[1];
            ++count;
          }
      for (int k = 0; k < count; ++k) {
        const double d = distance(b.j + moves[k][0], b.h + moves[k][1], target);
        if (d < best - 1e-9) {
          best = d;
          choice = k;
        }
      }
      if (choice < 0) return;
      translate(moves[choice][0], moves[choice][1]);
      if (std::find(visited.begin(), visited.end(), cell[0]) != visited.end()) return;
      visited.push_back(cell[0]);
    }
    throw Error(ErrorKind::SnapFailure, "cell walk did not settle");
  }
};

CellTransportResult transport_once(const LatticeIndex& index, const LoopPath& loop, const ElementaryCell& cell,
                                   int multiplier, const CellTransportOptions& options, double density) {
  const std::array<int, 3> start = resolve_cell(index, cell, multiplier);
  Walker w{index, options.snap_threshold, start, {start}, 0.0};
  const int n = std::max(16, static_cast<int>(std::ceil(density * loop.length() / index.lattice().hbar)));
  const auto samples = loop.sample(n);
  // Enter the loop at the sample nearest to the base, go once around, and
  // come back to the base the same way.
  const auto& origin = index.point(start[0]);
  std::size_t entry = 0;
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double d = w.distance(origin.j, origin.e, samples[k]);
    if (d < nearest) {
      nearest = d;
      entry = k;
    }
  }
  for (std::size_t k = 0; k <= samples.size(); ++k) w.walk_to(samples[(entry + k) % samples.size()]);
  w.walk_to({origin.j, origin.e});
  if (w.cell[0] != start[0])
    throw Error(ErrorKind::LatticeDefect, "cell did not return to its starting base point");

  // Exact solve in tag space: T B0 = Bf with B0, Bf the edge offsets.
  auto offsets = [&](const std::array<int, 3>& c) {
    const auto& p0 = index.point(c[0]);
    std::array<long long, 4> b{};
    for (int k = 0; k < 2; ++k) {
      const auto& q = index.point(c[k + 1]);
      b[k] = q.m - p0.m;      // row 0, column k
      b[2 + k] = q.n - p0.n;  // row 1, column k
    }
    return b;
  };
  const auto b0 = offsets(start), bf = offsets(w.cell);
  RationalMatrix m0, mf;
  for (int k = 0; k < 4; ++k) {
    m0.e[k] = Rational(b0[k]);
    mf.e[k] = Rational(bf[k]);
  }
  if (m0.det() == Rational(0)) throw Error(ErrorKind::LatticeDefect, "initial cell edges are parallel");
  // T maps initial edges to transported ones in tag coordinates (m, n);
  // C is the same map in the basis of the cell edges.
  const RationalMatrix t = mf * m0.inverse();
  const RationalMatrix c = m0.inverse() * mf;
  for (const auto& x : c.e)
    if (x.denominator() != 1 || c.det() != Rational(1))
      throw Error(ErrorKind::LatticeDefect,
                  "transported cell is not a unimodular image of the initial cell: " + to_string(c));
  // The continued chart sends each transported edge to its initial tags, so
  // it is T^{-1}; reorder to action coordinates (oscillation, rotation).
  auto chart = [](const RationalMatrix& a) {
    const RationalMatrix inv = a.inverse();
    RationalMatrix r;
    r.e = {inv.e[3], inv.e[2], inv.e[1], inv.e[0]};
    return r;
  };
  CellTransportResult out;
  out.matrix = chart(t);
  out.cell_matrix = chart(c);
  out.multiplier = multiplier;
  out.path = std::move(w.path);
  out.initial = start;
  out.final = w.cell;
  out.max_snap_distance = w.max_snap;
  return out;
}

}  // namespace

CellTransportResult cell_transport(const SpectralLattice& lattice, const LoopPath& loop, const ElementaryCell& cell,
                                   int multiplier, const CellTransportOptions& options) {
  loop.validate();
  if (!(options.snap_threshold > 0.0 && options.snap_threshold < 0.5))
    throw Error(ErrorKind::InvalidInput, "snap threshold must lie in (0, 0.5)");
  const LatticeIndex index(lattice);
  double density = options.target_density;
  for (int attempt = 0;; ++attempt) {
    try {
      return transport_once(index, loop, cell, multiplier, options, density);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SnapFailure || attempt >= options.retries) throw;
      density *= 2.0;
    }
  }
}

std::vector<ElementaryCell> cells_near_loop(const SpectralLattice& lattice, const LoopPath& loop, int multiplier,
                                            double max_distance) {
  const LatticeIndex index(lattice);
  std::vector<ElementaryCell> out;
  const auto samples = loop.sample(std::max(256, loop.samples));
  for (int i = 0; i < static_cast<int>(lattice.points.size()); ++i) {
    const auto& p = lattice.points[i];
    ElementaryCell cell{p.m, p.n};
    std::array<int, 3> v{};
    try {
      v = resolve_cell(index, cell, multiplier);
    } catch (const Error&) {
      continue;
    }
    const double spacing = index.vertical_spacing(v[0], index.point(v[2]).e);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : samples)
      best = std::min(best, std::hypot((s.j - p.j) / lattice.hbar, (s.h - p.e) / spacing));
    if (best <= max_distance) out.push_back(cell);
  }
  return out;
}

}  // namespace monolab
