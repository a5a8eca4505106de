#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "monolab/loop.hpp"
#include "monolab/rational.hpp"
#include "monolab/spectrum.hpp"

namespace monolab {

/// Cell spanned by lattice points with tags base, base + edge_u, base + edge_v
/// (offsets in (m, n) tag space).
struct ElementaryCell {
  int m = 0;
  int n = 0;
  std::array<int, 2> edge_u{1, 0};
  std::array<int, 2> edge_v{0, 1};
};

/// Column-wise lookup with snapping in the scaled metric where one unit is
/// the column spacing hbar horizontally and the local level spacing
/// vertically.
class LatticeIndex {
 public:
  explicit LatticeIndex(const SpectralLattice& lattice);

  const SpectralLattice& lattice() const { return *lattice_; }
  const SpectralPoint& point(int idx) const { return lattice_->points[idx]; }
  std::optional<int> find(int m, int n) const;
  /// Nearest point to (j, e) if its scaled distance is below `threshold`.
  std::optional<int> snap(double j, double e, double threshold, double* distance = nullptr) const;
  /// Level spacing of the column of `idx` on the side of `e`.
  double vertical_spacing(int idx, double e) const;
  /// Smallest Euclidean distance from `idx` to another lattice point.
  double nearest_neighbor_distance(int idx) const;

 private:
  const SpectralLattice* lattice_;
  std::map<int, std::vector<int>> columns_;  // m -> indices sorted by e
};

struct CellTransportOptions {
  double snap_threshold = 0.35;
  /// Loop targets per column spacing of arc length.
  double target_density = 2.0;
  /// Retries with doubled target density after a snap failure.
  int retries = 1;
};

struct CellTransportResult {
  /// Continuation of the local action chart around the loop, in action
  /// coordinates ordered (oscillation, rotation): [[1, k],[0,1]] means the
  /// oscillation quantum number gains k times the rotation quantum number.
  /// Entries may have denominators dividing the multiplier.
  RationalMatrix matrix;
  /// Same map in the basis of the multiplied cell edges (integer).
  RationalMatrix cell_matrix;
  int multiplier = 1;
  /// Vertex indices of the cell after every translation.
  std::vector<std::array<int, 3>> path;
  std::array<int, 3> initial{};
  std::array<int, 3> final{};
  double max_snap_distance = 0.0;
};

/// Resolves the vertices of `cell` with edge_u scaled by `multiplier`.
/// Throws InvalidInput when a vertex is missing or the elementary edges are
/// not locally minimal (longer than 1.8 times the nearest-neighbour spacing
/// in the scaled metric).
std::array<int, 3> resolve_cell(const LatticeIndex& index, const ElementaryCell& cell, int multiplier);

/// Translates the cell along the loop, snapping vertices to lattice points,
/// returns to the starting base and compares the final edges with the
/// initial ones by an exact solve in tag space.
/// Throws SnapFailure when a vertex has no lattice point within the snap
/// threshold and LatticeDefect when the final solve is not unimodular.
CellTransportResult cell_transport(const SpectralLattice& lattice, const LoopPath& loop, const ElementaryCell& cell,
                                   int multiplier = 1, const CellTransportOptions& options = {});

/// Valid cells whose base lies within `max_distance` (scaled units) of the
/// loop, in lattice order.
std::vector<ElementaryCell> cells_near_loop(const SpectralLattice& lattice, const LoopPath& loop, int multiplier,
                                            double max_distance);

}  // namespace monolab
