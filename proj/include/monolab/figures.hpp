#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "monolab/report.hpp"

namespace monolab {

/// Standard loop around the focus-focus (or fractional) value of a system.
/// Throws InvalidInput for systems without one.
LoopPath default_loop(const System& system);
/// Plot and lattice window around the interesting part of the image.
Window default_window(const System& system);

/// Cell on the loop closest to its first point; with multiplier 2 the base
/// column must be even.
ElementaryCell default_cell(const SpectralLattice& lattice, const LoopPath& loop, int multiplier);

struct Overlay {
  std::vector<EMValue> curve;
  std::string color = "#888888";
  bool dashed = true;
  std::string label;
};

/// Bifurcation diagram (h horizontal, j vertical) with loops drawn as
/// oriented polylines.
std::string diagram_svg(const std::vector<CriticalPoint>& diagram, const Window& window, const std::string& title,
                        const std::vector<LoopPath>& loops, const std::vector<Overlay>& overlays = {});

/// Lattice points with the loop and the initial and final cells.
std::string lattice_svg(const SpectralLattice& lattice, const Window& window, const std::string& title,
                        const LoopPath* loop = nullptr, const CellTransportResult* transport = nullptr);

struct FigureBundle {
  /// File name -> content.
  std::map<std::string, std::string> files;
  Json summary;
};

struct FigureOptions {
  double pendulum_hbar = 0.1;
  double resonance_hbar = 0.001;
  int resolution = 60;
};

/// Four SVGs (pendulum diagram, pendulum joint spectrum, 1:(-2) diagram,
/// scattering diagram) plus summary.json and summary.csv of the invariants.
FigureBundle reproduce_figures(const FigureOptions& options = {});

}  // namespace monolab
