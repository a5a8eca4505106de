#include "monolab/figures.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "monolab/bohr_sommerfeld.hpp"
#include "monolab/svg.hpp"

namespace monolab {

namespace {

std::vector<Point2> to_points(const std::vector<EMValue>& values) {
  std::vector<Point2> out;
  out.reserve(values.size());
  for (const auto& v : values) out.emplace_back(v.h, v.j);
  return out;
}

void draw_loop(SvgPlot& plot, const LoopPath& loop, const std::string& color) {
  plot.polyline(to_points(loop.vertices), color, 2.0);
  for (double f : {0.125, 0.375, 0.625, 0.875}) {
    const EMValue a = loop.at(f - 0.01), b = loop.at(f);
    plot.arrow({a.h, a.j}, {b.h, b.j}, color);
  }
}

const RadialScattering& as_bump(const System& system) { return dynamic_cast<const RadialScattering&>(system); }

}  // namespace

LoopPath default_loop(const System& system) {
  switch (system.id()) {
    case SystemId::SphericalPendulum: return LoopPath::circle({0.0, 1.0}, 0.5);
    case SystemId::ChampagneBottle: return LoopPath::circle({0.0, 0.0}, 0.15);
    case SystemId::Resonance1m2: return LoopPath::ellipse({0.0, 0.01}, 0.02, 0.07);
    case SystemId::RadialScattering: {
      const double v0 = as_bump(system).v0();
      return LoopPath::circle({0.0, v0}, 0.4 * v0);
    }
    default: break;
  }
  throw Error(ErrorKind::InvalidInput, system.name() + " has no default loop; pass --center and --radius");
}

Window default_window(const System& system) {
  switch (system.id()) {
    case SystemId::SphericalPendulum: return {-2.0, 2.0, -1.2, 3.0};
    case SystemId::FreeSphere: return {-2.0, 2.0, -0.1, 2.5};
    case SystemId::ChampagneBottle: return {-0.5, 0.5, -0.3, 0.4};
    case SystemId::Resonance1m2: return {-0.3, 0.2, -0.03, 0.1};
    case SystemId::HarmonicOscillator2D: return {-2.0, 2.0, -0.1, 2.5};
    case SystemId::RadialScattering: {
      const auto& bump = as_bump(system);
      const double v0 = bump.v0();
      const double jmax = 1.5 * bump.sigma() * std::sqrt(2.0 * v0);
      return {-jmax, jmax, 0.05 * v0, 2.0 * v0};
    }
  }
  return {};
}

ElementaryCell default_cell(const SpectralLattice& lattice, const LoopPath& loop, int multiplier) {
  const EMValue start = loop.at(0.0);
  const auto cells = cells_near_loop(lattice, loop, multiplier, 0.6);
  const ElementaryCell* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  const LatticeIndex index(lattice);
  for (const auto& c : cells) {
    if (multiplier > 1 && c.m % multiplier != 0) continue;
    const auto idx = index.find(c.m, c.n);
    const auto& p = index.point(*idx);
    const double d = std::hypot((p.j - start.j) / lattice.hbar, (p.e - start.h) / index.vertical_spacing(*idx, start.h));
    if (d < best_d) {
      best_d = d;
      best = &c;
    }
  }
  if (!best) throw Error(ErrorKind::SnapFailure, "no valid cell near the loop");
  return *best;
}

std::string diagram_svg(const std::vector<CriticalPoint>& diagram, const Window& window, const std::string& title,
                        const std::vector<LoopPath>& loops, const std::vector<Overlay>& overlays) {
  SvgPlot plot(window.h_lo, window.h_hi, window.j_lo, window.j_hi, title, "h", "j");
  std::vector<EMValue> branch;
  for (const auto& p : diagram)
    if (p.kind == CriticalKind::Branch) branch.push_back(p.value);
  plot.points(to_points(branch), "black", 1.6);
  plot.legend("critical values", "black");
  for (const auto& o : overlays) {
    plot.polyline(to_points(o.curve), o.color, 1.5, false, o.dashed);
    if (!o.label.empty()) plot.legend(o.label, o.color);
  }
  const char* colors[] = {"#1f5fbf", "#2a9d4b", "#9d2ab0"};
  for (std::size_t i = 0; i < loops.size(); ++i) draw_loop(plot, loops[i], colors[i % 3]);
  if (!loops.empty()) plot.legend("loop", colors[0]);
  for (const auto& p : diagram)
    if (p.kind == CriticalKind::Isolated) plot.marker({p.value.h, p.value.j}, "#c0392b", 4.5, "isolated");
  return plot.str();
}

std::string lattice_svg(const SpectralLattice& lattice, const Window& window, const std::string& title,
                        const LoopPath* loop, const CellTransportResult* transport) {
  SvgPlot plot(window.h_lo, window.h_hi, window.j_lo, window.j_hi, title, "E", "hbar m");
  std::vector<Point2> pts;
  for (const auto& p : lattice.points) pts.emplace_back(p.e, p.j);
  const double r = lattice.points.size() > 4000 ? 0.8 : 1.8;
  plot.points(pts, "black", r);
  if (loop) draw_loop(plot, *loop, "#1f5fbf");
  if (transport) {
    auto cell = [&](const std::array<int, 3>& c) {
      const auto& a = lattice.points[c[0]];
      const auto& u = lattice.points[c[1]];
      const auto& v = lattice.points[c[2]];
      // Fourth vertex completes the parallelogram.
      return std::vector<Point2>{{a.e, a.j}, {u.e, u.j}, {u.e + v.e - a.e, u.j + v.j - a.j}, {v.e, v.j}};
    };
    std::vector<Point2> path;
    for (const auto& c : transport->path) path.emplace_back(lattice.points[c[0]].e, lattice.points[c[0]].j);
    plot.polyline(path, "#e67e22", 1.0);
    plot.polygon(cell(transport->initial), "#2a9d4b", 0.35);
    plot.polygon(cell(transport->final), "#c0392b", 0.35);
    plot.legend("initial cell", "#2a9d4b");
    plot.legend("transported cell", "#c0392b");
  }
  return plot.str();
}

FigureBundle reproduce_figures(const FigureOptions& options) {
  FigureBundle out;
  Json summary;
  std::ostringstream table;
  table << "figure,invariant,value\n";
  auto row = [&](const std::string& fig, const std::string& name, const std::string& value) {
    table << fig << ',' << name << ",\"" << value << "\"\n";
  };

  // Pendulum: classical monodromy and the Chern pair.
  {
    const SphericalPendulum pendulum;
    const LoopPath loop = default_loop(pendulum);
    const Window window = default_window(pendulum);
    const auto diagram = bifurcation_diagram(pendulum, window, options.resolution);
    const MonodromyResult rot = monodromy_by_rotation(pendulum, loop);
    const FixedPointMonodromy fp = monodromy_by_fixed_points(pendulum, loop);
    const auto chern = chern_sequence(pendulum, -1.0, 3.0);
    const RationalMatrix glue = gluing_product(chern.back().chern, chern.front().chern);
    Json j;
    j["matrix"] = to_json(rot.matrix);
    j["m_raw"] = rot.m_raw;
    j["fixed_point_matrix"] = to_json(fp.matrix);
    j["chern"] = Json::array();
    for (const auto& l : chern) j["chern"].push_back(l.chern);
    j["gluing_product"] = to_json(glue);
    summary["pendulum"] = j;
    row("fig1", "pendulum monodromy (rotation)", to_string(rot.matrix));
    row("fig1", "pendulum monodromy (fixed points)", to_string(fp.matrix));
    std::string pair;
    for (const auto& l : chern) pair += (pair.empty() ? "" : " ") + std::to_string(l.chern);
    row("fig1", "chern sequence", pair);
    row("fig1", "gluing product", to_string(glue));
    out.files["fig1_pendulum_bifurcation.svg"] =
        diagram_svg(diagram, window, "Spherical pendulum: critical values and loop", {loop});

    // Quantum joint spectrum and cell transport.
    const Window qwin{-1.5, 1.5, -1.1, 2.5};
    const SpectralLattice lattice = pendulum_joint_spectrum(options.pendulum_hbar, qwin);
    const ElementaryCell cell = default_cell(lattice, loop, 1);
    const CellTransportResult ct = cell_transport(lattice, loop, cell, 1);
    summary["quantum"] = Json{{"hbar", options.pendulum_hbar}, {"matrix", to_json(ct.matrix)}};
    row("fig2", "quantum monodromy (cell transport)", to_string(ct.matrix));
    out.files["fig2_pendulum_joint_spectrum.svg"] =
        lattice_svg(lattice, qwin, "Quantum spherical pendulum: joint spectrum, hbar = 0.1", &loop, &ct);
  }

  // 1:(-2) resonance: fractional monodromy.
  {
    const Resonance1m2 resonance;
    const LoopPath loop = default_loop(resonance);
    const Window window = default_window(resonance);
    const auto diagram = bifurcation_diagram(resonance, window, options.resolution);
    const SeifertData census = isotropy_census(resonance, loop);
    const FractionalMatrix frac = fractional_matrix(census);
    const QuotientResult quotient = quotient_monodromy(resonance, loop);
    const Window bs_window{-0.1, 0.1, -0.03, 0.045};
    const SpectralLattice bs = bohr_sommerfeld_lattice(resonance, options.resonance_hbar, bs_window);
    const CellTransportResult ct = cell_transport(bs, loop, default_cell(bs, loop, 2), 2);
    Json j;
    j["euler_number"] = to_string(census.euler_number);
    j["N"] = census.N;
    j["fractional_matrix"] = to_json(frac.matrix);
    j["transport"] = frac.transport;
    j["quotient_matrix"] = to_json(quotient.quotient_matrix);
    j["quotient_unquotiented"] = to_json(quotient.unquotiented);
    j["double_cell_matrix"] = to_json(ct.matrix);
    summary["resonance"] = j;
    row("fig3", "euler number", to_string(census.euler_number));
    row("fig3", "fractional monodromy", to_string(frac.matrix));
    row("fig3", "transport", frac.transport);
    row("fig3", "quotient monodromy", to_string(quotient.quotient_matrix));
    row("fig3", "double-cell transport", to_string(ct.matrix));
    std::vector<Overlay> overlays;
    for (const auto& c : isotropy_curves(resonance)) overlays.push_back({c.values, "#8e44ad", true, "Z2 orbits"});
    out.files["fig3_resonance_bifurcation.svg"] =
        diagram_svg(diagram, window, "1:(-2) resonance: critical values and loop", {loop}, overlays);
  }

  // Scattering.
  {
    const RadialScattering bump;
    const RadialScattering free_flow(0.0, bump.sigma());
    const LoopPath loop = default_loop(bump);
    const Window window = default_window(bump);
    const auto diagram = bifurcation_diagram(bump, window, options.resolution / 2);
    const ScatteringMonodromy sm = scattering_monodromy(bump, free_flow, loop);
    summary["scattering"] = Json{{"variation", sm.variation},
                                 {"matrix", to_json(sm.matrix)},
                                 {"map_matrix", to_json(sm.map_matrix)}};
    row("fig5", "deflection variation", format_double(std::round(sm.variation * 1e6) / 1e6));
    row("fig5", "scattering monodromy", to_string(sm.matrix));
    row("fig5", "scattering map", to_string(sm.map_matrix));
    const Overlay jump{{{0.0, bump.v0()}, {0.0, window.h_hi}}, "#888888", true, "deflection jump"};
    out.files["fig5_scattering_bifurcation.svg"] =
        diagram_svg(diagram, window, "Planar scattering: critical value and loop", {loop}, {jump});
  }

  summary["matrices"] = Json::array({summary["pendulum"]["matrix"], summary["quantum"]["matrix"],
                                     summary["resonance"]["fractional_matrix"], summary["scattering"]["matrix"]});
  out.summary = summary;
  out.files["summary.json"] = summary.dump(2) + "\n";
  out.files["summary.csv"] = table.str();
  return out;
}

}  // namespace monolab
