#include "monolab/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "monolab/bohr_sommerfeld.hpp"
#include "monolab/figures.hpp"

namespace monolab {

namespace {

const std::map<Command, std::string>& command_names() {
  static const std::map<Command, std::string> names{
      {Command::Bifurcation, "bifurcation"},   {Command::Monodromy, "monodromy"},
      {Command::Spectrum, "spectrum"},         {Command::CellTransport, "cell-transport"},
      {Command::Fractional, "fractional"},     {Command::Scattering, "scattering"},
      {Command::ReproduceFigures, "reproduce-figures"}, {Command::Selftest, "selftest"}};
  return names;
}

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::InvalidInput, msg); }

class Stopwatch {
 public:
  explicit Stopwatch(Json& sink) : sink_(sink) {}
  template <class F>
  auto time(const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = f();
    sink_[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
  }

 private:
  Json& sink_;
};

std::unique_ptr<System> system_of(const RunConfig& c) {
  SystemParams p;
  p.v0 = c.v0;
  p.sigma = c.sigma;
  return make_system(c.system, p);
}

bool is_quantum_capable(SystemId id) { return id == SystemId::SphericalPendulum || id == SystemId::FreeSphere; }

Window lattice_window(const System& s) {
  switch (s.id()) {
    case SystemId::SphericalPendulum: return {-1.5, 1.5, -1.1, 2.5};
    case SystemId::Resonance1m2: return {-0.1, 0.1, -0.03, 0.045};
    default: return default_window(s);
  }
}

double default_hbar(SystemId id) {
  switch (id) {
    case SystemId::Resonance1m2: return 0.001;
    case SystemId::ChampagneBottle: return 0.01;
    default: return 0.1;
  }
}

LoopSpec loop_spec_of(const LoopPath& loop, const System& s) {
  // Mirrors default_loop() in spec form.
  LoopSpec spec;
  spec.samples = loop.samples;
  switch (s.id()) {
    case SystemId::Resonance1m2:
      spec.shape = "ellipse";
      spec.center = {0.0, 0.01};
      spec.semi_h = 0.02;
      spec.semi_j = 0.07;
      break;
    default: {
      double hc = 0, jc = 0;
      for (std::size_t i = 0; i + 1 < loop.vertices.size(); ++i) {
        hc += loop.vertices[i].h;
        jc += loop.vertices[i].j;
      }
      const double n = static_cast<double>(loop.vertices.size() - 1);
      spec.center = {std::round(jc / n * 1e12) / 1e12, std::round(hc / n * 1e12) / 1e12};
      spec.radius = std::round(std::hypot(loop.vertices[0].h - spec.center.h, loop.vertices[0].j - spec.center.j) *
                               1e12) / 1e12;
    }
  }
  return spec;
}

bool is_lattice_file(const std::string& lattice) {
  return lattice.size() > 4 && lattice.compare(lattice.size() - 4, 4, ".csv") == 0;
}

SpectralLattice make_lattice(const System& s, const RunConfig& c, const Window& w) {
  if (is_lattice_file(c.lattice)) {
    std::ifstream in(c.lattice);
    if (!in) bad("cannot read lattice file " + c.lattice);
    SpectralLattice l = read_lattice_csv(in);
    l.system = s.name();
    return l;
  }
  if (c.lattice == "quantum") {
    if (!is_quantum_capable(s.id())) bad(s.name() + " has no quantum spectrum; use --lattice bohr-sommerfeld");
    SpectrumOptions opt;
    opt.gravity = s.id() == SystemId::FreeSphere ? 0.0 : 1.0;
    SpectralLattice l = pendulum_joint_spectrum(c.hbar, w, opt);
    l.system = s.name();
    return l;
  }
  return bohr_sommerfeld_lattice(s, c.hbar, w);
}

MonodromyOptions monodromy_options(const RunConfig& c) {
  MonodromyOptions o;
  o.rotation.flow.rtol = c.rtol;
  o.rotation.flow.atol = c.atol;
  o.rotation.flow.drift_gate = c.drift_gate;
  return o;
}

bool wants(const RunConfig& c, const std::string& kind) { return c.format == "all" || c.format == kind; }

struct Pending {
  Json result;
  Json gates = Json::object();
  std::map<std::string, std::string> files;
};

Pending run_bifurcation(const RunConfig& c, const System& s, Stopwatch& sw) {
  Pending p;
  const auto diagram = sw.time("diagram", [&] { return bifurcation_diagram(s, *c.window, c.resolution); });
  p.result = to_json(diagram);
  std::vector<LoopPath> loops;
  if (c.loop) {
    loops.push_back(c.loop->path());
    p.result["loop"] = to_json(loops.back());
    check_loop_clearance(diagram, loops.back(), 1e-3);
  }
  p.files["bifurcation.csv"] = critical_csv(diagram);
  p.files["bifurcation.svg"] = diagram_svg(diagram, *c.window, s.name() + ": critical values", loops);
  return p;
}

Pending run_monodromy(const RunConfig& c, const System& s, Stopwatch& sw) {
  Pending p;
  const LoopPath loop = c.loop->path();
  p.result["loop"] = to_json(loop);
  std::optional<MonodromyResult> rot;
  std::optional<FixedPointMonodromy> fp;
  if (c.method != "fixed-point") {
    rot = sw.time("rotation", [&] { return monodromy_by_rotation(s, loop, monodromy_options(c)); });
    p.result["rotation"] = to_json(*rot);
    p.files["monodromy_track.csv"] = track_csv(rot->values, rot->track, "theta");
  }
  if (c.method != "rotation") {
    fp = sw.time("fixed_point", [&] { return monodromy_by_fixed_points(s, loop); });
    p.result["fixed_point"] = to_json(*fp);
  }
  p.result["matrix"] = to_json(rot ? rot->matrix : fp->matrix);
  if (rot && fp) p.gates["methods_agree"] = rot->matrix == fp->matrix;
  const auto diagram = sw.time("diagram", [&] { return bifurcation_diagram(s, *c.window, c.resolution); });
  p.files["monodromy.svg"] = diagram_svg(diagram, *c.window, s.name() + ": monodromy loop", {loop});
  return p;
}

Pending run_spectrum(const RunConfig& c, const System& s, Stopwatch& sw) {
  Pending p;
  const SpectralLattice lattice = sw.time("lattice", [&] { return make_lattice(s, c, *c.window); });
  p.result = lattice_summary(lattice);
  if (s.id() == SystemId::FreeSphere && c.lattice == "quantum") {
    double err = 0.0;
    for (const auto& pt : lattice.points) {
      const double l = std::abs(pt.m) + pt.n;
      err = std::max(err, std::abs(pt.e - 0.5 * c.hbar * c.hbar * l * (l + 1.0)));
    }
    p.result["max_error_vs_exact"] = err;
    p.gates["free_sphere_exact"] = err < 1e-10;
  }
  p.files["spectrum.csv"] = lattice_csv(lattice);
  const LoopPath* loop = nullptr;
  std::optional<LoopPath> path;
  if (c.loop) {
    path = c.loop->path();
    loop = &*path;
  }
  p.files["spectrum.svg"] = lattice_svg(lattice, *c.window, s.name() + ": joint spectrum", loop);
  return p;
}

Pending run_cell_transport(const RunConfig& c, const System& s, Stopwatch& sw) {
  Pending p;
  const LoopPath loop = c.loop->path();
  const SpectralLattice lattice = sw.time("lattice", [&] { return make_lattice(s, c, *c.window); });
  const ElementaryCell cell = c.cell ? ElementaryCell{(*c.cell)[0], (*c.cell)[1]} : default_cell(lattice, loop, c.multiplier);
  const CellTransportResult ct = sw.time("transport", [&] { return cell_transport(lattice, loop, cell, c.multiplier); });
  p.result = to_json(ct, lattice);
  p.result["lattice"] = lattice_summary(lattice);
  p.result["loop"] = to_json(loop);
  p.files["lattice.csv"] = lattice_csv(lattice);
  p.files["cell_transport.svg"] = lattice_svg(lattice, *c.window, s.name() + ": cell transport", &loop, &ct);
  return p;
}

Pending run_fractional(const RunConfig& c, const System& s, Stopwatch& sw) {
  Pending p;
  const LoopPath loop = c.loop->path();
  p.result["loop"] = to_json(loop);
  std::optional<FractionalMatrix> frac;
  if (c.method != "quotient") {
    const SeifertData census = sw.time("census", [&] { return isotropy_census(s, loop); });
    frac = fractional_matrix(census);
    p.result["census"] = to_json(census);
    p.result["euler_number"] = to_string(census.euler_number);
    p.result["fractional"] = to_json(*frac);
  }
  if (c.method != "census") {
    QuotientOptions qo;
    qo.monodromy = monodromy_options(c);
    const QuotientResult q = sw.time("quotient", [&] { return quotient_monodromy(s, loop, qo); });
    p.result["quotient"] = to_json(q);
    p.files["quotient_track.csv"] = track_csv(q.values, q.track, "theta_quotient");
    if (frac) p.gates["quotient_matches_census"] = q.unquotiented == frac->matrix;
  }
  const auto diagram = sw.time("diagram", [&] { return bifurcation_diagram(s, *c.window, c.resolution); });
  std::vector<Overlay> overlays;
  for (const auto& curve : isotropy_curves(s)) overlays.push_back({curve.values, "#8e44ad", true, "exceptional orbits"});
  p.files["fractional.svg"] = diagram_svg(diagram, *c.window, s.name() + ": fractional monodromy", {loop}, overlays);
  return p;
}

Pending run_scattering(const RunConfig& c, const System& s, Stopwatch& sw) {
  Pending p;
  const auto* bump = dynamic_cast<const RadialScattering*>(&s);
  if (!bump) bad("scattering needs --system radial-bump");
  const RadialScattering reference(0.0, bump->sigma());
  const LoopPath loop = c.loop->path();
  ScatteringMonodromyOptions o;
  o.method = c.method == "quadrature" ? DeflectionMethod::Quadrature : DeflectionMethod::Trajectory;
  o.scattering.flow.rtol = c.rtol;
  o.scattering.flow.atol = c.atol;
  o.scattering.flow.drift_gate = c.drift_gate;
  const ScatteringMonodromy sm = sw.time("scattering", [&] { return scattering_monodromy(*bump, reference, loop, o); });
  p.result = to_json(sm);
  p.result["loop"] = to_json(loop);
  p.gates["scattering_map_matches"] = sm.map_matrix == sm.matrix;
  p.files["scattering_phi.csv"] = track_csv(sm.values, sm.phi, "phi");
  const auto diagram = sw.time("diagram", [&] { return bifurcation_diagram(s, *c.window, c.resolution / 2); });
  const Overlay jump{{{0.0, bump->v0()}, {0.0, c.window->h_hi}}, "#888888", true, "deflection jump"};
  p.files["scattering.svg"] = diagram_svg(diagram, *c.window, s.name() + ": scattering loop", {loop}, {jump});
  return p;
}

Pending run_figures(Stopwatch& sw) {
  Pending p;
  FigureBundle b = sw.time("figures", [&] { return reproduce_figures(); });
  p.result = b.summary;
  const auto& m = b.summary;
  p.gates["pendulum_methods_agree"] = m["pendulum"]["matrix"] == m["pendulum"]["fixed_point_matrix"];
  p.gates["quantum_matches_classical"] = m["quantum"]["matrix"] == m["pendulum"]["matrix"];
  p.gates["quotient_matches_census"] = m["resonance"]["quotient_unquotiented"] == m["resonance"]["fractional_matrix"];
  p.gates["double_cell_matches_census"] = m["resonance"]["double_cell_matrix"] == m["resonance"]["fractional_matrix"];
  p.gates["scattering_map_matches"] = m["scattering"]["matrix"] == m["scattering"]["map_matrix"];
  p.files = std::move(b.files);
  return p;
}

Pending run_selftest(Stopwatch& sw) {
  Pending p;
  Json checks = Json::array();
  auto check = [&](const std::string& name, auto&& body) {
    bool ok = false;
    std::string detail;
    try {
      std::tie(ok, detail) = sw.time(name, body);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    checks.push_back(Json{{"name", name}, {"passed", ok}, {"detail", detail}});
    p.gates[name] = ok;
  };
  check("rational", [] {
    const RationalMatrix m = RationalMatrix::unipotent(Rational(1, 2));
    const bool ok = (m * m.inverse()).is_identity() && to_string(m) == "[[1,1/2],[0,1]]";
    return std::pair{ok, to_string(m)};
  });
  check("free_flow_deflection", [] {
    const RadialScattering free_flow(0.0, 1.0);
    const double t = deflection_angle(free_flow, {0.7, 1.0}).phi;
    const double q = deflection_angle(free_flow, {0.7, 1.0}, DeflectionMethod::Quadrature).phi;
    return std::pair{std::abs(t - 0.5) < 1e-8 && std::abs(q - 0.5) < 1e-8, format_double(t)};
  });
  check("pendulum_monodromy", [] {
    const SphericalPendulum pendulum;
    const auto r = monodromy_by_rotation(pendulum, default_loop(pendulum));
    return std::pair{r.matrix == RationalMatrix::unipotent(Rational(1)), to_string(r.matrix)};
  });
  check("free_sphere_spectrum", [] {
    SpectrumOptions opt;
    opt.gravity = 0.0;
    const double hbar = 0.1;
    const SpectralLattice l = pendulum_joint_spectrum(hbar, -5, 5, 3.0, opt);
    double err = 0.0;
    for (const auto& pt : l.points) {
      const double deg = std::abs(pt.m) + pt.n;
      err = std::max(err, std::abs(pt.e - 0.5 * hbar * hbar * deg * (deg + 1.0)));
    }
    return std::pair{err < 1e-10, format_double(err)};
  });
  check("pendulum_fixed_point_weights", [] {
    const SphericalPendulum pendulum;
    const auto fp = monodromy_by_fixed_points(pendulum, default_loop(pendulum));
    const bool ok = fp.inside.size() == 1 && fp.inside[0].m == 1 && fp.inside[0].n == -1;
    return std::pair{ok, std::to_string(fp.inside.size()) + " fixed point(s)"};
  });
  p.result["checks"] = std::move(checks);
  return p;
}

template <class T>
T get(const Json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad("config field '" + key + "' has the wrong type");
  }
}

}  // namespace

std::string to_string(Command c) { return command_names().at(c); }

Command parse_command(const std::string& name) {
  for (const auto& [c, n] : command_names())
    if (n == name) return c;
  bad("unknown command '" + name + "'");
}

LoopPath LoopSpec::path() const {
  if (shape == "circle") return LoopPath::circle(center, radius, samples, orientation);
  if (shape == "ellipse") return LoopPath::ellipse(center, semi_h, semi_j, samples, orientation);
  bad("unknown loop shape '" + shape + "'");
}

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = to_string(c.command);
  j["system"] = c.system;
  j["v0"] = c.v0;
  j["sigma"] = c.sigma;
  if (c.loop) {
    Json l;
    l["shape"] = c.loop->shape;
    l["center"] = Json::array({c.loop->center.j, c.loop->center.h});
    if (c.loop->shape == "circle") {
      l["radius"] = c.loop->radius;
    } else {
      l["semi_h"] = c.loop->semi_h;
      l["semi_j"] = c.loop->semi_j;
    }
    l["samples"] = c.loop->samples;
    l["orientation"] = c.loop->orientation == Orientation::Ccw ? "ccw" : "cw";
    j["loop"] = l;
  }
  j["method"] = c.method;
  j["lattice"] = c.lattice;
  j["hbar"] = c.hbar;
  j["multiplier"] = c.multiplier;
  if (c.cell) j["cell"] = Json::array({(*c.cell)[0], (*c.cell)[1]});
  if (c.window) j["window"] = Json::array({c.window->j_lo, c.window->j_hi, c.window->h_lo, c.window->h_hi});
  j["resolution"] = c.resolution;
  j["rtol"] = c.rtol;
  j["atol"] = c.atol;
  j["drift_gate"] = c.drift_gate;
  j["out_dir"] = c.out_dir;
  j["format"] = c.format;
  j["seed"] = c.seed;
  return j;
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) bad("config must be a JSON object");
  static const std::set<std::string> known{"command", "system", "v0",         "sigma",      "loop",   "method",
                                           "lattice", "hbar",   "multiplier", "cell",       "window", "resolution",
                                           "rtol",    "atol",   "drift_gate", "out_dir",    "format", "seed"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) bad("unknown config field '" + key + "'");
  if (!j.contains("command")) bad("config needs a 'command'");
  RunConfig c;
  c.command = parse_command(get<std::string>(j, "command"));
  if (j.contains("system")) c.system = get<std::string>(j, "system");
  if (j.contains("v0")) c.v0 = get<double>(j, "v0");
  if (j.contains("sigma")) c.sigma = get<double>(j, "sigma");
  if (j.contains("loop")) {
    const Json& l = j.at("loop");
    if (!l.is_object()) bad("config field 'loop' must be an object");
    static const std::set<std::string> loop_keys{"shape", "center", "radius", "semi_h", "semi_j", "samples",
                                                 "orientation"};
    for (const auto& [key, value] : l.items())
      if (!loop_keys.count(key)) bad("unknown loop field '" + key + "'");
    LoopSpec s;
    if (l.contains("shape")) s.shape = get<std::string>(l, "shape");
    const auto center = get<std::vector<double>>(l, "center");
    if (center.size() != 2) bad("loop center must be [j, h]");
    s.center = {center[0], center[1]};
    if (l.contains("radius")) s.radius = get<double>(l, "radius");
    if (l.contains("semi_h")) s.semi_h = get<double>(l, "semi_h");
    if (l.contains("semi_j")) s.semi_j = get<double>(l, "semi_j");
    if (l.contains("samples")) s.samples = get<int>(l, "samples");
    if (l.contains("orientation")) {
      const auto o = get<std::string>(l, "orientation");
      if (o != "ccw" && o != "cw") bad("loop orientation must be ccw or cw");
      s.orientation = o == "ccw" ? Orientation::Ccw : Orientation::Cw;
    }
    c.loop = s;
  }
  if (j.contains("method")) c.method = get<std::string>(j, "method");
  if (j.contains("lattice")) c.lattice = get<std::string>(j, "lattice");
  if (j.contains("hbar")) c.hbar = get<double>(j, "hbar");
  if (j.contains("multiplier")) c.multiplier = get<int>(j, "multiplier");
  if (j.contains("cell")) {
    const auto cell = get<std::vector<int>>(j, "cell");
    if (cell.size() != 2) bad("cell must be [m, n]");
    c.cell = std::array<int, 2>{cell[0], cell[1]};
  }
  if (j.contains("window")) {
    const auto w = get<std::vector<double>>(j, "window");
    if (w.size() != 4) bad("window must be [j_lo, j_hi, h_lo, h_hi]");
    c.window = Window{w[0], w[1], w[2], w[3]};
  }
  if (j.contains("resolution")) c.resolution = get<int>(j, "resolution");
  if (j.contains("rtol")) c.rtol = get<double>(j, "rtol");
  if (j.contains("atol")) c.atol = get<double>(j, "atol");
  if (j.contains("drift_gate")) c.drift_gate = get<double>(j, "drift_gate");
  if (j.contains("out_dir")) c.out_dir = get<std::string>(j, "out_dir");
  if (j.contains("format")) c.format = get<std::string>(j, "format");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  return c;
}

void validate(const RunConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) bad(std::string(name) + " must be positive");
  };
  positive(c.rtol, "rtol");
  positive(c.atol, "atol");
  positive(c.drift_gate, "drift_gate");
  positive(c.v0, "v0");
  positive(c.sigma, "sigma");
  if (c.hbar < 0.0 || !std::isfinite(c.hbar)) bad("hbar must be positive");
  if (c.multiplier < 0) bad("multiplier must be positive");
  if (c.resolution < 2 || c.resolution > 1000) bad("resolution must lie in [2, 1000]");
  if (c.format != "json" && c.format != "csv" && c.format != "svg" && c.format != "all")
    bad("format must be json, csv, svg or all");
  if (!c.system.empty()) make_system(c.system);
  if (!c.lattice.empty() && c.lattice != "quantum" && c.lattice != "bohr-sommerfeld" && !is_lattice_file(c.lattice))
    bad("lattice must be quantum, bohr-sommerfeld or a lattice CSV file");
  if (c.loop) {
    const LoopSpec& l = *c.loop;
    if (l.shape == "circle") {
      positive(l.radius, "loop radius");
    } else if (l.shape == "ellipse") {
      positive(l.semi_h, "loop semi_h");
      positive(l.semi_j, "loop semi_j");
    } else {
      bad("loop shape must be circle or ellipse");
    }
    if (l.samples < 8) bad("loop samples must be at least 8");
  }
  if (c.window && !(c.window->j_hi > c.window->j_lo && c.window->h_hi > c.window->h_lo))
    bad("window must have j_lo < j_hi and h_lo < h_hi");
  static const std::map<Command, std::set<std::string>> methods{
      {Command::Monodromy, {"", "rotation", "fixed-point", "fixed-points", "both"}},
      {Command::Fractional, {"", "census", "quotient", "both"}},
      {Command::Scattering, {"", "trajectory", "quadrature"}}};
  const auto it = methods.find(c.command);
  if (it != methods.end() ? !it->second.count(c.method) : !c.method.empty())
    bad("method '" + c.method + "' does not apply to " + to_string(c.command));
}

RunConfig resolve(const RunConfig& in) {
  validate(in);
  RunConfig c = in;
  if (c.system.empty()) {
    switch (c.command) {
      case Command::Fractional: c.system = "resonance-1-2"; break;
      case Command::Scattering: c.system = "radial-bump"; break;
      default: c.system = "spherical-pendulum";
    }
  }
  const auto s = system_of(c);
  const bool needs_loop = c.command == Command::Monodromy || c.command == Command::CellTransport ||
                          c.command == Command::Fractional || c.command == Command::Scattering;
  if (!c.loop && needs_loop) c.loop = loop_spec_of(default_loop(*s), *s);
  const bool lattice_cmd = c.command == Command::Spectrum || c.command == Command::CellTransport;
  if (!c.window) c.window = lattice_cmd ? lattice_window(*s) : default_window(*s);
  if (lattice_cmd) {
    if (c.lattice.empty()) c.lattice = is_quantum_capable(s->id()) ? "quantum" : "bohr-sommerfeld";
    if (c.hbar == 0.0) c.hbar = default_hbar(s->id());
    if (c.multiplier == 0) c.multiplier = s->id() == SystemId::Resonance1m2 ? 2 : 1;
  }
  if (c.method == "fixed-points") c.method = "fixed-point";
  if (c.method.empty()) {
    if (c.command == Command::Monodromy || c.command == Command::Fractional) c.method = "both";
    if (c.command == Command::Scattering) c.method = "trajectory";
  }
  return c;
}

RunOutcome run(const RunConfig& config) {
  RunOutcome out;
  RunConfig c;
  try {
    c = resolve(config);
  } catch (const Error& e) {
    out.exit_code = 2;
    out.report = error_report("invalid-config", e.what());
    return out;
  }
  Stopwatch sw(out.timings);
  Pending p;
  try {
    const bool needs_system = c.command != Command::ReproduceFigures && c.command != Command::Selftest;
    std::unique_ptr<System> s;
    if (needs_system) s = system_of(c);
    switch (c.command) {
      case Command::Bifurcation: p = run_bifurcation(c, *s, sw); break;
      case Command::Monodromy: p = run_monodromy(c, *s, sw); break;
      case Command::Spectrum: p = run_spectrum(c, *s, sw); break;
      case Command::CellTransport: p = run_cell_transport(c, *s, sw); break;
      case Command::Fractional: p = run_fractional(c, *s, sw); break;
      case Command::Scattering: p = run_scattering(c, *s, sw); break;
      case Command::ReproduceFigures: p = run_figures(sw); break;
      case Command::Selftest: p = run_selftest(sw); break;
    }
  } catch (const Error& e) {
    out.exit_code = 1;
    out.report = error_report(to_string(e.kind()), e.what());
    out.report["command"] = to_string(c.command);
    out.report["config"] = to_json(c);
    return out;
  }
  bool ok = true;
  for (const auto& [name, passed] : p.gates.items()) ok = ok && passed.get<bool>();
  out.exit_code = ok ? 0 : 1;
  Json report;
  report["schema_version"] = kReportSchemaVersion;
  report["status"] = ok ? "ok" : "gate-failed";
  report["command"] = to_string(c.command);
  report["config"] = to_json(c);
  report["result"] = std::move(p.result);
  report["gates"] = std::move(p.gates);
  out.report = std::move(report);
  const std::string stem = to_string(c.command);
  out.files[stem + ".json"] = out.report.dump(2) + "\n";
  for (auto& [name, content] : p.files) {
    const std::string ext = std::filesystem::path(name).extension().string();
    if (c.command == Command::ReproduceFigures || wants(c, ext.substr(1))) out.files[name] = std::move(content);
  }
  if (!wants(c, "json") && c.command != Command::ReproduceFigures) out.files.erase(stem + ".json");
  return out;
}

void write_outputs(const RunConfig& config, const RunOutcome& outcome) {
  if (config.out_dir.empty()) return;
  const std::filesystem::path dir(config.out_dir);
  for (const auto& [name, content] : outcome.files) write_text((dir / name).string(), content);
  if (!outcome.timings.empty())
    write_text((dir / (to_string(config.command) + ".timings.json")).string(), outcome.timings.dump(2) + "\n");
}

}  // namespace monolab
