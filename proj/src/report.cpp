#include "monolab/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace monolab {

Json to_json(EMValue v) { return Json{{"j", v.j}, {"h", v.h}}; }

Json to_json(const RationalMatrix& m) { return to_string(m); }

Json to_json(const LoopPath& loop) {
  Json out;
  out["orientation"] = loop.orientation() == Orientation::Ccw ? "ccw" : "cw";
  out["samples"] = loop.samples;
  out["length"] = loop.length();
  Json vertices = Json::array();
  for (const auto& v : loop.vertices) vertices.push_back(Json::array({v.j, v.h}));
  out["vertices"] = std::move(vertices);
  return out;
}

Json to_json(const FixedPointRecord& r) {
  Json out;
  out["value"] = to_json(r.value);
  out["state"] = std::vector<double>(r.state.data(), r.state.data() + r.state.size());
  out["weights"] = Json::array({r.m, r.n});
  out["type"] = r.sign > 0 ? "anti-hopf" : "hopf";
  out["sign"] = r.sign;
  out["residual"] = r.residual;
  return out;
}

Json to_json(const MonodromyResult& r) {
  Json out;
  out["method"] = r.method;
  out["matrix"] = to_json(r.matrix);
  out["m_raw"] = r.m_raw;
  out["samples"] = r.samples;
  out["max_check_residual"] = r.max_check_residual;
  return out;
}

Json to_json(const FixedPointMonodromy& r) {
  Json out;
  out["method"] = "fixed-point";
  out["matrix"] = to_json(r.matrix);
  Json inside = Json::array();
  for (std::size_t i = 0; i < r.inside.size(); ++i) {
    Json p = to_json(r.inside[i]);
    p["winding"] = r.winding[i];
    inside.push_back(std::move(p));
  }
  out["fixed_points"] = std::move(inside);
  return out;
}

Json to_json(const std::vector<ChernLevel>& levels) {
  Json out = Json::array();
  for (const auto& l : levels) out.push_back(Json{{"lo", l.lo}, {"hi", l.hi}, {"chern", l.chern}});
  return out;
}

Json to_json(const std::vector<CriticalPoint>& diagram) {
  Json isolated = Json::array();
  int branch = 0;
  for (const auto& p : diagram) {
    if (p.kind == CriticalKind::Isolated)
      isolated.push_back(Json{{"value", to_json(p.value)}, {"rank", p.rank}});
    else
      ++branch;
  }
  return Json{{"critical_values", diagram.size()}, {"branch_points", branch}, {"isolated", std::move(isolated)}};
}

Json lattice_summary(const SpectralLattice& lattice) {
  Json out;
  out["system"] = lattice.system;
  out["kind"] = lattice.kind == LatticeKind::Quantum ? "quantum" : "bohr-sommerfeld";
  out["hbar"] = lattice.hbar;
  out["points"] = lattice.points.size();
  if (!lattice.points.empty()) {
    int m_lo = lattice.points.front().m, m_hi = m_lo;
    double e_lo = lattice.points.front().e, e_hi = e_lo;
    for (const auto& p : lattice.points) {
      m_lo = std::min(m_lo, p.m);
      m_hi = std::max(m_hi, p.m);
      e_lo = std::min(e_lo, p.e);
      e_hi = std::max(e_hi, p.e);
    }
    out["m_range"] = Json::array({m_lo, m_hi});
    out["e_range"] = Json::array({e_lo, e_hi});
  }
  return out;
}

Json to_json(const CellTransportResult& r, const SpectralLattice& lattice) {
  auto cell = [&](const std::array<int, 3>& c) {
    Json v = Json::array();
    for (int idx : c) {
      const auto& p = lattice.points[idx];
      v.push_back(Json{{"m", p.m}, {"n", p.n}, {"j", p.j}, {"e", p.e}});
    }
    return v;
  };
  Json out;
  out["matrix"] = to_json(r.matrix);
  out["cell_matrix"] = to_json(r.cell_matrix);
  out["multiplier"] = r.multiplier;
  out["steps"] = r.path.size();
  out["max_snap_distance"] = r.max_snap_distance;
  out["initial_cell"] = cell(r.initial);
  out["final_cell"] = cell(r.final);
  return out;
}

Json to_json(const SeifertData& d) {
  Json out;
  Json fps = Json::array();
  for (std::size_t i = 0; i < d.fixed_points.size(); ++i) {
    Json p = to_json(d.fixed_points[i]);
    p["winding"] = d.winding[i];
    fps.push_back(std::move(p));
  }
  out["fixed_points"] = std::move(fps);
  Json exc = Json::array();
  for (const auto& c : d.exceptional)
    exc.push_back(Json{{"value", to_json(c.value)}, {"loop_fraction", c.fraction}, {"order", c.order}});
  out["exceptional_orbits"] = std::move(exc);
  out["euler_number"] = to_string(d.euler_number);
  out["euler_raw"] = to_string(d.euler_raw);
  out["N"] = d.N;
  return out;
}

Json to_json(const FractionalMatrix& f) { return Json{{"matrix", to_json(f.matrix)}, {"transport", f.transport}}; }

Json to_json(const QuotientResult& q) {
  Json out;
  out["quotient_matrix"] = to_json(q.quotient_matrix);
  out["unquotiented"] = to_json(q.unquotiented);
  out["m_raw"] = q.m_raw;
  out["order"] = q.order;
  out["samples"] = q.samples;
  Json gaps = Json::array();
  for (const auto& [a, b] : q.gaps) gaps.push_back(Json::array({a, b}));
  out["gaps"] = std::move(gaps);
  return out;
}

Json to_json(const ScatteringMonodromy& s) {
  Json out;
  out["variation"] = s.variation;
  out["matrix"] = to_json(s.matrix);
  out["map_variation"] = s.map_variation;
  out["map_matrix"] = to_json(s.map_matrix);
  out["max_reference_residual"] = s.max_reference_residual;
  out["samples"] = s.samples;
  Json table = Json::array();
  for (std::size_t i = 0; i < s.phi.size(); ++i)
    table.push_back(Json{{"j", s.values[i].j}, {"h", s.values[i].h}, {"phi", s.phi[i]}});
  out["phi"] = std::move(table);
  return out;
}

Json error_report(std::string_view kind, const std::string& message) {
  Json out;
  out["schema_version"] = kReportSchemaVersion;
  out["status"] = "error";
  out["error"] = Json{{"kind", std::string(kind)}, {"message", message}};
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string track_csv(const std::vector<EMValue>& values, const std::vector<double>& track, const std::string& name) {
  std::ostringstream s;
  s << "j,h," << name << '\n';
  for (std::size_t i = 0; i < track.size() && i < values.size(); ++i)
    s << format_double(values[i].j) << ',' << format_double(values[i].h) << ',' << format_double(track[i]) << '\n';
  return s.str();
}

std::string critical_csv(const std::vector<CriticalPoint>& diagram) {
  std::ostringstream s;
  s << "j,h,kind,rank\n";
  for (const auto& p : diagram)
    s << format_double(p.value.j) << ',' << format_double(p.value.h) << ',' << to_string(p.kind) << ',' << p.rank
      << '\n';
  return s.str();
}

std::string lattice_csv(const SpectralLattice& lattice) {
  std::ostringstream s;
  write_lattice_csv(lattice, s);
  return s.str();
}

void write_text(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::InvalidInput, "failed writing " + path);
}

}  // namespace monolab
