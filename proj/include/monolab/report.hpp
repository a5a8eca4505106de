#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "monolab/bifurcation.hpp"
#include "monolab/cell_transport.hpp"
#include "monolab/classical.hpp"
#include "monolab/errors.hpp"
#include "monolab/fractional.hpp"
#include "monolab/scattering.hpp"
#include "monolab/spectrum.hpp"

namespace monolab {

/// Keys keep insertion order so identical runs serialise identically.
using Json = nlohmann::ordered_json;

constexpr int kReportSchemaVersion = 1;

Json to_json(EMValue v);
/// Rational matrices are serialised as strings, "[[1,1/2],[0,1]]".
Json to_json(const RationalMatrix& m);
Json to_json(const LoopPath& loop);
Json to_json(const FixedPointRecord& r);
Json to_json(const MonodromyResult& r);
Json to_json(const FixedPointMonodromy& r);
Json to_json(const std::vector<ChernLevel>& levels);
Json to_json(const std::vector<CriticalPoint>& diagram);
/// Summary of a lattice; the points themselves go to CSV.
Json lattice_summary(const SpectralLattice& lattice);
Json to_json(const CellTransportResult& r, const SpectralLattice& lattice);
Json to_json(const SeifertData& d);
Json to_json(const FractionalMatrix& f);
Json to_json(const QuotientResult& q);
Json to_json(const ScatteringMonodromy& s);

/// {"status": "error", "error": {"kind", "message"}}
Json error_report(std::string_view kind, const std::string& message);

/// "j,h,<name>" rows.
std::string track_csv(const std::vector<EMValue>& values, const std::vector<double>& track, const std::string& name);
std::string critical_csv(const std::vector<CriticalPoint>& diagram);
std::string lattice_csv(const SpectralLattice& lattice);

/// Fixed 17-significant-digit formatting used by every CSV writer.
std::string format_double(double x);

/// Writes `content` to `path`, creating parent directories.
void write_text(const std::string& path, const std::string& content);

}  // namespace monolab
