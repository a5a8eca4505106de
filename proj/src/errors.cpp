#include "monolab/errors.hpp"

namespace monolab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::ConstraintViolation: return "constraint-violation";
    case ErrorKind::CriticalValue: return "critical-value";
    case ErrorKind::Seeding: return "seeding";
    case ErrorKind::NoReturn: return "no-return";
    case ErrorKind::BranchJump: return "branch-jump";
    case ErrorKind::NonInteger: return "non-integer-variation";
    case ErrorKind::DriftExceeded: return "drift-exceeded";
    case ErrorKind::MissedEvent: return "missed-event";
    case ErrorKind::DegenerateFixedPoint: return "degenerate-fixed-point";
    case ErrorKind::RepositionLoop: return "reposition-loop";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::SnapFailure: return "snap-failure";
    case ErrorKind::LatticeDefect: return "lattice-defect";
    case ErrorKind::InconsistentData: return "inconsistent-data";
    case ErrorKind::IsotropyAmbiguous: return "isotropy-ambiguous";
    case ErrorKind::Captured: return "captured-trajectory";
    case ErrorKind::LongRange: return "long-range";
    case ErrorKind::Unsupported: return "unsupported";
  }
  return "unknown";
}

}  // namespace monolab
