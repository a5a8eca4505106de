#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace monolab {

/// Failure categories shared by every pipeline. The CLI maps them to
/// structured error reports.
enum class ErrorKind {
  InvalidInput,
  ConstraintViolation,
  CriticalValue,
  Seeding,
  NoReturn,
  BranchJump,
  NonInteger,
  DriftExceeded,
  MissedEvent,
  DegenerateFixedPoint,
  RepositionLoop,
  Truncation,
  SnapFailure,
  LatticeDefect,
  InconsistentData,
  IsotropyAmbiguous,
  Captured,
  LongRange,
  Unsupported,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace monolab
