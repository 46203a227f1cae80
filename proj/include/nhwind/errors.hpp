#pragma once

#include <stdexcept>
#include <string>

namespace nhwind {

// Process exit codes used by the command-line front end. Each error class
// below maps to exactly one of them.
enum class ExitCode : int {
  Ok = 0,
  Usage = 2,
  GaugeSingular = 3,
  Defective = 4,
  AmbiguousTracking = 5,
  NoClosure = 6,
  SolverFailure = 7,
  MatchFailure = 8,
  Io = 9,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
  virtual const char* kind() const noexcept = 0;
};

#define NHWIND_DEFINE_ERROR(Name, Code)                                   \
  class Name : public Error {                                             \
   public:                                                                \
    using Error::Error;                                                   \
    ExitCode exit_code() const noexcept override { return ExitCode::Code; } \
    const char* kind() const noexcept override { return #Name; }          \
  };

/// The vector component fixed to one by the requested gauge vanishes, or the
/// gauge-fixed integrand has a pole the k-grid cannot resolve.
NHWIND_DEFINE_ERROR(GaugeSingular, GaugeSingular)
/// Eigenvector matrix is numerically rank deficient (exceptional point).
NHWIND_DEFINE_ERROR(Defective, Defective)
NHWIND_DEFINE_ERROR(AmbiguousTracking, AmbiguousTracking)
NHWIND_DEFINE_ERROR(NoClosure, NoClosure)
NHWIND_DEFINE_ERROR(SolverFailure, SolverFailure)
NHWIND_DEFINE_ERROR(MatchFailure, MatchFailure)
/// Invalid arguments or a violated operation precondition.
NHWIND_DEFINE_ERROR(PreconditionError, Usage)
NHWIND_DEFINE_ERROR(IoError, Io)

#undef NHWIND_DEFINE_ERROR

}  // namespace nhwind
