#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cexp {

enum class ErrorKind {
  MalformedSpec,
  NormViolation,
  DuplicateSupport,
  CoefficientOutOfRange,
  NonHermitianTerm,
  DimensionMismatch,
  GraphTooLarge,
  DisconnectedInput,
  SizeZero,
  DisconnectedCluster,
  SizeCap,
  NotAPartition,
  EpsilonNonpositive,
  PlanInfeasible,
  IncompatibleHamiltonians,
  SystemTooLarge,
  IllConditionedFit,
  OutsideRadius,
  DeltaOutOfRange,
  TimeTooLarge,
  MixedStateUnsupported,
  Overflow,
  Usage,
};

std::string_view to_string(ErrorKind kind);

// Process exit code used by the command-line tool for a given error kind.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace cexp
