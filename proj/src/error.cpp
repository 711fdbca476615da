#include "cexp/error.hpp"

namespace cexp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedSpec: return "MalformedSpec";
    case ErrorKind::NormViolation: return "NormViolation";
    case ErrorKind::DuplicateSupport: return "DuplicateSupport";
    case ErrorKind::CoefficientOutOfRange: return "CoefficientOutOfRange";
    case ErrorKind::NonHermitianTerm: return "NonHermitianTerm";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::GraphTooLarge: return "GraphTooLarge";
    case ErrorKind::DisconnectedInput: return "DisconnectedInput";
    case ErrorKind::SizeZero: return "SizeZero";
    case ErrorKind::DisconnectedCluster: return "DisconnectedCluster";
    case ErrorKind::SizeCap: return "SizeCap";
    case ErrorKind::NotAPartition: return "NotAPartition";
    case ErrorKind::EpsilonNonpositive: return "EpsilonNonpositive";
    case ErrorKind::PlanInfeasible: return "PlanInfeasible";
    case ErrorKind::IncompatibleHamiltonians: return "IncompatibleHamiltonians";
    case ErrorKind::SystemTooLarge: return "SystemTooLarge";
    case ErrorKind::IllConditionedFit: return "IllConditionedFit";
    case ErrorKind::OutsideRadius: return "OutsideRadius";
    case ErrorKind::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorKind::TimeTooLarge: return "TimeTooLarge";
    case ErrorKind::MixedStateUnsupported: return "MixedStateUnsupported";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::Usage: return "Usage";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutsideRadius:
    case ErrorKind::TimeTooLarge:
      return 3;
    case ErrorKind::SizeCap:
    case ErrorKind::GraphTooLarge:
    case ErrorKind::PlanInfeasible:
    case ErrorKind::SystemTooLarge:
    case ErrorKind::Overflow:
      return 4;
    case ErrorKind::IllConditionedFit:
      return 1;
    default:
      return 2;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace cexp
