#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rrt {

enum class ErrorKind {
  NonMonotonicNodes,
  TooFewNodes,
  InvalidArgument,
  NonRectangularDomain,
  LayoutMismatch,
  InnerSolveDiverged,
  NotConverged,
  KTooLarge,
  OracleCapExceeded,
  AmbiguousCluster,
  OddMeshDimensions,
  DegenerateRatio,
  AmbiguousAssignment,
  ZeroVector,
  DimensionMismatch,
  SingularSystem,
  IoFailure,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Library exception. Every failure the library reports carries one of the
/// ErrorKind tags so callers (and the CLI failure section) can dispatch on it.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonMonotonicNodes: return "NonMonotonicNodes";
    case ErrorKind::TooFewNodes: return "TooFewNodes";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonRectangularDomain: return "NonRectangularDomain";
    case ErrorKind::LayoutMismatch: return "LayoutMismatch";
    case ErrorKind::InnerSolveDiverged: return "InnerSolveDiverged";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::OracleCapExceeded: return "OracleCapExceeded";
    case ErrorKind::AmbiguousCluster: return "AmbiguousCluster";
    case ErrorKind::OddMeshDimensions: return "OddMeshDimensions";
    case ErrorKind::DegenerateRatio: return "DegenerateRatio";
    case ErrorKind::AmbiguousAssignment: return "AmbiguousAssignment";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace rrt
