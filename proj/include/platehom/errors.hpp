#pragma once

#include <stdexcept>
#include <string>

namespace platehom {

enum class ErrKind {
  EmptyCoefficients,
  EllipticityViolation,
  IrrationalDirection,
  DetDegenerate,
  ClassificationMismatch,
  SelfOverlap,
  NonContiguousPieces,
  OutOfRange,
  NewtonDivergence,
  QuadratureNotConverged,
  ChartMismatch,
  ParseError,
  ValidationError,
};

inline const char* to_string(ErrKind k) {
  switch (k) {
    case ErrKind::EmptyCoefficients: return "EmptyCoefficients";
    case ErrKind::EllipticityViolation: return "EllipticityViolation";
    case ErrKind::IrrationalDirection: return "IrrationalDirection";
    case ErrKind::DetDegenerate: return "DetDegenerate";
    case ErrKind::ClassificationMismatch: return "ClassificationMismatch";
    case ErrKind::SelfOverlap: return "SelfOverlap";
    case ErrKind::NonContiguousPieces: return "NonContiguousPieces";
    case ErrKind::OutOfRange: return "OutOfRange";
    case ErrKind::NewtonDivergence: return "NewtonDivergence";
    case ErrKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrKind::ChartMismatch: return "ChartMismatch";
    case ErrKind::ParseError: return "ParseError";
    case ErrKind::ValidationError: return "ValidationError";
  }
  return "UnknownError";
}

/// All contract violations surface as this exception; `path` is set for
/// config-level diagnostics (e.g. "chart.s_hi").
class Error : public std::runtime_error {
 public:
  Error(ErrKind kind, std::string message, std::string path = {})
      : std::runtime_error(std::string(to_string(kind)) +
                           (path.empty() ? "" : " at " + path) + ": " + message),
        kind_(kind),
        path_(std::move(path)) {}

  ErrKind kind() const { return kind_; }
  const std::string& path() const { return path_; }

 private:
  ErrKind kind_;
  std::string path_;
};

[[noreturn]] inline void fail(ErrKind kind, const std::string& message,
                              const std::string& path = {}) {
  throw Error(kind, message, path);
}

}  // namespace platehom
