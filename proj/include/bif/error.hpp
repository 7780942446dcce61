#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bif {

enum class ErrorKind {
  NonFinite,
  NoConvergence,
  NoBracket,
  NoSignChange,
  NotInOmega,
  NoTheta,
  OutOfRange,
  NoGamma,
  RegimeNotApplicable,
  ShapeViolation,
  EventNotReached,
  InvalidNonlinearity,
  InvalidConfig,
  InternalInconsistency,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::NotInOmega: return "NotInOmega";
    case ErrorKind::NoTheta: return "NoTheta";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NoGamma: return "NoGamma";
    case ErrorKind::RegimeNotApplicable: return "RegimeNotApplicable";
    case ErrorKind::ShapeViolation: return "ShapeViolation";
    case ErrorKind::EventNotReached: return "EventNotReached";
    case ErrorKind::InvalidNonlinearity: return "InvalidNonlinearity";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
  }
  return "Unknown";
}

/// Every solver failure in the library is reported through this type; the
/// kind lets nested solves tell a regime boundary from a numerical failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bif
