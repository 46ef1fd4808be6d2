#include "theta_secant/errors.hpp"

namespace theta_secant {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NonPosDef: return "NonPosDef";
    case ErrorKind::RadiusCap: return "RadiusCap";
    case ErrorKind::DegenerateCurve: return "DegenerateCurve";
    case ErrorKind::QuadratureStall: return "QuadratureStall";
    case ErrorKind::PathFailure: return "PathFailure";
    case ErrorKind::BranchPoint: return "BranchPoint";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::RootSearchFailed: return "RootSearchFailed";
    case ErrorKind::DivisorHit: return "DivisorHit";
    case ErrorKind::LostZero: return "LostZero";
    case ErrorKind::DegenerateZero: return "DegenerateZero";
    case ErrorKind::GuardFailed: return "GuardFailed";
    case ErrorKind::Collision: return "Collision";
    case ErrorKind::WindowExhausted: return "WindowExhausted";
    case ErrorKind::NonPeriodic: return "NonPeriodic";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::NonPosDef:
    case ErrorKind::DegenerateCurve:
    case ErrorKind::CoincidentPoints:
    case ErrorKind::DimensionMismatch:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace theta_secant
