#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace theta_secant {

enum class ErrorKind {
  InvalidInput,
  NonPosDef,
  RadiusCap,
  DegenerateCurve,
  QuadratureStall,
  PathFailure,
  BranchPoint,
  CoincidentPoints,
  ZeroVector,
  DimensionMismatch,
  RankDeficient,
  RootSearchFailed,
  DivisorHit,
  LostZero,
  DegenerateZero,
  GuardFailed,
  Collision,
  WindowExhausted,
  NonPeriodic,
};

std::string_view error_name(ErrorKind kind);

// Validation errors map to CLI exit code 2, everything else to 3.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace theta_secant
