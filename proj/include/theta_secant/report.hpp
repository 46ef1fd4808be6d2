#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "theta_secant/errors.hpp"

namespace theta_secant {

using ordered_json = nlohmann::ordered_json;

// Max: passes when residual <= threshold. Min: passes when residual >= threshold.
enum class Bound { Max, Min };

struct CheckRecord {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  Bound bound = Bound::Max;
  bool pass = false;

  static CheckRecord make(std::string name, double residual, double threshold, Bound bound = Bound::Max);
};

struct ErrorRecord {
  ErrorKind kind = ErrorKind::InvalidInput;
  std::string message;
};

struct Report {
  ordered_json scenario;  // echo of the configuration that ran
  std::vector<CheckRecord> checks;
  std::vector<std::string> artifacts;
  std::optional<ErrorRecord> error;
  std::string version;
  std::uint64_t seed = 0;
  int radius_cap = 0;
  double seconds = 0.0;

  // True iff no error and every check passes.
  bool pass() const;
  // 0 pass, 1 failed check, 2 validation error, 3 numerical error.
  int exit_code() const;
};

// Inverse of error_name; nullopt for unknown names.
std::optional<ErrorKind> error_kind_from_name(std::string_view name);

// Non-finite residuals are written as the strings "inf", "-inf" and "nan" so
// the round trip is exact.
ordered_json report_to_json(const Report& report);
Report report_from_json(const ordered_json& j);

}  // namespace theta_secant
