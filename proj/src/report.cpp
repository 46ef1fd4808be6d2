#include "theta_secant/report.hpp"

#include <cmath>
#include <limits>

namespace theta_secant {

namespace {

ordered_json number_to_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const ordered_json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    fail(ErrorKind::InvalidInput, "report: bad number '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

CheckRecord CheckRecord::make(std::string name, double residual, double threshold, Bound bound) {
  CheckRecord r;
  r.name = std::move(name);
  r.residual = residual;
  r.threshold = threshold;
  r.bound = bound;
  // NaN fails either way.
  r.pass = bound == Bound::Max ? residual <= threshold : residual >= threshold;
  return r;
}

bool Report::pass() const {
  if (error) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

int Report::exit_code() const {
  if (error) return is_validation_error(error->kind) ? 2 : 3;
  return pass() ? 0 : 1;
}

std::optional<ErrorKind> error_kind_from_name(std::string_view name) {
  for (int k = 0; k <= static_cast<int>(ErrorKind::NonPeriodic); ++k) {
    auto kind = static_cast<ErrorKind>(k);
    if (error_name(kind) == name) return kind;
  }
  return std::nullopt;
}

ordered_json report_to_json(const Report& report) {
  ordered_json j;
  j["scenario"] = report.scenario;
  j["pass"] = report.pass();
  j["exit_code"] = report.exit_code();
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    ordered_json r;
    r["name"] = c.name;
    r["residual"] = number_to_json(c.residual);
    r["threshold"] = number_to_json(c.threshold);
    r["bound"] = c.bound == Bound::Max ? "max" : "min";
    r["pass"] = c.pass;
    checks.push_back(std::move(r));
  }
  j["checks"] = std::move(checks);
  if (report.error) {
    j["error"] = {{"kind", std::string(error_name(report.error->kind))}, {"message", report.error->message}};
  }
  j["artifacts"] = report.artifacts;
  j["environment"] = {{"version", report.version}, {"seed", report.seed}, {"radius_cap", report.radius_cap}};
  j["timing"] = {{"seconds", report.seconds}};
  return j;
}

Report report_from_json(const ordered_json& j) {
  Report r;
  r.scenario = j.at("scenario");
  for (const auto& c : j.at("checks")) {
    CheckRecord rec;
    rec.name = c.at("name").get<std::string>();
    rec.residual = number_from_json(c.at("residual"));
    rec.threshold = number_from_json(c.at("threshold"));
    const std::string bound = c.at("bound").get<std::string>();
    if (bound != "max" && bound != "min") fail(ErrorKind::InvalidInput, "report: bad bound '" + bound + "'");
    rec.bound = bound == "max" ? Bound::Max : Bound::Min;
    rec.pass = c.at("pass").get<bool>();
    r.checks.push_back(std::move(rec));
  }
  if (j.contains("error")) {
    const std::string name = j["error"].at("kind").get<std::string>();
    auto kind = error_kind_from_name(name);
    if (!kind) fail(ErrorKind::InvalidInput, "report: unknown error kind '" + name + "'");
    r.error = ErrorRecord{*kind, j["error"].at("message").get<std::string>()};
  }
  r.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  const auto& env = j.at("environment");
  r.version = env.at("version").get<std::string>();
  r.seed = env.at("seed").get<std::uint64_t>();
  r.radius_cap = env.at("radius_cap").get<int>();
  r.seconds = j.at("timing").at("seconds").get<double>();
  return r;
}

}  // namespace theta_secant
