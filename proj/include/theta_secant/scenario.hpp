#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "theta_secant/curve.hpp"
#include "theta_secant/report.hpp"

namespace theta_secant {

enum class Scenario {
  ThetaSelftest,
  FayTrisecant,
  DivisorIdentities,
  Toda,
  Bdhe,
  RsDynamics,
  WaveSeries,
  Controls,
};

std::string_view scenario_name(Scenario s);
// InvalidInput for unknown names.
Scenario parse_scenario(std::string_view name);
const std::vector<Scenario>& all_scenarios();

// Size fields left at 0 take the scenario default (see default_sizes).
struct ScenarioConfig {
  Scenario scenario = Scenario::ThetaSelftest;
  ordered_json curve;  // reference string ("corpus#name", "path#name") or inline record; null = default
  std::uint64_t seed = 1;
  std::map<std::string, double> tolerances;  // overrides of default_tolerances(scenario)
  int samples = 0;
  int window = 0;
  int grid = 0;
  std::string csv_dir;  // empty: no CSV artifacts
};

struct ScenarioSizes {
  int samples, window, grid;
};
ScenarioSizes default_sizes(Scenario s);

// Tolerance names accepted by a scenario, with their defaults. Checks carry
// the same names.
const std::map<std::string, double>& default_tolerances(Scenario s);

// Strict parse: unknown fields, unknown tolerance names and tolerances
// outside [1e-16, 1e-1] raise InvalidInput.
ScenarioConfig config_from_json(const ordered_json& j);
ordered_json config_to_json(const ScenarioConfig& c);
// Checks tolerance names and ranges and size limits of an assembled config.
void validate_config(const ScenarioConfig& c);

// One corpus record: {"name", "kind": "genus1" | "hyperelliptic2",
// "tau": [re, im], "poly": [c0, ..., c5]} with ascending coefficients, each a
// number or [re, im].
CurveSpec curve_from_json(const ordered_json& j);
std::vector<CurveSpec> load_corpus(const std::string& path);

// Resolves "corpus#name" against corpus_path, "path#name" against that file,
// and inline records. A null reference resolves to corpus#x5m1.
CurveSpec resolve_curve(const ordered_json& ref, const std::string& corpus_path);

struct RunOptions {
  std::string corpus_path;
  std::string version = "dev";
};

// Never throws for errors of the numerical modules: they end up in
// Report::error. Timing is the only field that varies between identical runs.
Report run_scenario(const ScenarioConfig& config, const RunOptions& options);

}  // namespace theta_secant
