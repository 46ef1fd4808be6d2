// theta-secant: runs verification scenarios and prints JSON reports.
//
//   theta-secant <scenario> [--curve ref] [--seed n] [--out path] [--tol name=value]...
//   theta-secant check <scenario> ...
//   theta-secant rs simulate --n N --t-end T --h H [--kernel k] [--out path]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 input error, 3 numerical error.

#include <cstdlib>
#include <optional>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "theta_secant/errors.hpp"
#include "theta_secant/report.hpp"
#include "theta_secant/rng.hpp"
#include "theta_secant/scenario.hpp"
#include "theta_secant/series.hpp"
#include "theta_secant/theta.hpp"

#ifndef THETA_SECANT_VERSION
#define THETA_SECANT_VERSION "dev"
#endif
#ifndef THETA_SECANT_CORPUS
#define THETA_SECANT_CORPUS "data/curves.json"
#endif

namespace {

using namespace theta_secant;

struct RunArgs {
  std::string scenario;
  std::string curve;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> tols;
  std::string config;
  int samples = 0;
  int window = 0;
  int grid = 0;
  std::string csv_dir;
  std::string corpus = THETA_SECANT_CORPUS;
};

struct SimulateArgs {
  int n = 0;
  double t_end = 0.0;
  double h = 0.0;
  std::string kernel = "rational";
  double period = 6.0;
  std::uint64_t seed = 1;
  int sample_every = 1;
  std::string out;
};

void add_run_options(CLI::App* sub, RunArgs& a) {
  sub->add_option("--curve", a.curve, "corpus#name, path#name or an inline JSON record");
  sub->add_option("--seed", a.seed, "64-bit seed");
  sub->add_option("--out", a.out, "write the report here instead of stdout");
  sub->add_option("--tol", a.tols, "override a tolerance, name=value")->take_all();
  sub->add_option("--config", a.config, "JSON scenario config; command-line options override it");
  sub->add_option("--samples", a.samples, "number of seeded samples");
  sub->add_option("--window", a.window, "lattice window side or probe depth");
  sub->add_option("--grid", a.grid, "time grid points");
  sub->add_option("--csv-dir", a.csv_dir, "directory for CSV artifacts");
  sub->add_option("--corpus", a.corpus, "curve corpus used by corpus# references");
}

// Reads THETA_SECANT_CAP into the default truncation cap.
void apply_cap_override() {
  const char* env = std::getenv("THETA_SECANT_CAP");
  if (!env) return;
  std::istringstream in(env);
  int cap = 0;
  if (!(in >> cap) || !in.eof() || cap < 1 || cap > 4096)
    fail(ErrorKind::InvalidInput, std::string("THETA_SECANT_CAP must be an integer in [1, 4096], got '") + env + "'");
  set_default_radius_cap(cap);
}

ScenarioConfig assemble_config(const RunArgs& a) {
  ScenarioConfig c;
  const Scenario scenario = parse_scenario(a.scenario);
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) fail(ErrorKind::InvalidInput, "cannot read config '" + a.config + "'");
    ordered_json j;
    try {
      j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::InvalidInput, "config '" + a.config + "': " + e.what());
    }
    c = config_from_json(j);
    if (c.scenario != scenario)
      fail(ErrorKind::InvalidInput, "config names scenario " + std::string(scenario_name(c.scenario)) +
                                        ", command asks for " + a.scenario);
  }
  c.scenario = scenario;
  if (!a.curve.empty() && a.curve.front() == '{') {
    try {
      c.curve = ordered_json::parse(a.curve);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::InvalidInput, std::string("--curve: ") + e.what());
    }
  } else if (!a.curve.empty()) {
    c.curve = a.curve;
  }
  if (a.seed) c.seed = *a.seed;
  for (const auto& t : a.tols) {
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorKind::InvalidInput, "--tol expects name=value, got '" + t + "'");
    double value = 0.0;
    try {
      size_t used = 0;
      value = std::stod(t.substr(eq + 1), &used);
      if (used != t.size() - eq - 1) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidInput, "--tol value is not a number in '" + t + "'");
    }
    c.tolerances[t.substr(0, eq)] = value;
  }
  if (a.samples) c.samples = a.samples;
  if (a.window) c.window = a.window;
  if (a.grid) c.grid = a.grid;
  if (!a.csv_dir.empty()) c.csv_dir = a.csv_dir;
  validate_config(c);
  return c;
}

int emit(const Report& report, const std::string& out) {
  const std::string text = report_to_json(report).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) {
      std::cerr << "cannot write report to '" << out << "'\n";
      return 2;
    }
    f << text;
  }
  return report.exit_code();
}

int run(const RunArgs& a) {
  Report failed;
  failed.version = THETA_SECANT_VERSION;
  failed.seed = a.seed.value_or(1);
  failed.radius_cap = default_radius_cap();
  try {
    apply_cap_override();
    ScenarioConfig config = assemble_config(a);
    RunOptions options;
    options.corpus_path = a.corpus;
    options.version = THETA_SECANT_VERSION;
    return emit(run_scenario(config, options), a.out);
  } catch (const Error& e) {
    failed.scenario = {{"scenario", a.scenario}};
    failed.error = ErrorRecord{e.kind(), e.what()};
  }
  return emit(failed, a.out);
}

RSKernel parse_kernel(const SimulateArgs& a) {
  if (a.kernel == "rational") return RSKernel::rational();
  if (a.kernel == "trigonometric") return RSKernel::trigonometric(a.period);
  // Rectangular lattice (L, iL).
  if (a.kernel == "elliptic") return RSKernel::elliptic(a.period, cplx(0.0, a.period));
  fail(ErrorKind::InvalidInput, "--kernel must be rational, trigonometric or elliptic");
}

int simulate(const SimulateArgs& a) {
  try {
    apply_cap_override();
    if (a.n < 1 || a.n > 64) fail(ErrorKind::InvalidInput, "--n must be in [1, 64]");
    if (a.sample_every < 1) fail(ErrorKind::InvalidInput, "--sample-every must be positive");
    // Particles two apart on the real axis, jittered, with seeded velocities.
    Rng rng(a.seed);
    RSState s{CVector(a.n), CVector(a.n), parse_kernel(a)};
    for (int i = 0; i < a.n; ++i) s.x[i] = 2.0 * i - (a.n - 1) + rng.complex_uniform(0.2);
    for (int i = 0; i < a.n; ++i) s.xdot[i] = rng.complex_uniform(0.5);
    RSTrajectory tr = rs_integrate(s, a.t_end, a.h, a.sample_every);
    if (a.out.empty()) {
      write_trajectory_csv(tr, std::cout);
    } else {
      std::ofstream f(a.out);
      if (!f) fail(ErrorKind::InvalidInput, "cannot write '" + a.out + "'");
      write_trajectory_csv(tr, f);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << ordered_json{{"error", {{"kind", std::string(error_name(e.kind()))}, {"message", e.what()}}}}.dump()
              << "\n";
    return is_validation_error(e.kind()) ? 2 : 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Theta function secancy and integrable-lattice verification scenarios", "theta-secant"};
  app.set_version_flag("--version", THETA_SECANT_VERSION);
  app.require_subcommand(1);

  RunArgs run_args;
  std::vector<CLI::App*> scenario_cmds;
  for (Scenario s : all_scenarios()) {
    const std::string name(scenario_name(s));
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " scenario");
    add_run_options(sub, run_args);
    scenario_cmds.push_back(sub);
  }
  CLI::App* check = app.add_subcommand("check", "run a scenario by name");
  check->add_option("scenario", run_args.scenario, "scenario name")->required();
  add_run_options(check, run_args);

  SimulateArgs sim;
  CLI::App* rs = app.add_subcommand("rs", "Ruijsenaars-Schneider tools");
  rs->require_subcommand(1);
  CLI::App* simulate_cmd = rs->add_subcommand("simulate", "integrate seeded initial data and print a trajectory CSV");
  // --h is the step size, so help is --help only.
  simulate_cmd->set_help_flag("--help", "print this help message and exit");
  simulate_cmd->add_option("--n", sim.n, "number of particles")->required();
  simulate_cmd->add_option("--t-end", sim.t_end, "final time")->required();
  simulate_cmd->add_option("--h", sim.h, "RK4 step")->required();
  simulate_cmd->add_option("--kernel", sim.kernel, "rational, trigonometric or elliptic");
  simulate_cmd->add_option("--period", sim.period, "period L of the trigonometric and elliptic kernels");
  simulate_cmd->add_option("--seed", sim.seed, "64-bit seed for the initial data");
  simulate_cmd->add_option("--sample-every", sim.sample_every, "write every k-th step");
  simulate_cmd->add_option("--out", sim.out, "write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (simulate_cmd->parsed()) return simulate(sim);
  for (size_t i = 0; i < scenario_cmds.size(); ++i)
    if (scenario_cmds[i]->parsed()) run_args.scenario = std::string(scenario_name(all_scenarios()[i]));
  return run(run_args);
}
