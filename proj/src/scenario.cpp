#include "theta_secant/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "theta_secant/divisor.hpp"
#include "theta_secant/kummer.hpp"
#include "theta_secant/lattice.hpp"
#include "theta_secant/rng.hpp"
#include "theta_secant/series.hpp"
#include "theta_secant/theta.hpp"

namespace theta_secant {

namespace {

constexpr double kGap = 1e4;
constexpr double kTolMin = 1e-16;
constexpr double kTolMax = 1e-1;
constexpr const char* kDefaultCurve = "corpus#x5m1";

struct ScenarioInfo {
  Scenario id;
  const char* name;
  ScenarioSizes sizes;
  std::map<std::string, double> tolerances;
};

const std::vector<ScenarioInfo>& registry() {
  static const std::vector<ScenarioInfo> info = {
      {Scenario::ThetaSelftest, "theta-selftest", {1000, 0, 0},
       {{"evenness", 1e-12}, {"quasi_periodicity", 1e-10}, {"radius_stability", 1e-14},
        {"fd_first", 1e-6}, {"fd_second", 1e-4}}},
      {Scenario::FayTrisecant, "fay-trisecant", {5, 0, 0},
       {{"discrete_fit", 1e-8}, {"semidiscrete_fit", 1e-7}, {"random_control", 1e-2}}},
      {Scenario::DivisorIdentities, "divisor-identities", {10, 10, 0},
       {{"cm7d", 1e-8}, {"cm7", 1e-7}, {"probe", 1e-3}, {"cm7d_control", 1e-2}, {"cm7_control", 1e-2}}},
      {Scenario::Toda, "toda", {1, 8, 0}, {{"toda_psi", 1e-6}, {"exponent_consistency", 1e-6}}},
      {Scenario::Bdhe, "bdhe", {1, 10, 0}, {{"bdhe_psi", 1e-8}, {"exponent_consistency", 1e-6}}},
      {Scenario::RsDynamics, "rs-dynamics", {3, 0, 51}, {{"momentum_drift", 1e-9}, {"elliptic_crosscheck", 1e-5}}},
      {Scenario::WaveSeries, "wave-series", {20, 0, 101},
       {{"cm5", 1e-6}, {"cm5_control", 1e-2}, {"f2d_genus1", 1e-8}, {"f2d_genus2", 1e-7},
        {"f2d_control", 1e-2}, {"residue", 1e-8}, {"residue_control", 1e-2}, {"periodic_recursion", 1e-10}}},
      {Scenario::Controls, "controls", {5, 0, 0},
       {{"jacobian_fit", 1e-8}, {"random_fit", 1e-2}, {"jacobian_cm7d", 1e-8}, {"decomposable_cm7d", 1e-2}}},
  };
  return info;
}

const ScenarioInfo& info_of(Scenario s) {
  for (const auto& i : registry())
    if (i.id == s) return i;
  fail(ErrorKind::InvalidInput, "unknown scenario id");
}

// ---- configuration parsing ----

int int_field(const ordered_json& j, const char* key) {
  if (!j.is_number_integer()) fail(ErrorKind::InvalidInput, std::string("config: '") + key + "' must be an integer");
  return j.get<int>();
}

cplx complex_from_json(const ordered_json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorKind::InvalidInput, what + " must be a number or [re, im]");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, "cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ordered_json parse_json(const std::string& text, const std::string& what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, what + ": " + e.what());
  }
}

// ---- scenario helpers ----

struct Context {
  const ScenarioConfig& config;
  const RunOptions& options;
  std::map<std::string, double> tol;
  ScenarioSizes sizes;
  Report& report;

  void check_max(const std::string& name, double residual) {
    report.checks.push_back(CheckRecord::make(name, residual, tol.at(name), Bound::Max));
  }
  void check_min(const std::string& name, double residual) {
    report.checks.push_back(CheckRecord::make(name, residual, tol.at(name), Bound::Min));
  }
  void check_gap(const std::string& name, double worst_positive, double best_negative) {
    report.checks.push_back(
        CheckRecord::make(name, best_negative / std::max(worst_positive, kResidualFloor), kGap, Bound::Min));
  }
  AbelData curve() const { return build_abel_data(resolve_curve(config.curve, options.corpus_path)); }
  void write_csv(const std::string& file, const std::function<void(std::ostream&)>& body) {
    if (config.csv_dir.empty()) return;
    std::filesystem::create_directories(config.csv_dir);
    const std::string path = (std::filesystem::path(config.csv_dir) / file).string();
    std::ofstream out(path);
    if (!out) fail(ErrorKind::InvalidInput, "cannot write '" + path + "'");
    body(out);
    report.artifacts.push_back(path);
  }
};

// Y = M M^T + 0.4 I with M entries 0.5 N(0, 1), X symmetric uniform in [-1/2, 1/2].
PeriodMatrix random_period_matrix(Rng& rng, int g) {
  RMatrix X(g, g), M(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      X(i, j) = rng.uniform(-0.5, 0.5);
      M(i, j) = 0.5 * rng.normal();
    }
  X = 0.5 * (X + X.transpose()).eval();
  RMatrix Y = M * M.transpose() + 0.4 * RMatrix::Identity(g, g);
  CMatrix B(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) B(i, j) = cplx(X(i, j), Y(i, j));
  return PeriodMatrix(B);
}

// alpha + B beta with alpha, beta uniform in [0, 1)^g: a generic point of the torus.
CVector random_lattice_vector(Rng& rng, const PeriodMatrix& B) {
  const int g = B.genus();
  RVector a(g), b(g);
  for (int j = 0; j < g; ++j) {
    a[j] = rng.uniform();
    b[j] = rng.uniform();
  }
  return a.cast<cplx>() + B.entries() * b.cast<cplx>();
}

PeriodMatrix scalar_matrix(cplx tau) {
  CMatrix B(1, 1);
  B(0, 0) = tau;
  return PeriodMatrix(B);
}

CVector c1(cplx z) { return CVector::Constant(1, z); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), kResidualFloor); }

std::vector<double> uniform_grid(int n, double step) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = step * i;
  return g;
}

// Genus-1 modulus for pole dynamics when the curve is not a torus: additive
// offsets of tau register at the 1e-2 level only for Im tau below about 0.5.
constexpr cplx kPoleTau{0.15, 0.4};

// ---- scenarios ----

void run_theta_selftest(Context& ctx) {
  Rng rng(ctx.config.seed);
  double even = 0, quasi = 0, stable = 0, fd1 = 0, fd2 = 0;
  for (int i = 0; i < ctx.sizes.samples; ++i) {
    const int g = 1 + i % 3;
    PeriodMatrix B = random_period_matrix(rng, g);
    CVector z = rng.complex_vector(g, 1.0);
    ScaledComplex a = theta(B, z);
    even = std::max(even, relative_residual(a, theta(B, -z)));
    for (int j = 0; j < g; ++j) {
      ScaledComplex rhs = ScaledComplex::exp(-kPi * kI * B(j, j) - 2.0 * kPi * kI * z[j]) * a;
      quasi = std::max(quasi, relative_residual(theta(B, CVector(z + B.entries().col(j))), rhs));
    }
    ThetaJet base = theta_jet(B, z, {}, 0);
    ThetaOptions wide;
    wide.radius_override = base.radius + 4;
    ThetaJet more = theta_jet(B, z, {}, 0, {}, wide);
    stable = std::max(stable, std::abs(more.f().value_scaled(base.logscale) - base.value));
    CVector d1 = rng.complex_vector(g, 1.0), d2 = rng.complex_vector(g, 1.0);
    fd1 = std::max(fd1, theta_fd_check({z, B, {}, {d1}, {}}, 1e-4));
    fd2 = std::max(fd2, theta_fd_check({z, B, {}, {d1, d2}, {}}, 1e-4));
  }
  ctx.check_max("evenness", even);
  ctx.check_max("quasi_periodicity", quasi);
  ctx.check_max("radius_stability", stable);
  ctx.check_max("fd_first", fd1);
  ctx.check_max("fd_second", fd2);
}

void run_fay_trisecant(Context& ctx) {
  const AbelData data = ctx.curve();
  Rng rng(ctx.config.seed);
  double discrete = 0, semidiscrete = 0, control = 1e300;
  for (int i = 0; i < ctx.sizes.samples; ++i) {
    FayTuple t = random_fay_tuple(data, rng);
    discrete = std::max(discrete, fit_secancy_discrete(t.vectors.U, t.vectors.V, t.vectors.A, data.B).residual);
    CVector Vt = abel_tangent(data, t.b);
    semidiscrete = std::max(semidiscrete, fit_secancy_semidiscrete(t.vectors.U, Vt, t.vectors.A, data.B).residual);
  }
  for (int i = 0; i < ctx.sizes.samples; ++i) {
    CVector U = random_lattice_vector(rng, data.B), V = random_lattice_vector(rng, data.B),
            A = random_lattice_vector(rng, data.B);
    control = std::min(control, fit_secancy_discrete(U, V, A, data.B).residual);
  }
  ctx.check_max("discrete_fit", discrete);
  ctx.check_max("semidiscrete_fit", semidiscrete);
  ctx.check_min("random_control", control);
  ctx.check_gap("fit_gap", discrete, control);
}

void run_divisor_identities(Context& ctx) {
  const AbelData data = ctx.curve();
  const int g = data.genus();
  Rng rng(ctx.config.seed);
  FayTuple t = random_fay_tuple(data, rng);
  const CVector Vt = abel_tangent(data, t.b);
  // The genus-1 theta divisor is a single point modulo the lattice.
  const int count = g == 1 ? 1 : ctx.sizes.samples;
  auto samples = sample_theta_divisor(data.B, derive_seed(ctx.config.seed, 1), count);
  double cm7d = 0, cm7 = 0, probe = 1e300, cm7d_control = 1e300, cm7_control = 1e300;
  for (const auto& s : samples) {
    cm7d = std::max(cm7d, residual_cm7d(s, t.vectors.U, t.vectors.V, data.B));
    cm7 = std::max(cm7, residual_cm7(s, t.vectors.U, Vt, data.B));
    probe = std::min(probe, singular_locus_probe(s, t.vectors.U, t.vectors.V, data.B, ctx.sizes.window));
    CVector Ur = rng.complex_vector(g, 0.5), Vr = rng.complex_vector(g, 0.5);
    cm7d_control = std::min(cm7d_control, residual_cm7d(s, Ur, Vr, data.B));
    cm7_control = std::min(cm7_control, residual_cm7(s, Ur, Vr, data.B));
  }
  ctx.check_max("cm7d", cm7d);
  ctx.check_max("cm7", cm7);
  ctx.check_min("probe", probe);
  ctx.check_min("cm7d_control", cm7d_control);
  ctx.check_min("cm7_control", cm7_control);
}

void run_lattice(Context& ctx, LatticeKind kind) {
  const AbelData data = ctx.curve();
  const int g = data.genus();
  Rng rng(ctx.config.seed);
  const int W = ctx.sizes.window;
  double residual = 0, consistency = 0;
  for (int i = 0; i < ctx.sizes.samples; ++i) {
    FayTuple t = random_fay_tuple(data, rng);
    CVector Z = rng.complex_vector(g, 0.5);
    FieldTable table;
    if (kind == LatticeKind::Toda) {
      SecancyData s = fit_secancy_semidiscrete(t.vectors.U, abel_tangent(data, t.b), t.vectors.A, data.B);
      table = toda_fields(s.U, s.V, s.A_shifted, s.p, s.E, LatticeWindow::toda(0, W - 1, uniform_grid(W, 0.1), Z),
                          data.B);
      residual = std::max(residual, toda_psi_residual(table));
      ExponentRefit r = refit_exponents(table);
      consistency = std::max({consistency, rel(r.exp_p, s.exp_p), rel(r.E, s.E)});
    } else {
      SecancyData s = fit_secancy_discrete(t.vectors.U, t.vectors.V, t.vectors.A, data.B);
      table = bdhe_fields(s.U, s.V, s.A_shifted, s.p, s.E, LatticeWindow::bdhe(0, W - 1, 0, W - 1, Z), data.B);
      residual = std::max(residual, bdhe_psi_residual(table));
      ExponentRefit r = refit_exponents(table);
      consistency = std::max({consistency, rel(r.exp_p, s.exp_p), rel(r.exp_E, s.exp_E)});
    }
    if (i == 0)
      ctx.write_csv(kind == LatticeKind::Toda ? "toda_fields.csv" : "bdhe_fields.csv",
                    [&](std::ostream& out) { write_field_csv(table, out); });
  }
  ctx.check_max(kind == LatticeKind::Toda ? "toda_psi" : "bdhe_psi", residual);
  ctx.check_max("exponent_consistency", consistency);
}

void run_rs_dynamics(Context& ctx) {
  Rng rng(ctx.config.seed);
  double drift = 0;
  for (int i = 0; i < ctx.sizes.samples; ++i) {
    RSState s{CVector(3), rng.complex_vector(3, 0.5), RSKernel::rational()};
    s.x << cplx(-1.7, 0.3), cplx(0.2, -0.4), cplx(1.9, 0.5);
    s.x += rng.complex_vector(3, 0.2);
    RSTrajectory tr = rs_integrate(s, 1.0, 1e-3, 10);
    for (const auto& v : tr.xdot) drift = std::max(drift, std::abs(v.sum() - s.xdot.sum()));
    if (i == 0) ctx.write_csv("rs_trajectory.csv", [&](std::ostream& out) { write_trajectory_csv(tr, out); });
  }
  ctx.check_max("momentum_drift", drift);

  // Two zeros eta and eta + 1/U of a genus-1 tau against the elliptic system
  // with kernel lattice (2/U, tau/U).
  const CurveSpec spec = resolve_curve(ctx.config.curve, ctx.options.corpus_path);
  const cplx tau_value = spec.kind == CurveKind::Genus1 ? build_abel_data(spec).B(0, 0) : kI;
  PeriodMatrix B = scalar_matrix(tau_value);
  const cplx U(rng.uniform(0.3, 0.45), rng.uniform(-0.05, 0.05));
  LineTau tau = LineTau::continuous(c1(U), c1(rng.complex_uniform(0.25)), c1(rng.complex_uniform(0.1)), B);
  const double step = 0.01;
  const auto grid = uniform_grid(ctx.sizes.grid, step);
  ZeroPath a = track_tau_zero(tau, grid, 0.0, 1.5);
  ZeroPath b = track_tau_zero(tau, grid, a.eta[0] + 1.0 / U, 0.2);
  RSState s{CVector(2), CVector(2), RSKernel::elliptic(2.0 / U, tau_value / U)};
  s.x << a.eta[0], b.eta[0];
  s.xdot << a.eta_dot[0], b.eta_dot[0];
  RSTrajectory tr = rs_integrate(s, grid.back(), step);
  double worst = 0;
  for (size_t n = 0; n < tr.t.size() && n < grid.size(); ++n)
    worst = std::max({worst, std::abs(tr.x[n][0] - a.eta[n]), std::abs(tr.x[n][1] - b.eta[n])});
  ctx.check_max("elliptic_crosscheck", worst);
}

struct LineData {
  CVector U, V, Z;
};

// Generic genus-1 line data. V is redrawn within 0.1 of 0 or of U: V = 0 freezes
// tau in t and U = V collapses the discrete lattice onto a line.
LineData genus1_line(Rng& rng) {
  const cplx U(rng.uniform(0.3, 0.6), rng.uniform(-0.1, 0.1));
  cplx V = rng.complex_uniform(0.5);
  while (std::abs(V) < 0.1 || std::abs(U - V) < 0.1) V = rng.complex_uniform(0.5);
  return {c1(U), c1(V), c1(rng.complex_uniform(0.3))};
}

// Residue defects at levels 0 and 1 for the zero of tau(., nu) nearest guess.
double residue_defect(const LineTau& tau, double nu, cplx guess, Rng& rng) {
  cplx eta = find_tau_zero(tau, nu, guess, 0.25);
  DiscreteSeries table;
  table.x0 = eta;
  table.nu0 = nu;
  table.window = 8;
  DiscretePotential u = discrete_potential(tau);
  discrete_series_extend(table, u, 0, -1, rng.complex_uniform(1.0), rng.complex_uniform(1.0));
  const double r0 = residue_consistency(tau, eta, nu, 1.0, 1.0).defect;
  const double r1 = residue_consistency(tau, eta, nu, table.at(1, 1, -1), table.at(1, -1, -1)).defect;
  return std::max(r0, r1);
}

void run_wave_series(Context& ctx) {
  Rng rng(ctx.config.seed);
  const CurveSpec spec = resolve_curve(ctx.config.curve, ctx.options.corpus_path);
  const AbelData data = build_abel_data(spec);
  const PeriodMatrix B1 = data.genus() == 1 ? data.B : scalar_matrix(kPoleTau);
  const auto grid = uniform_grid(ctx.sizes.grid, 0.01);
  const int trials = std::max(1, ctx.sizes.samples / 4);

  double cm5 = 0, cm5_control = 1e300;
  for (int i = 0; i < trials; ++i) {
    LineData g = genus1_line(rng);
    LineTau tau = LineTau::continuous(g.U, g.V, g.Z, B1);
    ZeroPath p = track_tau_zero(tau, grid, canonical_zero(tau, 0.0), 0.25);
    cm5 = std::max(cm5, cm5_residual(p, tau));
    LineTau off = tau;
    off.offset = 0.05;
    cm5_control = std::min(cm5_control, cm5_residual(track_tau_zero(off, grid, p.eta[0], 0.25), off));
    if (i == 0) ctx.write_csv("zero_path.csv", [&](std::ostream& out) { write_zero_path_csv(p, out); });
  }

  double f2d1 = 0, f2d_control = 1e300, residue = 0, residue_control = 1e300;
  for (int i = 0; i < ctx.sizes.samples; ++i) {
    LineData g = genus1_line(rng);
    const double nu = rng.uniform(-2.0, 2.0);
    LineTau tau = LineTau::discrete(g.U, g.V, g.Z, B1);
    const cplx guess = canonical_zero(tau, nu);
    f2d1 = std::max(f2d1, f2d_residual(tau, find_tau_zero(tau, nu, guess, 0.25), nu));
    LineTau off = tau;
    off.offset = 0.05;
    f2d_control = std::min(f2d_control, f2d_residual(off, find_tau_zero(off, nu, guess, 0.25), nu));
    if (i < trials) {
      residue = std::max(residue, residue_defect(tau, nu, guess, rng));
      residue_control = std::min(residue_control, residue_defect(off, nu, guess, rng));
    }
  }

  double f2d2 = -1;
  if (data.genus() == 2) {
    f2d2 = 0;
    for (int i = 0; i < ctx.sizes.samples; ++i) {
      FayTuple t = random_fay_tuple(data, rng);
      CVector Z = rng.complex_vector(2, 0.5);
      const double nu = rng.uniform(-2.0, 2.0);
      f2d2 = std::max(f2d2, f2d_residual(t.vectors.U, t.vectors.V, Z, data.B, nu));
      if (i < trials)
        residue = std::max(residue, residue_defect(LineTau::discrete(t.vectors.U, t.vectors.V, Z, data.B), nu, 0.0, rng));
    }
  }

  // N = 5 periodic series: U = 1/5 makes u and v exactly 5-periodic in x.
  double periodic = 0;
  for (int i = 0; i < trials; ++i) {
    LineTau tau = LineTau::continuous(c1(0.2), c1(rng.complex_uniform(0.4)), c1(rng.complex_uniform(0.2)), B1);
    PeriodicSeries p = make_periodic_series(tau, 5, 0.0, 0.0, 1e-2);
    semidiscrete_series_extend(p);
    semidiscrete_series_extend(p);
    periodic = std::max({periodic, periodic_recursion_defect(p, 0), periodic_recursion_defect(p, 1), p.defect[1]});
  }

  ctx.check_max("cm5", cm5);
  ctx.check_min("cm5_control", cm5_control);
  ctx.check_max("f2d_genus1", f2d1);
  ctx.check_min("f2d_control", f2d_control);
  if (f2d2 >= 0) ctx.check_max("f2d_genus2", f2d2);
  ctx.check_max("residue", residue);
  ctx.check_min("residue_control", residue_control);
  ctx.check_max("periodic_recursion", periodic);
}

void run_controls(Context& ctx) {
  const AbelData data = ctx.curve();
  const int g = data.genus();
  Rng rng(ctx.config.seed);
  std::vector<FayTuple> tuples;
  double jac = 0, random = 1e300;
  for (int i = 0; i < ctx.sizes.samples; ++i) {
    tuples.push_back(random_fay_tuple(data, rng));
    const auto& f = tuples.back().vectors;
    jac = std::max(jac, fit_secancy_discrete(f.U, f.V, f.A, data.B).residual);
    CVector U = random_lattice_vector(rng, data.B), V = random_lattice_vector(rng, data.B),
            A = random_lattice_vector(rng, data.B);
    random = std::min(random, fit_secancy_discrete(U, V, A, data.B).residual);
  }
  ctx.check_max("jacobian_fit", jac);
  ctx.check_min("random_fit", random);
  ctx.check_gap("fit_gap", jac, random);

  // Divisor arm: Jacobian data against a product of two elliptic curves.
  const int count = g == 1 ? 1 : ctx.sizes.samples;
  double jac_div = 0, product_div = 1e300;
  for (const auto& s : sample_theta_divisor(data.B, derive_seed(ctx.config.seed, 1), count))
    jac_div = std::max(jac_div, residual_cm7d(s, tuples[0].vectors.U, tuples[0].vectors.V, data.B));
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = kI;
  D(1, 1) = 1.3 * kI;
  PeriodMatrix product(D);
  for (const auto& s : sample_theta_divisor(product, derive_seed(ctx.config.seed, 2), ctx.sizes.samples)) {
    CVector U = rng.complex_vector(2, 0.5), V = rng.complex_vector(2, 0.5);
    product_div = std::min(product_div, residual_cm7d(s, U, V, product));
  }
  ctx.check_max("jacobian_cm7d", jac_div);
  ctx.check_min("decomposable_cm7d", product_div);
  ctx.check_gap("cm7d_gap", jac_div, product_div);
}

ScenarioConfig effective(const ScenarioConfig& c) {
  ScenarioConfig e = c;
  const ScenarioInfo& info = info_of(c.scenario);
  if (e.curve.is_null()) e.curve = kDefaultCurve;
  std::map<std::string, double> tol = info.tolerances;
  for (const auto& [k, v] : c.tolerances) tol[k] = v;
  e.tolerances = tol;
  if (e.samples == 0) e.samples = info.sizes.samples;
  if (e.window == 0) e.window = info.sizes.window;
  if (e.grid == 0) e.grid = info.sizes.grid;
  return e;
}

}  // namespace

std::string_view scenario_name(Scenario s) { return info_of(s).name; }

Scenario parse_scenario(std::string_view name) {
  for (const auto& i : registry())
    if (name == i.name) return i.id;
  fail(ErrorKind::InvalidInput, "unknown scenario '" + std::string(name) + "'");
}

const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> all = [] {
    std::vector<Scenario> v;
    for (const auto& i : registry()) v.push_back(i.id);
    return v;
  }();
  return all;
}

ScenarioSizes default_sizes(Scenario s) { return info_of(s).sizes; }

const std::map<std::string, double>& default_tolerances(Scenario s) { return info_of(s).tolerances; }

void validate_config(const ScenarioConfig& c) {
  const auto& known = default_tolerances(c.scenario);
  for (const auto& [name, value] : c.tolerances) {
    if (!known.count(name))
      fail(ErrorKind::InvalidInput,
           "config: unknown tolerance '" + name + "' for scenario " + std::string(scenario_name(c.scenario)));
    if (!(value >= kTolMin && value <= kTolMax))
      fail(ErrorKind::InvalidInput, "config: tolerance '" + name + "' outside [1e-16, 1e-1]");
  }
  if (c.samples < 0 || c.samples > 10000) fail(ErrorKind::InvalidInput, "config: samples must be in [1, 10000]");
  if (c.window < 0 || c.window > 64) fail(ErrorKind::InvalidInput, "config: window must be in [1, 64]");
  if (c.grid != 0 && (c.grid < 5 || c.grid > 100000))
    fail(ErrorKind::InvalidInput, "config: grid must be in [5, 100000]");
  if (!c.curve.is_null() && !c.curve.is_string() && !c.curve.is_object())
    fail(ErrorKind::InvalidInput, "config: curve must be a reference string or an inline record");
}

ScenarioConfig config_from_json(const ordered_json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidInput, "config: expected a JSON object");
  if (!j.contains("scenario")) fail(ErrorKind::InvalidInput, "config: missing 'scenario'");
  ScenarioConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "scenario") {
      if (!value.is_string()) fail(ErrorKind::InvalidInput, "config: 'scenario' must be a string");
      c.scenario = parse_scenario(value.get<std::string>());
    } else if (key == "curve") {
      c.curve = value;
    } else if (key == "seed") {
      const bool non_negative =
          value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0);
      if (!non_negative) fail(ErrorKind::InvalidInput, "config: 'seed' must be a non-negative integer");
      c.seed = value.get<std::uint64_t>();
    } else if (key == "tolerances") {
      if (!value.is_object()) fail(ErrorKind::InvalidInput, "config: 'tolerances' must be an object");
      for (const auto& [name, tol] : value.items()) {
        if (!tol.is_number()) fail(ErrorKind::InvalidInput, "config: tolerance '" + name + "' must be a number");
        c.tolerances[name] = tol.get<double>();
      }
    } else if (key == "samples") {
      c.samples = int_field(value, "samples");
    } else if (key == "window") {
      c.window = int_field(value, "window");
    } else if (key == "grid") {
      c.grid = int_field(value, "grid");
    } else if (key == "csv_dir") {
      if (!value.is_string()) fail(ErrorKind::InvalidInput, "config: 'csv_dir' must be a string");
      c.csv_dir = value.get<std::string>();
    } else {
      fail(ErrorKind::InvalidInput, "config: unknown field '" + key + "'");
    }
  }
  validate_config(c);
  return c;
}

ordered_json config_to_json(const ScenarioConfig& c) {
  ordered_json j;
  j["scenario"] = std::string(scenario_name(c.scenario));
  j["curve"] = c.curve;
  j["seed"] = c.seed;
  j["tolerances"] = ordered_json::object();
  for (const auto& [k, v] : c.tolerances) j["tolerances"][k] = v;
  j["samples"] = c.samples;
  j["window"] = c.window;
  j["grid"] = c.grid;
  j["csv_dir"] = c.csv_dir;
  return j;
}

CurveSpec curve_from_json(const ordered_json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidInput, "curve: expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (key != "name" && key != "kind" && key != "tau" && key != "poly")
      fail(ErrorKind::InvalidInput, "curve: unknown field '" + key + "'");
  if (!j.contains("kind") || !j["kind"].is_string()) fail(ErrorKind::InvalidInput, "curve: missing 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  CurveSpec spec;
  if (kind == "genus1") {
    if (!j.contains("tau") || j.contains("poly")) fail(ErrorKind::InvalidInput, "curve: genus1 needs 'tau' only");
    spec = CurveSpec::genus1(complex_from_json(j["tau"], "curve: tau"));
  } else if (kind == "hyperelliptic2") {
    if (!j.contains("poly") || j.contains("tau"))
      fail(ErrorKind::InvalidInput, "curve: hyperelliptic2 needs 'poly' only");
    const auto& p = j["poly"];
    if (!p.is_array() || p.size() != 6)
      fail(ErrorKind::InvalidInput, "curve: poly must list the 6 coefficients c0..c5 of a quintic");
    std::vector<cplx> coeffs;
    for (const auto& x : p) coeffs.push_back(complex_from_json(x, "curve: poly coefficient"));
    if (coeffs[5] != cplx(1.0)) fail(ErrorKind::InvalidInput, "curve: poly must be monic (c5 = 1)");
    spec = CurveSpec::hyperelliptic(coeffs);
  } else {
    fail(ErrorKind::InvalidInput, "curve: unknown kind '" + kind + "'");
  }
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail(ErrorKind::InvalidInput, "curve: 'name' must be a string");
    spec.name = j["name"].get<std::string>();
  }
  return spec;
}

std::vector<CurveSpec> load_corpus(const std::string& path) {
  ordered_json j = parse_json(read_file(path), "corpus '" + path + "'");
  if (!j.is_array()) fail(ErrorKind::InvalidInput, "corpus '" + path + "': expected a JSON array");
  std::vector<CurveSpec> out;
  for (const auto& r : j) out.push_back(curve_from_json(r));
  return out;
}

CurveSpec resolve_curve(const ordered_json& ref, const std::string& corpus_path) {
  if (ref.is_object()) return curve_from_json(ref);
  if (!ref.is_null() && !ref.is_string())
    fail(ErrorKind::InvalidInput, "curve: expected a reference string or an inline record");
  const std::string text = ref.is_null() ? kDefaultCurve : ref.get<std::string>();
  if (!text.empty() && text.front() == '{') return curve_from_json(parse_json(text, "inline curve"));
  const auto hash = text.rfind('#');
  std::string file = hash == std::string::npos ? text : text.substr(0, hash);
  const std::string name = hash == std::string::npos ? "" : text.substr(hash + 1);
  if (file == "corpus") file = corpus_path;
  std::vector<CurveSpec> corpus = load_corpus(file);
  if (name.empty()) {
    if (corpus.size() != 1) fail(ErrorKind::InvalidInput, "curve: '" + file + "' holds several curves; use file#name");
    return corpus.front();
  }
  for (const auto& c : corpus)
    if (c.name == name) return c;
  fail(ErrorKind::InvalidInput, "curve: no curve named '" + name + "' in '" + file + "'");
}

Report run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.version = options.version;
  report.seed = config.seed;
  report.radius_cap = default_radius_cap();
  ScenarioConfig eff = effective(config);
  report.scenario = config_to_json(eff);
  try {
    validate_config(config);
    Context ctx{eff, options, eff.tolerances, {eff.samples, eff.window, eff.grid}, report};
    switch (eff.scenario) {
      case Scenario::ThetaSelftest: run_theta_selftest(ctx); break;
      case Scenario::FayTrisecant: run_fay_trisecant(ctx); break;
      case Scenario::DivisorIdentities: run_divisor_identities(ctx); break;
      case Scenario::Toda: run_lattice(ctx, LatticeKind::Toda); break;
      case Scenario::Bdhe: run_lattice(ctx, LatticeKind::Bdhe); break;
      case Scenario::RsDynamics: run_rs_dynamics(ctx); break;
      case Scenario::WaveSeries: run_wave_series(ctx); break;
      case Scenario::Controls: run_controls(ctx); break;
    }
  } catch (const Error& e) {
    report.error = ErrorRecord{e.kind(), e.what()};
  } catch (const std::filesystem::filesystem_error& e) {
    report.error = ErrorRecord{ErrorKind::InvalidInput, e.what()};
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace theta_secant
