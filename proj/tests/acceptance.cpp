// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Thresholds are pinned here rather than taken from the scenario defaults.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "theta_secant/divisor.hpp"
#include "theta_secant/rng.hpp"
#include "theta_secant/scenario.hpp"
#include "theta_secant/theta.hpp"

using namespace theta_secant;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Requirement {
  std::string record;
  double threshold;
  Bound bound;
};

struct Outcome {
  bool pass = true;
  std::string detail;
};

void add(Outcome& o, const std::string& name, double value, double threshold, Bound bound) {
  const bool ok = bound == Bound::Max ? value <= threshold : value >= threshold;
  o.pass = o.pass && ok;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s%s=%.3g (%s %.0e)", o.detail.empty() ? "" : ", ", name.c_str(), value,
                bound == Bound::Max ? "<=" : ">=", threshold);
  o.detail += buf;
}

void require(Outcome& o, const Report& r, const std::vector<Requirement>& reqs) {
  if (r.error) {
    o.pass = false;
    o.detail += (o.detail.empty() ? "" : ", ") + std::string(error_name(r.error->kind)) + ": " + r.error->message;
    return;
  }
  for (const auto& q : reqs) {
    const CheckRecord* found = nullptr;
    for (const auto& c : r.checks)
      if (c.name == q.record) found = &c;
    if (!found) {
      o.pass = false;
      o.detail += (o.detail.empty() ? "" : ", ") + q.record + " missing";
      continue;
    }
    add(o, q.record, found->residual, q.threshold, q.bound);
  }
}

void print(int index, const std::string& title, const Outcome& o) {
  std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, title.c_str(), o.detail.c_str());
}

Report run(Scenario s, const std::string& curve = "corpus#x5m1") {
  ScenarioConfig c;
  c.scenario = s;
  c.seed = kSeed;
  c.curve = curve;
  RunOptions options;
  options.corpus_path = THETA_SECANT_TEST_CORPUS;
  options.version = "acceptance";
  return run_scenario(c, options);
}

// Three-term identity at the odd half period of genus-1 tori, 20 seeded (U, V) pairs each.
double genus1_cm7d() {
  Rng rng(derive_seed(kSeed, 2));
  double worst = 0;
  for (cplx tau : {cplx(0.0, 1.0), cplx(0.15, 0.4), cplx(-0.3, 1.7)}) {
    CMatrix m(1, 1);
    m(0, 0) = tau;
    PeriodMatrix B(m);
    DivisorSample s;
    s.Z = CVector::Constant(1, (1.0 + tau) / 2.0);
    for (int i = 0; i < 20; ++i)
      worst = std::max(worst, residual_cm7d(s, rng.complex_vector(1, 0.5), rng.complex_vector(1, 0.5), B));
  }
  return worst;
}

// Rerun of the first-derivative check at h = 1e-4 and h = 1e-5: a pure
// truncation effect shrinks every exceedance by about 100.
std::string fd_scaling_note() {
  Rng rng(derive_seed(kSeed, 3));
  int over_coarse = 0, over_fine = 0;
  double worst_coarse = 0, worst_fine = 0;
  for (int i = 0; i < 1000; ++i) {
    const int g = 1 + i % 3;
    RMatrix M(g, g), X(g, g);
    for (int a = 0; a < g; ++a)
      for (int b = 0; b < g; ++b) {
        X(a, b) = rng.uniform(-0.5, 0.5);
        M(a, b) = 0.5 * rng.normal();
      }
    X = 0.5 * (X + X.transpose()).eval();
    RMatrix Y = M * M.transpose() + 0.4 * RMatrix::Identity(g, g);
    CMatrix Bm(g, g);
    for (int a = 0; a < g; ++a)
      for (int b = 0; b < g; ++b) Bm(a, b) = cplx(X(a, b), Y(a, b));
    PeriodMatrix B(Bm);
    ThetaRequest req{rng.complex_vector(g, 1.0), B, {}, {rng.complex_vector(g, 1.0)}, {}};
    const double coarse = theta_fd_check(req, 1e-4);
    const double fine = theta_fd_check(req, 1e-5);
    over_coarse += coarse > 1e-6;
    over_fine += fine > 1e-6;
    worst_coarse = std::max(worst_coarse, coarse);
    worst_fine = std::max(worst_fine, fine);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "first-derivative check over 1000 fresh samples: %d above 1e-6 at h=1e-4 (max %.3g), "
                "%d at h=1e-5 (max %.3g)",
                over_coarse, worst_coarse, over_fine, worst_fine);
  return buf;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();

  const Report theta_r = run(Scenario::ThetaSelftest);
  const Report fay = run(Scenario::FayTrisecant);
  const Report divisor = run(Scenario::DivisorIdentities);
  const Report toda = run(Scenario::Toda);
  const Report bdhe = run(Scenario::Bdhe);
  const Report rs = run(Scenario::RsDynamics);
  const Report wave = run(Scenario::WaveSeries);
  const Report controls = run(Scenario::Controls);
  const double cm7d_g1 = genus1_cm7d();

  std::vector<Outcome> out(11);

  require(out[0], theta_r,
          {{"evenness", 1e-12, Bound::Max},
           {"quasi_periodicity", 1e-10, Bound::Max},
           {"radius_stability", 1e-14, Bound::Max},
           {"fd_first", 1e-6, Bound::Max},
           {"fd_second", 1e-4, Bound::Max}});
  add(out[0], "seconds", theta_r.seconds, 30, Bound::Max);

  add(out[1], "cm7d", cm7d_g1, 1e-10, Bound::Max);

  require(out[2], fay,
          {{"discrete_fit", 1e-8, Bound::Max}, {"random_control", 1e-2, Bound::Min}, {"fit_gap", 1e4, Bound::Min}});
  add(out[2], "seconds", fay.seconds, 120, Bound::Max);

  require(out[3], bdhe, {{"bdhe_psi", 1e-8, Bound::Max}, {"exponent_consistency", 1e-6, Bound::Max}});

  require(out[4], divisor, {{"cm7d", 1e-8, Bound::Max}});
  require(out[4], controls, {{"decomposable_cm7d", 1e-2, Bound::Min}});

  require(out[5], fay, {{"semidiscrete_fit", 1e-7, Bound::Max}});
  require(out[5], toda, {{"toda_psi", 1e-6, Bound::Max}});
  require(out[5], divisor, {{"cm7", 1e-7, Bound::Max}});

  require(out[6], wave, {{"cm5", 1e-6, Bound::Max}, {"cm5_control", 1e-2, Bound::Min}});

  require(out[7], rs, {{"momentum_drift", 1e-9, Bound::Max}, {"elliptic_crosscheck", 1e-5, Bound::Max}});

  require(out[8], wave, {{"f2d_genus1", 1e-8, Bound::Max}, {"f2d_genus2", 1e-7, Bound::Max}});

  require(out[9], wave, {{"residue", 1e-8, Bound::Max}});
  require(out[9], divisor, {{"probe", 1e-3, Bound::Min}});

  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  add(out[10], "seconds", total, 300, Bound::Max);

  const char* titles[] = {
      "theta engine suites, 1000 samples",
      "genus-1 three-term identity at (1+B)/2",
      "discrete secancy fit on y^2 = x^5 - 1 with random controls",
      "BDHE lattice residual and exponent refit",
      "three-term identity on genus-2 divisor samples, decomposable control",
      "semidiscrete fit, Toda residual and differential identity",
      "pole dynamics on tracked genus-1 zeros, perturbed control",
      "RS momentum conservation and elliptic cross-check",
      "discrete pole dynamics ratio at 20 zeros, genus 1 and 2",
      "residue consistency and singular-locus probe",
      "full suite wall-clock",
  };
  bool all = true;
  for (int i = 0; i < 11; ++i) {
    print(i + 1, titles[i], out[i]);
    all = all && out[i].pass;
  }
  if (!out[0].pass) std::printf("  note: %s\n", fd_scaling_note().c_str());
  std::printf("%s\n", all ? "acceptance: all criteria pass" : "acceptance: some criteria fail");
  return all ? 0 : 1;
}
