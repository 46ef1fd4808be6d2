#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "theta_secant/series.hpp"

using namespace theta_secant;
using namespace test_support;

namespace {

CVector c1(cplx z) { return CVector::Constant(1, z); }

// Genus-1 modulus for the pole-dynamics checks. Additive offsets of tau show
// up at the 1e-2 level only once Im B is below about 0.5.
const cplx kTau(0.15, 0.4);

std::vector<double> uniform_grid(int n, double step) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(step * i);
  return g;
}

struct G1Data {
  CVector U, V, Z;
};

G1Data g1_data(Rng& rng) {
  return {c1(cplx(rng.uniform(0.3, 0.6), rng.uniform(-0.1, 0.1))), c1(rng.complex_uniform(0.5)),
          c1(rng.complex_uniform(0.3))};
}

}  // namespace

TEST_CASE("discrete tau is theta on the (m, n) lattice") {
  const AbelData& d = quintic();
  const auto& f = quintic_tuples()[0].vectors;
  CVector Z = CVector::Constant(2, cplx(0.1, 0.2));
  LineTau tau = LineTau::discrete(f.U, f.V, Z, d.B);
  for (int m = -2; m <= 2; ++m)
    for (int n = -2; n <= 2; ++n)
      CHECK(relative_residual(tau(double(m - n), double(m + n - 1)), theta(d.B, m * f.U + n * f.V + Z)) <= 1e-13);
  CHECK(kind_of([&] { LineTau::continuous(c1(1.0), f.V, Z, d.B); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("zero tracking") {
  PeriodMatrix B = tau_matrix(kTau);
  Rng rng(501);
  const auto grid = uniform_grid(101, 0.01);
  for (int trial = 0; trial < 5; ++trial) {
    G1Data g = g1_data(rng);
    LineTau tau = LineTau::continuous(g.U, g.V, g.Z, B);
    ZeroPath p = track_tau_zero(tau, grid, 0.0);
    REQUIRE(p.t.size() == 101);
    for (size_t i = 0; i < p.t.size(); ++i) {
      CHECK(tau.normalized(p.eta[i], p.t[i]) <= 1e-10);
      CHECK(std::abs(p.v0[i] - p.v0_closed[i]) <= 1e-7 * (1.0 + std::abs(p.v0_closed[i])));
      // Zeros of theta(xU + tV + Z) move with velocity -V/U.
      CHECK(std::abs(p.eta_dot[i] + g.V[0] / g.U[0]) <= 1e-10);
    }
    // eta_dot against a central difference of the tracked path.
    for (size_t i = 1; i + 1 < p.t.size(); i += 10)
      CHECK(std::abs((p.eta[i + 1] - p.eta[i - 1]) / 0.02 - p.eta_dot[i]) <= 1e-8);
  }
}

TEST_CASE("static zero") {
  PeriodMatrix B = tau_matrix(kTau);
  LineTau tau = LineTau::continuous(c1(0.45), c1(0.0), c1(cplx(0.1, 0.05)), B);
  ZeroPath p = track_tau_zero(tau, uniform_grid(11, 0.1), 0.0);
  for (size_t i = 0; i < p.t.size(); ++i) {
    CHECK(p.eta[i] == p.eta[0]);
    CHECK(p.eta_dot[i] == cplx(0.0));
  }
  CHECK(cm5_residual(p, tau) == 0.0);
}

TEST_CASE("pole dynamics on theta zeros and a perturbed control") {
  PeriodMatrix B = tau_matrix(kTau);
  Rng rng(502);
  const auto grid = uniform_grid(101, 0.01);
  for (int trial = 0; trial < 5; ++trial) {
    G1Data g = g1_data(rng);
    LineTau tau = LineTau::continuous(g.U, g.V, g.Z, B);
    ZeroPath p = track_tau_zero(tau, grid, 0.0);
    CHECK(cm5_residual(p, tau) <= 1e-6);
    LineTau off = tau;
    off.offset = 0.05;
    ZeroPath q = track_tau_zero(off, grid, p.eta[0], 0.25);
    CHECK(cm5_residual(q, off) >= 1e-2);
  }
}

TEST_CASE("zero tracking guards") {
  PeriodMatrix B = tau_matrix(kTau);
  Rng rng(503);
  G1Data g = g1_data(rng);
  // Fast zero motion on a coarse grid lands on another zero.
  LineTau fast = LineTau::continuous(g.U, 50.0 * g.V, g.Z, B);
  CHECK(kind_of([&] { track_tau_zero(fast, uniform_grid(11, 0.1), 0.0); }) == ErrorKind::LostZero);
  // With U = 1 the points eta +- 1 are zeros as well.
  LineTau periodic = LineTau::continuous(c1(1.0), g.V, g.Z, B);
  ZeroPath p = track_tau_zero(periodic, uniform_grid(6, 0.01), 0.0);
  CHECK(kind_of([&] { cm5_residual(p, periodic); }) == ErrorKind::GuardFailed);
  LineTau lifted = LineTau::continuous(g.U, g.V, g.Z, B);
  // |theta| reaches 1e300 only far outside the widest search square.
  lifted.offset = 1e300;
  CHECK(kind_of([&] { find_tau_zero(lifted, 0.0, 0.0, 0.05); }) == ErrorKind::RootSearchFailed);
  LineTau plain = LineTau::continuous(g.U, g.V, g.Z, B);
  ZeroPath short_path = track_tau_zero(plain, uniform_grid(4, 0.1));
  CHECK(kind_of([&] { cm5_residual(short_path, plain); }) == ErrorKind::InvalidInput);
}

TEST_CASE("RS kernels") {
  Rng rng(504);
  RSKernel rat = RSKernel::rational();
  RSKernel trig = RSKernel::trigonometric(3.7);
  RSKernel ell = RSKernel::elliptic(cplx(2.5, 0.2), cplx(0.3, 1.9));
  for (int i = 0; i < 100; ++i) {
    cplx x = rng.complex_uniform(2.0);
    CHECK(std::abs(rat(x) + rat(-x)) <= 1e-14 * std::abs(rat(x)));
    CHECK(std::abs(rat(x) - (-2.0 / (x * (x * x - 1.0)))) <= 1e-13 * std::abs(rat(x)));
    CHECK(std::abs(trig(x) + trig(-x)) <= 1e-13 * std::abs(trig(x)));
    CHECK(std::abs(ell(x) + ell(-x)) <= 1e-12 * std::abs(ell(x)));
  }
  for (int i = 0; i < 20; ++i) {
    cplx x = rng.complex_uniform(1.0);
    CHECK(std::abs(trig(x + 3.7) - trig(x)) <= 1e-12 * std::abs(trig(x)));
    CHECK(std::abs(ell(x + ell.w1) - ell(x)) <= 1e-10 * std::abs(ell(x)));
    CHECK(std::abs(ell(x + ell.w2) - ell(x)) <= 1e-10 * std::abs(ell(x)));
    // Long periods recover the rational kernel; a long imaginary period the trigonometric one.
    CHECK(std::abs(RSKernel::trigonometric(1e4)(x) - rat(x)) <= 1e-6 * std::abs(rat(x)));
    RSKernel flat = RSKernel::elliptic(3.7, cplx(0.0, 30.0));
    CHECK(std::abs(flat(x) - trig(x)) <= 1e-10 * std::abs(trig(x)));
  }
  CHECK(rat.singular_distance(cplx(1.0 + 1e-7, 0.0)) < 1e-6);
  CHECK(trig.singular_distance(cplx(3.7 - 1.0, 0.0)) < 1e-12);
  CHECK(ell.singular_distance(ell.w1 + ell.w2) < 1e-12);
  CHECK(kind_of([&] { RSKernel::elliptic(1.0, cplx(0.0, -1.0)); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { RSKernel::trigonometric(0.0); }) == ErrorKind::InvalidInput);
}

TEST_CASE("RS integration") {
  Rng rng(505);
  RSState one{c1(cplx(0.3, 0.1)), c1(cplx(-0.7, 0.2)), RSKernel::rational()};
  RSTrajectory line = rs_integrate(one, 1.0, 1e-2);
  CHECK(line.t.back() == 1.0);
  CHECK(std::abs(line.x.back()[0] - (one.x[0] + one.xdot[0])) <= 1e-14);

  const RSKernel kernels[3] = {RSKernel::rational(), RSKernel::trigonometric(6.0),
                               RSKernel::elliptic(6.0, cplx(0.5, 5.0))};
  const double tol[3] = {1e-9, 1e-9, 1e-8};
  for (int k = 0; k < 3; ++k) {
    for (int trial = 0; trial < 3; ++trial) {
      RSState s{CVector(3), rng.complex_vector(3, 0.5), kernels[k]};
      s.x << cplx(-1.7, 0.3), cplx(0.2, -0.4), cplx(1.9, 0.5);
      s.x += rng.complex_vector(3, 0.2);
      RSTrajectory tr = rs_integrate(s, 1.0, 1e-3, 100);
      CHECK(tr.t.size() == 11);
      for (const auto& v : tr.xdot) CHECK(std::abs(v.sum() - s.xdot.sum()) <= tol[k]);
      // Acceleration matches a central difference of the sampled velocity.
      RSTrajectory fine = rs_integrate(s, 2e-3, 1e-3);
      RSState mid{fine.x[1], fine.xdot[1], kernels[k]};
      CVector fd = (fine.xdot[2] - fine.xdot[0]) / 2e-3;
      CHECK((fd - rs_acceleration(mid)).norm() <= 1e-5 * (1.0 + fd.norm()));
    }
  }

  RSState bad{CVector(2), CVector(2), RSKernel::rational()};
  bad.x << 0.0, 1.0;
  bad.xdot << 1.0, 0.0;
  CHECK(kind_of([&] { rs_integrate(bad, 1.0, 1e-3); }) == ErrorKind::InvalidInput);
  // Particle 0 runs into x_0 - x_1 = -1 at t = 0.5.
  bad.x << 0.0, 1.5;
  CHECK(kind_of([&] { rs_integrate(bad, 1.0, 1e-3); }) == ErrorKind::Collision);
  CHECK(kind_of([&] { rs_integrate(one, 1.0, 0.0); }) == ErrorKind::InvalidInput);
}

TEST_CASE("elliptic RS matches tracked theta zeros") {
  PeriodMatrix B = tau_matrix(kI);
  const cplx U(0.37, 0.05);
  LineTau tau = LineTau::continuous(c1(U), c1(cplx(0.2, 0.1)), c1(cplx(0.05, 0.1)), B);
  const auto grid = uniform_grid(51, 0.01);
  ZeroPath a = track_tau_zero(tau, grid, 0.0, 1.5);
  ZeroPath b = track_tau_zero(tau, grid, a.eta[0] + 1.0 / U, 0.2);
  CHECK(std::abs(b.eta[0] - a.eta[0] - 1.0 / U) <= 1e-10);
  RSState s{CVector(2), CVector(2), RSKernel::elliptic(2.0 / U, kI / U)};
  s.x << a.eta[0], b.eta[0];
  s.xdot << a.eta_dot[0], b.eta_dot[0];
  RSTrajectory tr = rs_integrate(s, 0.5, 1e-2);
  REQUIRE(tr.t.size() == grid.size());
  double worst = 0.0;
  for (size_t n = 0; n < tr.t.size(); ++n)
    worst = std::max({worst, std::abs(tr.x[n][0] - a.eta[n]), std::abs(tr.x[n][1] - b.eta[n])});
  CHECK(worst <= 1e-5);
}

TEST_CASE("discrete pole dynamics ratio") {
  Rng rng(506);
  PeriodMatrix B = tau_matrix(kTau);
  for (int trial = 0; trial < 20; ++trial) {
    G1Data g = g1_data(rng);
    const double nu = rng.uniform(-2.0, 2.0);
    CHECK(f2d_residual(g.U, g.V, g.Z, B, nu) <= 1e-8);
    LineTau off = LineTau::discrete(g.U, g.V, g.Z, B);
    off.offset = 0.05;
    cplx eta = find_tau_zero(off, nu, 0.0, 1.0);
    CHECK(f2d_residual(off, eta, nu) >= 1e-2);
  }
  const AbelData& d = quintic();
  for (int trial = 0; trial < 20; ++trial) {
    const auto& f = quintic_tuples()[trial % quintic_tuples().size()].vectors;
    CHECK(f2d_residual(f.U, f.V, rng.complex_vector(2, 0.5), d.B, rng.uniform(-2.0, 2.0)) <= 1e-7);
  }
  // U - V = 2 makes tau(eta + 2, nu) a lattice translate of the zero.
  LineTau shifted = LineTau::discrete(c1(2.3), c1(0.3), c1(0.1), B);
  cplx eta = find_tau_zero(shifted, 0.0, 0.0, 1.0);
  CHECK(kind_of([&] { f2d_residual(shifted, eta, 0.0); }) == ErrorKind::GuardFailed);
}

TEST_CASE("discrete series extension and residue consistency") {
  // u = 0 and equal seeds give a constant level.
  DiscreteSeries flat;
  flat.window = 6;
  DiscretePotential zero = [](cplx, double) { return cplx(0.0); };
  discrete_series_extend(flat, zero, 0, 0, 2.5, 2.5);
  for (int k = -6; k <= 6; ++k) CHECK(flat.at(1, k, 0) == cplx(2.5));
  CHECK(kind_of([&] { discrete_series_extend(flat, zero, 1, 3, 0.0, 0.0); }) == ErrorKind::WindowExhausted);

  Rng rng(507);
  auto check_data = [&](const LineTau& tau, double nu, cplx guess, double tol, bool expect_pass) {
    cplx eta = find_tau_zero(tau, nu, guess, 1.0);
    DiscreteSeries table;
    table.x0 = eta;
    table.nu0 = nu;
    table.window = 8;
    DiscretePotential u = discrete_potential(tau);
    discrete_series_extend(table, u, 0, -1, rng.complex_uniform(1.0), rng.complex_uniform(1.0));
    CHECK(discrete_recursion_defect(table, u, 0, -1) <= 1e-12);
    ResidueCheck r0 = residue_consistency(tau, eta, nu, 1.0, 1.0);
    ResidueCheck r1 = residue_consistency(tau, eta, nu, table.at(1, 1, -1), table.at(1, -1, -1));
    if (expect_pass) {
      // u(eta, nu - 1) = 0 makes xi_1 agree at eta +- 1 on level nu - 1.
      CHECK(std::abs(table.at(1, 1, -1) - table.at(1, -1, -1)) <= 1e-12 * (1.0 + std::abs(table.at(1, 1, -1))));
      CHECK(r0.defect <= tol);
      CHECK(r1.defect <= tol);
    } else {
      CHECK(r0.defect >= tol);
    }
  };
  PeriodMatrix B = tau_matrix(kTau);
  for (int trial = 0; trial < 5; ++trial) {
    G1Data g = g1_data(rng);
    const double nu = rng.uniform(-2.0, 2.0);
    LineTau tau = LineTau::discrete(g.U, g.V, g.Z, B);
    check_data(tau, nu, 0.0, 1e-8, true);
    tau.offset = 0.05;
    check_data(tau, nu, 0.0, 1e-2, false);
  }
  const AbelData& d = quintic();
  for (const auto& t : quintic_tuples())
    check_data(LineTau::discrete(t.vectors.U, t.vectors.V, rng.complex_vector(2, 0.5), d.B), rng.uniform(-2, 2), 0.0,
               1e-8, true);
}

TEST_CASE("periodic semidiscrete series") {
  PeriodMatrix B = tau_matrix(kI);
  Rng rng(508);
  // V = 0: u = v = 0 and xi_1 is constant.
  PeriodicSeries still = make_periodic_series(LineTau::continuous(c1(0.2), c1(0.0), c1(0.1), B), 5, 0.0, 0.0, 1e-2);
  semidiscrete_series_extend(still);
  for (int i = 0; i < 5; ++i) CHECK(still.xi[1][i].cwiseAbs().maxCoeff() == 0.0);

  for (int trial = 0; trial < 3; ++trial) {
    CVector V = c1(rng.complex_uniform(0.4)), Z = c1(rng.complex_uniform(0.2));
    LineTau tau = LineTau::continuous(c1(0.2), V, Z, B);
    PeriodicSeries p = make_periodic_series(tau, 5, 0.0, 0.0, 1e-2);
    semidiscrete_series_extend(p);
    semidiscrete_series_extend(p);
    REQUIRE(p.levels() == 3);
    CHECK(periodic_recursion_defect(p, 0) <= 1e-10);
    CHECK(periodic_recursion_defect(p, 1) <= 1e-10);
    CHECK(p.defect[1] <= 1e-10);
    // Oracle at the centre node: xi_1 = v - v(x0) + c_1, so its t-derivative
    // is -d_t^2 ln tau differences plus c_1'.
    auto vdot = [&](double x) {
      TauJet j = tau_jet(tau, x, 0.0, 2);
      const cplx a = (j.ft / j.f).value();
      return -((j.ftt / j.f).value() - a * a);
    };
    for (int k = 0; k < 5; ++k) {
      const cplx lhs = p.xi[2][2][(k + 1) % 5] - p.xi[2][2][k];
      const cplx rhs = vdot(k) - vdot(0) + p.c_dot[1][2] + p.u[2][k] * p.xi[1][2][k];
      CHECK(std::abs(lhs - rhs) <= 1e-6 * (std::abs(lhs) + std::abs(rhs)));
      CHECK(std::abs(p.xi[1][2][k] - (p.v[2][k] - p.v[2][0] + p.c[1][2])) <= 1e-12);
    }
    PeriodicSeries raw = make_periodic_series(tau, 5, 0.0, 0.0, 1e-2);
    semidiscrete_series_extend(raw, false);
    semidiscrete_series_extend(raw, false);
    CHECK(raw.defect[1] >= 1e-3);
    CHECK(periodic_recursion_defect(raw, 1) >= 1e-3);
  }
  CHECK(kind_of([&] { make_periodic_series(LineTau::continuous(c1(0.21), c1(0.3), c1(0.1), B), 5, 0.0, 0.0, 1e-2); }) ==
        ErrorKind::NonPeriodic);
}

TEST_CASE("series csv exports") {
  RSState one{c1(1.0), c1(0.5), RSKernel::rational()};
  std::ostringstream a;
  write_trajectory_csv(rs_integrate(one, 0.1, 0.05), a);
  const std::string text = a.str();
  CHECK(text.rfind("t,i,x_re,x_im,xdot_re,xdot_im\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  PeriodMatrix B = tau_matrix(kTau);
  ZeroPath p = track_tau_zero(LineTau::continuous(c1(0.45), c1(0.1), c1(0.1), B), uniform_grid(3, 0.1));
  std::ostringstream b;
  write_zero_path_csv(p, b);
  CHECK(b.str().rfind("t,eta_re,eta_im,v0_re,v0_im\n", 0) == 0);
}
