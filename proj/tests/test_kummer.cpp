#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "theta_secant/kummer.hpp"

using namespace theta_secant;
using namespace test_support;

TEST_CASE("kummer map is even and lattice invariant") {
  Rng rng(201);
  for (int trial = 0; trial < 20; ++trial) {
    PeriodMatrix B = random_period_matrix(rng, 2);
    CVector Z = rng.complex_vector(2, 1.0);
    ProjectivePoint k = kummer_map(Z, B);
    CHECK(projective_distance(k, kummer_map(-Z, B)) <= 1e-12);
    CHECK(projective_distance(k, kummer_map(Z + CVector::Unit(2, 0), B)) <= 1e-12);
    CHECK(projective_distance(k, kummer_map(Z + B.entries().col(1), B)) <= 1e-10);
  }
}

TEST_CASE("collinearity defect") {
  Rng rng(202);
  PeriodMatrix B = random_period_matrix(rng, 2);
  ProjectivePoint a = kummer_map(rng.complex_vector(2, 1.0), B);
  ProjectivePoint b = kummer_map(rng.complex_vector(2, 1.0), B);
  ProjectivePoint c = kummer_map(rng.complex_vector(2, 1.0), B);
  CHECK(collinearity_defect(a, b, a) <= 1e-14);
  // Regression baseline for the seeded control, recorded at 2.6e-2 or more.
  CHECK(collinearity_defect(a, b, c) >= 1e-2);
  ProjectivePoint g1 = kummer_map(rng.complex_vector(1, 1.0), tau_matrix(kI));
  CHECK(kind_of([&] { collinearity_defect(a, b, g1); }) == ErrorKind::DimensionMismatch);
  // Lattice translates of the arguments leave the defect unchanged.
  CVector za = rng.complex_vector(2, 1.0), zb = rng.complex_vector(2, 1.0), zc = rng.complex_vector(2, 1.0);
  double d0 = collinearity_defect(kummer_map(za, B), kummer_map(zb, B), kummer_map(zc, B));
  double d1 = collinearity_defect(kummer_map(za + B.entries().col(0), B), kummer_map(zb - CVector::Unit(2, 1), B),
                                  kummer_map(zc + B.entries().col(1) + CVector::Unit(2, 0), B));
  CHECK(std::abs(d0 - d1) <= 1e-10);
}

TEST_CASE("half periods") {
  PeriodMatrix B = quintic().B;
  CHECK(half_period(0, B).norm() == 0.0);
  CHECK((half_period(1, B) - 0.5 * CVector::Unit(2, 0).cast<cplx>()).norm() == 0.0);
  CHECK((half_period(8, B) - 0.5 * B.entries().col(1)).norm() < 1e-15);
}

TEST_CASE("genus-1 fits are exact") {
  Rng rng(203);
  PeriodMatrix B = tau_matrix(cplx(0.2, 1.1));
  for (int trial = 0; trial < 10; ++trial) {
    CVector U = random_lattice_vector(rng, B), V = random_lattice_vector(rng, B), A = random_lattice_vector(rng, B);
    CHECK(fit_secancy_discrete(U, V, A, B).residual <= 1e-12);
    CHECK(fit_secancy_semidiscrete(U, V, A, B).residual <= 1e-12);
  }
}

TEST_CASE("discrete fit on Jacobian data and random controls") {
  const AbelData& d = quintic();
  double worst = 0.0;
  for (const auto& t : quintic_tuples()) {
    SecancyData s = fit_secancy_discrete(t.vectors.U, t.vectors.V, t.vectors.A, d.B);
    CHECK(s.residual <= 1e-8);
    worst = std::max(worst, s.residual);
    // Fitted constants reproduce the trisecant: the three Kummer points are collinear.
    const CVector& A = s.A_shifted;
    const CVector &U = s.U, &V = s.V;
    double defect = collinearity_defect(kummer_map(0.5 * (A - U - V), d.B), kummer_map(0.5 * (A + U - V), d.B),
                                        kummer_map(0.5 * (A + V - U), d.B));
    CHECK(defect <= 1e-7);
  }
  Rng rng(204);
  double best_control = 1e300;
  for (int trial = 0; trial < 5; ++trial) {
    CVector U = random_lattice_vector(rng, d.B), V = random_lattice_vector(rng, d.B),
            A = random_lattice_vector(rng, d.B);
    double r = fit_secancy_discrete(U, V, A, d.B).residual;
    CHECK(r >= 1e-2);
    best_control = std::min(best_control, r);
  }
  CHECK(best_control / worst >= 1e4);
}

TEST_CASE("discrete fit rejects coincident vectors") {
  const AbelData& d = quintic();
  CVector U = quintic_tuples()[0].vectors.U;
  CHECK(kind_of([&] { fit_secancy_discrete(U, U + d.B.entries().col(0), quintic_tuples()[0].vectors.A, d.B); }) ==
        ErrorKind::InvalidInput);
}

TEST_CASE("semidiscrete fit with tangent direction") {
  const AbelData& d = quintic();
  for (const auto& t : quintic_tuples()) {
    CVector V = abel_tangent(d, t.b);
    SecancyData s = fit_secancy_semidiscrete(t.vectors.U, V, t.vectors.A, d.B);
    CHECK(s.residual <= 1e-7);
    // Rescaling V scales both constants by the same factor.
    for (double lambda : {0.5, 1.7}) {
      SecancyData r = fit_secancy_semidiscrete(t.vectors.U, lambda * V, t.vectors.A, d.B);
      CHECK(r.calibration_shift == s.calibration_shift);
      CHECK(std::abs(r.exp_p - lambda * s.exp_p) <= 1e-8 * std::abs(lambda * s.exp_p));
      CHECK(std::abs(r.E - lambda * s.E) <= 1e-8 * std::abs(lambda * s.E));
      CHECK(std::abs(r.residual - s.residual) <= 1e-10);
    }
  }
  Rng rng(205);
  for (int trial = 0; trial < 5; ++trial) {
    CVector U = random_lattice_vector(rng, d.B), V = rng.complex_vector(2, 1.0), A = random_lattice_vector(rng, d.B);
    CHECK(fit_secancy_semidiscrete(U, V, A, d.B).residual >= 1e-2);
  }
  CHECK(kind_of([&] {
          fit_secancy_semidiscrete(quintic_tuples()[0].vectors.U, CVector::Zero(2), quintic_tuples()[0].vectors.A, d.B);
        }) == ErrorKind::InvalidInput);
}
