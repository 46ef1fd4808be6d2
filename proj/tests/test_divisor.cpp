#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "theta_secant/divisor.hpp"
#include "theta_secant/roots.hpp"

using namespace theta_secant;
using namespace test_support;

TEST_CASE("line roots of a polynomial") {
  const std::vector<cplx> zeros = {cplx(0.1, 0.2), cplx(-0.35, 0.4), cplx(0.6, -0.55)};
  LineFunction f = [&](cplx s) {
    cplx v = 1.0, d = 0.0;
    for (cplx r : zeros) {
      d = d * (s - r) + v;
      v *= s - r;
    }
    return LineSample{v, d, 0.0};
  };
  std::vector<cplx> found = line_roots(f, RootSearchBox{0.0, 1.0, 8});
  REQUIRE(found.size() == zeros.size());
  for (cplx r : zeros) {
    double best = 1e300;
    for (cplx s : found) best = std::min(best, std::abs(s - r));
    CHECK(best <= 1e-14);
  }
  CHECK(winding_number(f, cplx(-1, -1), cplx(1, 1)) == 3);
  CHECK(winding_number(f, cplx(0.7, 0.7), cplx(0.9, 0.9)) == 0);
}

TEST_CASE("genus-1 divisor is the odd half period") {
  PeriodMatrix B = tau_matrix(kI);
  auto samples = sample_theta_divisor(B, 7, 1);
  REQUIRE(samples.size() == 1);
  CHECK(lattice_distance(samples[0].Z - CVector::Constant(1, cplx(0.5, 0.5)), B) <= 1e-8);
  CHECK(sample_theta_divisor(B, 7, 0).empty());
  // The zero is unique modulo the lattice, so a second distinct one cannot exist.
  CHECK(kind_of([&] { sample_theta_divisor(B, 7, 2); }) == ErrorKind::RootSearchFailed);
  CHECK(kind_of([&] { sample_theta_divisor(B, 7, -1); }) == ErrorKind::InvalidInput);
}

TEST_CASE("genus-2 divisor samples re-verify at doubled radius") {
  const AbelData& d = quintic();
  auto samples = sample_theta_divisor(d.B, 11, 10);
  REQUIRE(samples.size() == 10);
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    CHECK(s.theta_abs <= 1e-10);
    ThetaJet j = theta_jet(d.B, s.Z, {}, 0);
    ThetaOptions wide;
    wide.radius_override = 2 * j.radius;
    CVector Z = s.Z;
    double direct = normalized_abs(theta(d.B, Z, wide), Z, d.B);
    // Compare with the size of theta one unit away along a coordinate direction.
    CVector Zo = Z + CVector::Constant(2, cplx(0.0, 0.25));
    CHECK(direct <= 1e-10 * normalized_abs(theta(d.B, Zo), Zo, d.B));
    for (size_t k = 0; k < i; ++k) CHECK(lattice_distance(s.Z - samples[k].Z, d.B) > 1e-6);
  }
  // Same seed, same samples.
  auto again = sample_theta_divisor(d.B, 11, 10);
  for (size_t i = 0; i < samples.size(); ++i) CHECK((again[i].Z - samples[i].Z).norm() == 0.0);
}

TEST_CASE("genus-1 three-term identity at the odd half period") {
  Rng rng(301);
  for (int trial = 0; trial < 20; ++trial) {
    cplx tau(rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.5));
    PeriodMatrix B = tau_matrix(tau);
    DivisorSample s{CVector::Constant(1, 0.5 * (1.0 + tau)), 0.0, 0};
    CVector U = rng.complex_vector(1, 0.5), V = rng.complex_vector(1, 0.5);
    CHECK(residual_cm7d(s, U, V, B) <= 1e-10);
    // Direct oracle: the two products cancel.
    auto th = [&](cplx z) { return direct_theta(B.entries(), CVector::Constant(1, z), 12); };
    cplx Z = s.Z[0], u = U[0], v = V[0];
    cplx t1 = th(Z + u) * th(Z - v) * th(Z - u + v), t2 = th(Z - u) * th(Z + v) * th(Z + u - v);
    CHECK(std::abs(t1 + t2) <= 1e-10 * (std::abs(t1) + std::abs(t2)));
  }
}

TEST_CASE("divisor identities on Jacobian data") {
  const AbelData& d = quintic();
  auto samples = sample_theta_divisor(d.B, 11, 10);
  const FayTuple& t = quintic_tuples()[0];
  const CVector& U = t.vectors.U;
  const CVector& V = t.vectors.V;
  const CVector Vt = abel_tangent(d, t.b);
  Rng rng(302);
  for (const auto& s : samples) {
    CHECK(residual_cm7d(s, U, V, d.B) <= 1e-8);
    CHECK(residual_cm7(s, U, Vt, d.B) <= 1e-7);
    CHECK(singular_locus_probe(s, U, V, d.B, 10) >= 1e-3);
    CVector Ur = rng.complex_vector(2, 0.5), Vr = rng.complex_vector(2, 0.5);
    CHECK(residual_cm7d(s, Ur, Vr, d.B) >= 1e-2);
    CHECK(residual_cm7(s, Ur, Vr, d.B) >= 1e-2);
  }
}

TEST_CASE("decomposable period matrix fails the three-term identity") {
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = kI;
  D(1, 1) = 1.3 * kI;
  PeriodMatrix B(D);
  auto samples = sample_theta_divisor(B, 12, 10);
  Rng rng(303);
  for (const auto& s : samples) {
    CVector U = rng.complex_vector(2, 0.5), V = rng.complex_vector(2, 0.5);
    CHECK(residual_cm7d(s, U, V, B) >= 1e-2);
  }
}

TEST_CASE("residual symmetries") {
  const AbelData& d = quintic();
  auto samples = sample_theta_divisor(d.B, 13, 5);
  Rng rng(304);
  for (const auto& s : samples) {
    CVector U = rng.complex_vector(2, 0.5), V = rng.complex_vector(2, 0.5);
    CHECK(std::abs(residual_cm7d(s, U, V, d.B) - residual_cm7d(s, -U, -V, d.B)) <= 1e-10);
    double r = residual_cm7(s, U, V, d.B);
    for (int k = 0; k < 3; ++k) {
      double lambda = rng.uniform(0.5, 2.0);
      CHECK(std::abs(residual_cm7(s, U, lambda * V, d.B) - r) <= 1e-9);
    }
    CHECK(residual_cm7(s, U, CVector::Zero(2), d.B) == 0.0);
    double at_zero = normalized_abs(theta(d.B, s.Z), s.Z, d.B);
    CHECK(singular_locus_probe(s, U, V, d.B, 0) == at_zero);
    CHECK(singular_locus_probe(s, U, V, d.B, 0) <= 1e-10);
    CHECK(singular_locus_probe(s, U, U, d.B, 7) == at_zero);
  }
  CHECK(kind_of([&] { residual_cm7d(samples[0], CVector::Zero(1), CVector::Zero(2), d.B); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { singular_locus_probe(samples[0], CVector::Zero(2), CVector::Zero(2), d.B, -1); }) ==
        ErrorKind::InvalidInput);
}
