#pragma once

#include <cmath>
#include <functional>

#include "theta_secant/curve.hpp"
#include "theta_secant/errors.hpp"
#include "theta_secant/rng.hpp"
#include "theta_secant/theta.hpp"

namespace test_support {

using namespace theta_secant;

// Random point of the Siegel upper half space: X symmetric in [-1/2, 1/2],
// Y = M M^T + 0.4 I with standard normal M scaled by 0.5.
inline PeriodMatrix random_period_matrix(Rng& rng, int g) {
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

inline PeriodMatrix tau_matrix(cplx tau) {
  CMatrix B(1, 1);
  B(0, 0) = tau;
  return PeriodMatrix(B);
}

inline CVector vec(std::initializer_list<cplx> xs) {
  CVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (cplx x : xs) v[i++] = x;
  return v;
}

// Plain lattice sum over |n_j| <= radius with no argument reduction and no
// scaling; only usable for small arguments.
inline cplx direct_theta(const CMatrix& B, const CVector& z, int radius,
                         const RVector& eps = RVector(), const RVector& delta = RVector()) {
  const int g = static_cast<int>(B.rows());
  RVector e = eps.size() ? eps : RVector::Zero(g);
  RVector d = delta.size() ? delta : RVector::Zero(g);
  std::vector<int> idx(g, -radius);
  cplx sum = 0.0;
  while (true) {
    CVector v(g);
    for (int j = 0; j < g; ++j) v[j] = idx[j] + e[j];
    cplx q = (v.transpose() * B * v)(0, 0);
    cplx l = (v.transpose() * (z + d.cast<cplx>()))(0, 0);
    sum += std::exp(kPi * kI * q + 2.0 * kPi * kI * l);
    int j = g - 1;
    for (; j >= 0; --j) {
      if (++idx[j] <= radius) break;
      idx[j] = -radius;
    }
    if (j < 0) break;
  }
  return sum;
}

inline ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return static_cast<ErrorKind>(-1);
}

// Genus-2 Jacobian data of y^2 = x^5 - 1, shared across test files.
inline const AbelData& quintic() {
  static const AbelData data = build_abel_data(CurveSpec::hyperelliptic({-1, 0, 0, 0, 0, 1}));
  return data;
}

inline const std::vector<FayTuple>& quintic_tuples() {
  static const std::vector<FayTuple> tuples = [] {
    Rng rng(2024);
    std::vector<FayTuple> out;
    for (int i = 0; i < 5; ++i) out.push_back(random_fay_tuple(quintic(), rng));
    return out;
  }();
  return tuples;
}

// Seeded vectors that are not Fay data: alpha + B beta with uniform alpha, beta.
inline CVector random_lattice_vector(Rng& rng, const PeriodMatrix& B) {
  const int g = B.genus();
  RVector a(g), b(g);
  for (int j = 0; j < g; ++j) {
    a[j] = rng.uniform();
    b[j] = rng.uniform();
  }
  return a.cast<cplx>() + B.entries() * b.cast<cplx>();
}

}  // namespace test_support
