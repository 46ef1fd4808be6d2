#pragma once

#include <iosfwd>
#include <vector>

#include "theta_secant/linalg.hpp"
#include "theta_secant/scaled_complex.hpp"
#include "theta_secant/theta.hpp"

namespace theta_secant {

enum class LatticeKind { Toda, Bdhe };

// Toda: x in [first, last] at each t in t_samples, argument xU + tV + Z.
// Bdhe: (m, n) in [first, last] x [n_first, n_last], argument mU + nV + Z.
// Both sides at most 64 points.
struct LatticeWindow {
  LatticeKind kind = LatticeKind::Bdhe;
  int first = 0, last = 0;
  int n_first = 0, n_last = 0;
  std::vector<double> t_samples;
  CVector Z;

  static LatticeWindow toda(int x_first, int x_last, std::vector<double> t_samples, const CVector& Z);
  static LatticeWindow bdhe(int m_first, int m_last, int n_first, int n_last, const CVector& Z);
};

// One grid point. For Toda, b is t and v, dlog are set; for Bdhe, b is n.
// phi = theta(A + arg) / theta(arg), psi = phi * exp(a p + b E),
// dlog = d_V ln theta(A + arg) - d_V ln theta(arg).
struct FieldPoint {
  double a = 0.0;
  double b = 0.0;
  ScaledComplex u;  // zero on the boundary rows where a neighbour is missing
  cplx v{0.0, 0.0};
  cplx dlog{0.0, 0.0};
  ScaledComplex phi;
  ScaledComplex psi;
};

// Grid extends one step past the window in a (and in n for Bdhe), so the
// shifted values the linear problems need are stored.
struct FieldTable {
  LatticeWindow window;
  cplx p{0.0, 0.0};
  cplx E{0.0, 0.0};
  int rows = 0;  // along a
  int cols = 0;  // along t or n
  std::vector<FieldPoint> points;

  FieldPoint& at(int i, int j) { return points[static_cast<size_t>(i) * cols + j]; }
  const FieldPoint& at(int i, int j) const { return points[static_cast<size_t>(i) * cols + j]; }
  // Number of window points along each axis, i.e. where residuals are taken.
  int window_rows() const { return rows - 1; }
  int window_cols() const { return window.kind == LatticeKind::Toda ? cols : cols - 1; }
};

// v = -d_V ln theta(xU + tV + Z), u = v(x+1, t) - v(x, t),
// psi = theta(A + xU + tV + Z) / theta(xU + tV + Z) * exp(xp + tE).
// DivisorHit if a normalized theta modulus falls below 1e-12.
FieldTable toda_fields(const CVector& U, const CVector& V, const CVector& A, cplx p, cplx E,
                       const LatticeWindow& win, const PeriodMatrix& B);

// max over the window of |d_t psi - psi(x+1, t) + u psi| / (|psi(x+1, t)| + |d_t psi| + floor),
// with d_t psi = psi (dlog + E).
double toda_psi_residual(const FieldTable& table);

// u(m, n) = theta((m+1)U + (n+1)V + Z) theta(mU + nV + Z)
//         / (theta(mU + (n+1)V + Z) theta((m+1)U + nV + Z)),
// psi(m, n) = theta(A + mU + nV + Z) / theta(mU + nV + Z) * exp(mp + nE).
FieldTable bdhe_fields(const CVector& U, const CVector& V, const CVector& A, cplx p, cplx E,
                       const LatticeWindow& win, const PeriodMatrix& B);

// max over the window of |psi(m, n+1) - psi(m+1, n) - u psi(m, n)|
//                        / (|psi(m, n+1)| + |psi(m+1, n)| + floor).
double bdhe_psi_residual(const FieldTable& table);

// Exponents that best satisfy the table's linear problem in least squares,
// holding phi, u and dlog fixed. Toda is linear in (e^p, E), Bdhe in (e^p, e^E).
struct ExponentRefit {
  cplx exp_p{0.0, 0.0};
  cplx exp_E{0.0, 0.0};
  cplx E{0.0, 0.0};
  double residual = 0.0;  // relative residual of the normalized least-squares system
};
ExponentRefit refit_exponents(const FieldTable& table);

// Columns: a, b (x,t or m,n), re/im of u, v, psi mantissa, psi logscale.
void write_field_csv(const FieldTable& table, std::ostream& out);

}  // namespace theta_secant
