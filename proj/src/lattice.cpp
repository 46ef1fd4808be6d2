#include "theta_secant/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/QR>

#include "theta_secant/errors.hpp"

namespace theta_secant {

namespace {

constexpr double kDivisorFloor = 1e-12;
constexpr int kMaxSide = 64;

void check_side(int count, const char* what) {
  if (count < 1 || count > kMaxSide)
    fail(ErrorKind::InvalidInput, std::string(what) + " must hold 1 to 64 points, got " + std::to_string(count));
}

void check_inputs(const CVector& U, const CVector& V, const CVector& A, const LatticeWindow& win,
                  const PeriodMatrix& B) {
  const int g = B.genus();
  if (U.size() != g || V.size() != g || A.size() != g || win.Z.size() != g)
    fail(ErrorKind::DimensionMismatch, "U, V, A and Z must have the genus as size");
}

void guard(const ScaledComplex& value, const CVector& z, const PeriodMatrix& B) {
  if (normalized_abs(value, z, B) < kDivisorFloor)
    fail(ErrorKind::DivisorHit, "theta vanishes at a window point (normalized modulus below 1e-12)");
}

ScaledComplex guarded_theta(const PeriodMatrix& B, const CVector& z) {
  ScaledComplex t = theta(B, z);
  guard(t, z, B);
  return t;
}

ScaledComplex exponential(double a, double b, cplx p, cplx E) { return ScaledComplex::exp(a * p + b * E); }

}  // namespace

LatticeWindow LatticeWindow::toda(int x_first, int x_last, std::vector<double> t_samples, const CVector& Z) {
  check_side(x_last - x_first + 1, "x range");
  check_side(static_cast<int>(t_samples.size()), "t samples");
  for (double t : t_samples)
    if (!std::isfinite(t)) fail(ErrorKind::InvalidInput, "t samples must be finite");
  LatticeWindow w;
  w.kind = LatticeKind::Toda;
  w.first = x_first;
  w.last = x_last;
  w.t_samples = std::move(t_samples);
  w.Z = Z;
  return w;
}

LatticeWindow LatticeWindow::bdhe(int m_first, int m_last, int n_first, int n_last, const CVector& Z) {
  check_side(m_last - m_first + 1, "m range");
  check_side(n_last - n_first + 1, "n range");
  LatticeWindow w;
  w.kind = LatticeKind::Bdhe;
  w.first = m_first;
  w.last = m_last;
  w.n_first = n_first;
  w.n_last = n_last;
  w.Z = Z;
  return w;
}

FieldTable toda_fields(const CVector& U, const CVector& V, const CVector& A, cplx p, cplx E,
                       const LatticeWindow& win, const PeriodMatrix& B) {
  if (win.kind != LatticeKind::Toda) fail(ErrorKind::InvalidInput, "toda_fields needs a Toda window");
  check_inputs(U, V, A, win, B);
  if (!std::isfinite(std::abs(std::exp(p)))) fail(ErrorKind::InvalidInput, "e^p is not finite");
  FieldTable table;
  table.window = win;
  table.p = p;
  table.E = E;
  table.rows = win.last - win.first + 2;
  table.cols = static_cast<int>(win.t_samples.size());
  table.points.resize(static_cast<size_t>(table.rows) * table.cols);
  for (int i = 0; i < table.rows; ++i) {
    const double x = win.first + i;
    for (int j = 0; j < table.cols; ++j) {
      const double t = win.t_samples[j];
      const CVector arg = x * U + t * V + win.Z;
      const ThetaJet base = theta_jet(B, arg, {V}, 1);
      const ThetaJet shifted = theta_jet(B, A + arg, {V}, 1);
      guard(base.f(), arg, B);
      guard(shifted.f(), A + arg, B);
      FieldPoint& pt = table.at(i, j);
      pt.a = x;
      pt.b = t;
      pt.v = -base.d1[0] / base.value;
      pt.dlog = shifted.d1[0] / shifted.value - base.d1[0] / base.value;
      pt.phi = shifted.f() / base.f();
      pt.psi = pt.phi * exponential(x, t, p, E);
    }
  }
  for (int i = 0; i + 1 < table.rows; ++i)
    for (int j = 0; j < table.cols; ++j) table.at(i, j).u = table.at(i + 1, j).v - table.at(i, j).v;
  return table;
}

double toda_psi_residual(const FieldTable& table) {
  double worst = 0.0;
  for (int i = 0; i < table.window_rows(); ++i) {
    for (int j = 0; j < table.window_cols(); ++j) {
      const FieldPoint& pt = table.at(i, j);
      const ScaledComplex next = table.at(i + 1, j).psi;
      const ScaledComplex dt = pt.psi * ScaledComplex(pt.dlog + table.E);
      const ScaledComplex lhs = dt + pt.u * pt.psi;
      // lhs - next compared against |next| + |dt|.
      const double ref = std::max({lhs.logscale(), next.logscale(), dt.logscale()});
      const double num = std::abs(lhs.value_scaled(ref) - next.value_scaled(ref));
      const double den = next.abs_scaled(ref) + dt.abs_scaled(ref) + kResidualFloor;
      worst = std::max(worst, num / den);
    }
  }
  return worst;
}

FieldTable bdhe_fields(const CVector& U, const CVector& V, const CVector& A, cplx p, cplx E,
                       const LatticeWindow& win, const PeriodMatrix& B) {
  if (win.kind != LatticeKind::Bdhe) fail(ErrorKind::InvalidInput, "bdhe_fields needs a Bdhe window");
  check_inputs(U, V, A, win, B);
  if (lattice_distance(U - V, B) < 1e-8) fail(ErrorKind::InvalidInput, "U and V coincide modulo the lattice");
  FieldTable table;
  table.window = win;
  table.p = p;
  table.E = E;
  table.rows = win.last - win.first + 2;
  table.cols = win.n_last - win.n_first + 2;
  table.points.resize(static_cast<size_t>(table.rows) * table.cols);
  // theta(mU + nV + Z) on the grid plus one more row and column for u.
  std::vector<ScaledComplex> base(static_cast<size_t>(table.rows + 1) * (table.cols + 1));
  auto base_at = [&](int i, int j) -> ScaledComplex& { return base[static_cast<size_t>(i) * (table.cols + 1) + j]; };
  for (int i = 0; i <= table.rows; ++i)
    for (int j = 0; j <= table.cols; ++j) {
      const CVector arg = double(win.first + i) * U + double(win.n_first + j) * V + win.Z;
      base_at(i, j) = guarded_theta(B, arg);
    }
  for (int i = 0; i < table.rows; ++i) {
    const double m = win.first + i;
    for (int j = 0; j < table.cols; ++j) {
      const double n = win.n_first + j;
      FieldPoint& pt = table.at(i, j);
      pt.a = m;
      pt.b = n;
      const CVector arg = m * U + n * V + win.Z;
      pt.phi = guarded_theta(B, A + arg) / base_at(i, j);
      pt.psi = pt.phi * exponential(m, n, p, E);
      pt.u = base_at(i + 1, j + 1) * base_at(i, j) / (base_at(i, j + 1) * base_at(i + 1, j));
    }
  }
  return table;
}

double bdhe_psi_residual(const FieldTable& table) {
  double worst = 0.0;
  for (int i = 0; i < table.window_rows(); ++i) {
    for (int j = 0; j < table.window_cols(); ++j) {
      const FieldPoint& pt = table.at(i, j);
      const ScaledComplex up = table.at(i, j + 1).psi;
      const ScaledComplex right = table.at(i + 1, j).psi;
      const ScaledComplex rhs = right + pt.u * pt.psi;
      const double ref = std::max({up.logscale(), right.logscale(), rhs.logscale()});
      const double num = std::abs(up.value_scaled(ref) - rhs.value_scaled(ref));
      const double den = up.abs_scaled(ref) + right.abs_scaled(ref) + kResidualFloor;
      worst = std::max(worst, num / den);
    }
  }
  return worst;
}

ExponentRefit refit_exponents(const FieldTable& table) {
  const int n = table.window_rows() * table.window_cols();
  CMatrix M(n, 2);
  CVector rhs(n);
  int row = 0;
  for (int i = 0; i < table.window_rows(); ++i) {
    for (int j = 0; j < table.window_cols(); ++j, ++row) {
      const FieldPoint& pt = table.at(i, j);
      const ScaledComplex next = table.at(i + 1, j).phi;
      ScaledComplex c0, c1, r;
      if (table.window.kind == LatticeKind::Toda) {
        // E phi - e^p phi(x+1) = -phi (dlog + u)
        c0 = -next;
        c1 = pt.phi;
        r = -(pt.phi * (ScaledComplex(pt.dlog) + pt.u));
      } else {
        // e^E phi(m, n+1) - e^p phi(m+1, n) = u phi(m, n)
        c0 = -next;
        c1 = table.at(i, j + 1).phi;
        r = pt.u * pt.phi;
      }
      const double ref = std::max({c0.logscale(), c1.logscale(), r.logscale()});
      const double w = c0.abs_scaled(ref) + c1.abs_scaled(ref) + kResidualFloor;
      M(row, 0) = c0.value_scaled(ref) / w;
      M(row, 1) = c1.value_scaled(ref) / w;
      rhs[row] = r.value_scaled(ref) / w;
    }
  }
  const CVector sol = M.colPivHouseholderQr().solve(rhs);
  ExponentRefit out;
  out.exp_p = sol[0];
  if (table.window.kind == LatticeKind::Toda) {
    out.E = sol[1];
    out.exp_E = std::exp(sol[1]);
  } else {
    out.exp_E = sol[1];
    out.E = std::log(sol[1]);
  }
  out.residual = (M * sol - rhs).norm() / (rhs.norm() + kResidualFloor);
  return out;
}

void write_field_csv(const FieldTable& table, std::ostream& out) {
  const bool toda = table.window.kind == LatticeKind::Toda;
  out << (toda ? "x,t" : "m,n") << ",u_re,u_im,v_re,v_im,psi_mantissa_re,psi_mantissa_im,psi_logscale\n";
  out.precision(17);
  for (int i = 0; i < table.window_rows(); ++i) {
    for (int j = 0; j < table.window_cols(); ++j) {
      const FieldPoint& pt = table.at(i, j);
      const cplx u = pt.u.value();
      out << pt.a << ',' << pt.b << ',' << u.real() << ',' << u.imag() << ',' << pt.v.real() << ','
          << pt.v.imag() << ',' << pt.psi.mantissa().real() << ',' << pt.psi.mantissa().imag() << ','
          << pt.psi.logscale() << '\n';
    }
  }
}

}  // namespace theta_secant
