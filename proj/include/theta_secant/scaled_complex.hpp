#pragma once

#include <vector>

#include "theta_secant/linalg.hpp"

namespace theta_secant {

// Value mantissa * exp(logscale) with |mantissa| in [1, e) or mantissa == 0.
class ScaledComplex {
 public:
  ScaledComplex() = default;
  ScaledComplex(cplx value);  // NOLINT(google-explicit-constructor)
  ScaledComplex(double value) : ScaledComplex(cplx(value, 0.0)) {}  // NOLINT

  static ScaledComplex from_parts(cplx mantissa, double logscale);
  // exp(w) without overflow.
  static ScaledComplex exp(cplx w);

  cplx mantissa() const { return mantissa_; }
  double logscale() const { return logscale_; }
  bool is_zero() const { return mantissa_ == cplx(0.0); }

  // Plain complex value; may overflow to inf or underflow to 0.
  cplx value() const;
  // log|value|, -inf for zero.
  double log_abs() const;
  // |value| * exp(-ref).
  double abs_scaled(double ref) const;
  // value * exp(-ref) as a plain complex.
  cplx value_scaled(double ref) const;

  ScaledComplex operator-() const { return from_raw(-mantissa_, logscale_); }
  ScaledComplex& operator+=(const ScaledComplex& o);
  ScaledComplex& operator-=(const ScaledComplex& o);
  ScaledComplex& operator*=(const ScaledComplex& o);
  ScaledComplex& operator/=(const ScaledComplex& o);

  friend ScaledComplex operator+(ScaledComplex a, const ScaledComplex& b) { return a += b; }
  friend ScaledComplex operator-(ScaledComplex a, const ScaledComplex& b) { return a -= b; }
  friend ScaledComplex operator*(ScaledComplex a, const ScaledComplex& b) { return a *= b; }
  friend ScaledComplex operator/(ScaledComplex a, const ScaledComplex& b) { return a /= b; }

 private:
  static ScaledComplex from_raw(cplx m, double s) {
    ScaledComplex r;
    r.mantissa_ = m;
    r.logscale_ = s;
    return r;
  }
  void normalize();

  cplx mantissa_{0.0, 0.0};
  double logscale_ = 0.0;
};

// |a - b| / (|a| + |b| + floor), evaluated at the common scale of a and b.
double relative_residual(const ScaledComplex& a, const ScaledComplex& b);

// A vector of complex mantissas sharing one logscale.
struct ScaledVector {
  CVector mantissas;
  double logscale = 0.0;

  Eigen::Index size() const { return mantissas.size(); }
  ScaledComplex operator[](Eigen::Index i) const {
    return ScaledComplex::from_parts(mantissas[i], logscale);
  }
  // Rescale so the largest component has modulus in [1, e).
  void normalize();
};

}  // namespace theta_secant
