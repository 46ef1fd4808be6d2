#include "theta_secant/scaled_complex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace theta_secant {

ScaledComplex::ScaledComplex(cplx value) : mantissa_(value) { normalize(); }

ScaledComplex ScaledComplex::from_parts(cplx mantissa, double logscale) {
  ScaledComplex r;
  r.mantissa_ = mantissa;
  r.logscale_ = logscale;
  r.normalize();
  return r;
}

ScaledComplex ScaledComplex::exp(cplx w) {
  return from_parts(std::polar(1.0, w.imag()), w.real());
}

void ScaledComplex::normalize() {
  double a = std::abs(mantissa_);
  if (a == 0.0) {
    mantissa_ = 0.0;
    logscale_ = 0.0;
    return;
  }
  if (!std::isfinite(a)) return;
  double shift = std::floor(std::log(a));
  if (shift != 0.0) {
    mantissa_ *= std::exp(-shift);
    logscale_ += shift;
  }
  // log/exp rounding can leave |m| a hair outside [1, e).
  a = std::abs(mantissa_);
  if (a < 1.0) {
    mantissa_ *= std::exp(1.0);
    logscale_ -= 1.0;
  } else if (a >= std::exp(1.0)) {
    mantissa_ *= std::exp(-1.0);
    logscale_ += 1.0;
  }
}

cplx ScaledComplex::value() const {
  if (is_zero()) return 0.0;
  return mantissa_ * std::exp(logscale_);
}

double ScaledComplex::log_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(mantissa_)) + logscale_;
}

double ScaledComplex::abs_scaled(double ref) const {
  if (is_zero()) return 0.0;
  return std::abs(mantissa_) * std::exp(logscale_ - ref);
}

cplx ScaledComplex::value_scaled(double ref) const {
  if (is_zero()) return 0.0;
  return mantissa_ * std::exp(logscale_ - ref);
}

ScaledComplex& ScaledComplex::operator+=(const ScaledComplex& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  double ref = std::max(logscale_, o.logscale_);
  mantissa_ = value_scaled(ref) + o.value_scaled(ref);
  logscale_ = ref;
  normalize();
  return *this;
}

ScaledComplex& ScaledComplex::operator-=(const ScaledComplex& o) { return *this += -o; }

ScaledComplex& ScaledComplex::operator*=(const ScaledComplex& o) {
  if (is_zero() || o.is_zero()) return *this = ScaledComplex();
  mantissa_ *= o.mantissa_;
  logscale_ += o.logscale_;
  normalize();
  return *this;
}

ScaledComplex& ScaledComplex::operator/=(const ScaledComplex& o) {
  if (o.is_zero()) {
    mantissa_ = std::numeric_limits<double>::infinity();
    return *this;
  }
  if (is_zero()) return *this;
  mantissa_ /= o.mantissa_;
  logscale_ -= o.logscale_;
  normalize();
  return *this;
}

double relative_residual(const ScaledComplex& a, const ScaledComplex& b) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  double ref = std::max(a.is_zero() ? b.logscale() : a.logscale(),
                        b.is_zero() ? a.logscale() : b.logscale());
  cplx av = a.value_scaled(ref);
  cplx bv = b.value_scaled(ref);
  return std::abs(av - bv) / (std::abs(av) + std::abs(bv) + kResidualFloor);
}

void ScaledVector::normalize() {
  double m = mantissas.size() ? mantissas.cwiseAbs().maxCoeff() : 0.0;
  if (m == 0.0 || !std::isfinite(m)) return;
  double shift = std::floor(std::log(m));
  mantissas *= std::exp(-shift);
  logscale += shift;
}

}  // namespace theta_secant
