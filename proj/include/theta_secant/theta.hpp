#pragma once

#include <memory>
#include <vector>

#include "theta_secant/linalg.hpp"
#include "theta_secant/scaled_complex.hpp"

namespace theta_secant {

// Symmetric g x g complex matrix with positive definite imaginary part.
// Copies share one immutable cache (Im B, its inverse and Cholesky factor).
class PeriodMatrix {
 public:
  PeriodMatrix() = default;
  // Throws InvalidInput if not square/symmetric, NonPosDef if Im B is not
  // positive definite.
  explicit PeriodMatrix(const CMatrix& entries);

  int genus() const;
  const CMatrix& entries() const;
  const RMatrix& imag() const;
  const RMatrix& imag_inverse() const;
  double min_imag_eigenvalue() const;
  cplx operator()(int j, int k) const { return entries()(j, k); }

  // The matrix 2B used by second-order theta functions.
  PeriodMatrix doubled() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Half-integer characteristic, components reduced to {0, 1/2}.
struct ThetaCharacteristic {
  RVector eps;
  RVector delta;

  ThetaCharacteristic() = default;
  ThetaCharacteristic(const RVector& eps, const RVector& delta);
  static ThetaCharacteristic zero(int g);
  // eps from the bits of index, eps_1 taken from the most significant of the
  // g bits, so index order is lexicographic order; delta = 0.
  static ThetaCharacteristic from_index(int g, unsigned index);
  bool is_zero() const;
};

// Truncation cap shared by all evaluations that do not set their own.
// Thread-safe; default 64.
int default_radius_cap();
void set_default_radius_cap(int cap);

struct ThetaOptions {
  double tol = 1e-14;
  int radius_cap = 0;       // 0: use default_radius_cap()
  int radius_override = 0;  // >0: sum over this box radius, skip the bound
};

struct ThetaRequest {
  CVector z;
  PeriodMatrix B;
  ThetaCharacteristic ch;  // empty vectors mean zero characteristic
  std::vector<CVector> deriv_dirs;
  ThetaOptions options;
};

// Smallest box radius whose tail bound is <= tol relative to the leading
// term scale. deriv_order and dir_norm widen the bound for derivative sums;
// reach is the largest |m_j| picked up by the argument reduction.
int truncation_radius(const PeriodMatrix& B, const CVector& z, double tol,
                      int deriv_order = 0, double dir_norm = 0.0, int cap = 0);

// Value and directional derivatives (up to second order) at one point,
// all stored as mantissas against a single logscale.
struct ThetaJet {
  double logscale = 0.0;
  cplx value;
  std::vector<cplx> d1;  // d1[i] = d/d dirs[i]
  std::vector<cplx> d2;  // d2[i * n + j] = d^2/(d dirs[i] d dirs[j])
  int radius = 0;

  ScaledComplex f() const { return ScaledComplex::from_parts(value, logscale); }
  ScaledComplex df(int i) const { return ScaledComplex::from_parts(d1[i], logscale); }
  ScaledComplex ddf(int i, int j) const;
};

ThetaJet theta_jet(const PeriodMatrix& B, const CVector& z,
                   const std::vector<CVector>& dirs, int order,
                   const ThetaCharacteristic& ch = {},
                   const ThetaOptions& options = {});

// theta[ch](z|B) with req.deriv_dirs applied in order.
ScaledComplex theta(const ThetaRequest& req);

// Convenience: plain theta value without characteristic or derivatives.
ScaledComplex theta(const PeriodMatrix& B, const CVector& z,
                    const ThetaOptions& options = {});

// Relative discrepancy between the analytic derivative(s) of req and a
// central difference with step h.
double theta_fd_check(const ThetaRequest& req, double h);

// Second-order theta functions theta[eps,0](2Z|2B), eps in {0,1/2}^g in
// lexicographic order (eps_1 most significant), one common logscale.
ScaledVector level_two_vector(const CVector& Z, const PeriodMatrix& B,
                              const ThetaOptions& options = {});

// Level-two values and their derivative along dir, sharing one logscale.
struct LevelTwoJet {
  ScaledVector value;
  ScaledVector derivative;
};
LevelTwoJet level_two_jet(const CVector& Z, const PeriodMatrix& B,
                          const CVector& dir, const ThetaOptions& options = {});

// |value| * exp(-pi y^T (Im B)^{-1} y), y = Im z. This modulus is invariant
// under lattice shifts of z and is the natural "is theta small here" scale.
double normalized_abs(const ScaledComplex& value, const CVector& z,
                      const PeriodMatrix& B);

// z = alpha + B beta with real alpha, beta.
struct LatticeCoordinates {
  RVector alpha;
  RVector beta;
};
LatticeCoordinates lattice_coordinates(const CVector& z, const PeriodMatrix& B);

// Euclidean distance from z to the nearest point of Z^g + B Z^g.
double lattice_distance(const CVector& z, const PeriodMatrix& B);

}  // namespace theta_secant
