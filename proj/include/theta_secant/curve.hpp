#pragma once

#include <string>
#include <vector>

#include "theta_secant/linalg.hpp"
#include "theta_secant/rng.hpp"
#include "theta_secant/theta.hpp"

namespace theta_secant {

enum class CurveKind { Genus1, Hyperelliptic2 };

struct CurveSpec {
  CurveKind kind = CurveKind::Genus1;
  cplx tau{0.0, 1.0};      // Genus1
  std::vector<cplx> poly;  // Hyperelliptic2: ascending coefficients c0..c5, c5 = 1
  std::string name;

  static CurveSpec genus1(cplx tau);
  static CurveSpec hyperelliptic(std::vector<cplx> ascending_coeffs);
  int genus() const { return kind == CurveKind::Genus1 ? 1 : 2; }
};

// Genus1 points are z in C (mod lattice); hyperelliptic points are (x, y)
// with y = sheet * principal sqrt(p(x)).
struct CurvePoint {
  cplx x{0.0, 0.0};
  int sheet = 1;
  cplx z{0.0, 0.0};

  static CurvePoint torus(cplx z);
  static CurvePoint affine(cplx x, int sheet = 1);
};

struct AbelData {
  CurveSpec curve;
  PeriodMatrix B;
  CMatrix a_periods;      // rows: differentials dx/y, x dx/y; columns: cycles
  CMatrix b_periods;
  CMatrix normalization;  // inverse of a_periods
  std::vector<cplx> branch_points;  // sorted by (Re, Im)
  cplx basepoint{0.0, 0.0};         // Abel origin (first branch point; 0 on a torus)
  double symmetry_defect = 0.0;     // max |B - B^T| before symmetrization

  int genus() const { return curve.genus(); }
};

AbelData build_abel_data(const CurveSpec& curve);

// Roots of a monic polynomial given by ascending coefficients, polished by
// Newton and sorted by (Re, Im).
std::vector<cplx> polynomial_roots(const std::vector<cplx>& ascending_coeffs);

// p(x) evaluated as the product over branch points.
cplx curve_polynomial(const AbelData& data, cplx x);
// y of a hyperelliptic point.
cplx curve_y(const AbelData& data, const CurvePoint& P);

// Abel map from the basepoint along the default admissible path.
CVector abel_map(const AbelData& data, const CurvePoint& P);
// Abel map along the polyline basepoint -> waypoints... -> P.
CVector abel_map_along(const AbelData& data, const CurvePoint& P,
                       const std::vector<cplx>& waypoints);

// Normalized holomorphic differentials at P in the affine chart dx.
CVector abel_tangent(const AbelData& data, const CurvePoint& P);

struct FayVectors {
  CVector U;  // abel(c) - abel(b)
  CVector V;  // abel(d) - abel(b)
  CVector A;  // abel(a) - abel(b)
};
FayVectors fay_vectors(const AbelData& data, const CurvePoint& a, const CurvePoint& b,
                       const CurvePoint& c, const CurvePoint& d);

struct FayTuple {
  CurvePoint a, b, c, d;
  FayVectors vectors;
};
// Four seeded generic points and their Fay vectors; redraws on
// CoincidentPoints or PathFailure.
FayTuple random_fay_tuple(const AbelData& data, Rng& rng);

// Seeded generic point: torus points in the fundamental cell; affine points
// with |Re x|, |Im x| <= 1.2 kept at least 0.1 away from branch points.
CurvePoint random_curve_point(const AbelData& data, Rng& rng);

}  // namespace theta_secant
