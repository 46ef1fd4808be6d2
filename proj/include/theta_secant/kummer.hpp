#pragma once

#include <vector>

#include "theta_secant/linalg.hpp"
#include "theta_secant/scaled_complex.hpp"
#include "theta_secant/theta.hpp"

namespace theta_secant {

// Homogeneous coordinates in CP^{2^g - 1}.
struct ProjectivePoint {
  ScaledVector coords;
  int g = 0;
};

ProjectivePoint kummer_map(const CVector& Z, const PeriodMatrix& B);

// sin of the angle between the coordinate lines; 0 iff equal projectively.
double projective_distance(const ProjectivePoint& p, const ProjectivePoint& q);

// sigma_3 / sigma_1 of the 3 x 2^g matrix of unit-normalized rows.
double collinearity_defect(const ProjectivePoint& p1, const ProjectivePoint& p2,
                           const ProjectivePoint& p3);

// Half period (alpha + B beta)/2 for index = alpha_bits | beta_bits << g,
// alpha_bits and beta_bits read with bit j for component j.
CVector half_period(unsigned index, const PeriodMatrix& B);

struct SecancyData {
  CVector U, V, A;          // A as given
  CVector A_shifted;        // A plus the chosen half period
  cplx exp_p{0.0, 0.0};
  cplx p{0.0, 0.0};         // principal log of exp_p
  cplx exp_E{0.0, 0.0};     // discrete fit only
  cplx E{0.0, 0.0};         // discrete: principal log of exp_E; semidiscrete: fitted directly
  double residual = 0.0;
  unsigned calibration_shift = 0;
  std::vector<double> shift_residuals;  // per shift index, inf if rank deficient
};

// Fits Theta[e]((A-U-V)/2) + e^p Theta[e]((A+U-V)/2) = e^E Theta[e]((A+V-U)/2)
// for all e, searching all half-period shifts of A.
SecancyData fit_secancy_discrete(const CVector& U, const CVector& V, const CVector& A,
                                 const PeriodMatrix& B);

// Fits d_V Theta[e]((A-U)/2) - e^p Theta[e]((A+U)/2) + E Theta[e]((A-U)/2) = 0.
SecancyData fit_secancy_semidiscrete(const CVector& U, const CVector& V, const CVector& A,
                                     const PeriodMatrix& B);

}  // namespace theta_secant
