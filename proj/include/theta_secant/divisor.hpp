#pragma once

#include <cstdint>
#include <vector>

#include "theta_secant/linalg.hpp"
#include "theta_secant/theta.hpp"

namespace theta_secant {

// A point Z with theta(Z) = 0, found on the line Z0 + s D drawn from line_seed.
struct DivisorSample {
  CVector Z;
  double theta_abs = 0.0;  // normalized |theta(Z)| over the largest one seen on the line
  std::uint64_t line_seed = 0;
};

// count distinct zeros of theta (pairwise lattice distance > 1e-6), each with
// theta_abs <= 1e-10. RootSearchFailed after 100 * count lines.
std::vector<DivisorSample> sample_theta_divisor(const PeriodMatrix& B, std::uint64_t seed, int count);

// |LHS - RHS| / (|LHS| + |RHS| + floor) for
// d_V[theta(Z+U) theta(Z-U)] d_V theta(Z) = theta(Z+U) theta(Z-U) d_VV theta(Z).
double residual_cm7(const DivisorSample& s, const CVector& U, const CVector& V, const PeriodMatrix& B);

// Relative size of theta(Z+U)theta(Z-V)theta(Z-U+V) + theta(Z-U)theta(Z+V)theta(Z+U-V).
double residual_cm7d(const DivisorSample& s, const CVector& U, const CVector& V, const PeriodMatrix& B);

// max over |k| <= K of normalized |theta(Z + k(U - V))|.
double singular_locus_probe(const DivisorSample& s, const CVector& U, const CVector& V,
                            const PeriodMatrix& B, int K = 10);

}  // namespace theta_secant
