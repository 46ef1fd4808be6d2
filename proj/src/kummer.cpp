#include "theta_secant/kummer.hpp"

#include <cmath>
#include <limits>

#include "theta_secant/errors.hpp"

namespace theta_secant {

namespace {

constexpr double kRankTol = 1e-12;

cplx scaled_log(const ScaledComplex& v) {
  return {std::log(std::abs(v.mantissa())) + v.logscale(), std::arg(v.mantissa())};
}

void require_distinct(const CVector& x, const CVector& y, const PeriodMatrix& B, const char* what) {
  if (lattice_distance(x - y, B) < 1e-8)
    fail(ErrorKind::InvalidInput, std::string(what) + " coincide modulo the lattice");
}

struct LinearFit {
  ScaledComplex x1, x2;
  double residual = std::numeric_limits<double>::infinity();
  bool rank_ok = false;
};

// Least squares for c1 x1 + c2 x2 = rhs, each column with its own scale.
LinearFit solve_two_columns(const ScaledVector& c1, const ScaledVector& c2, const ScaledVector& rhs) {
  LinearFit fit;
  const double n1 = c1.mantissas.norm(), n2 = c2.mantissas.norm(), nr = rhs.mantissas.norm();
  if (n1 == 0.0 || n2 == 0.0 || nr == 0.0) return fit;
  CMatrix M(c1.size(), 2);
  M.col(0) = c1.mantissas / n1;
  M.col(1) = c2.mantissas / n2;
  const CVector r = rhs.mantissas / nr;
  Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv[1] >= kRankTol * sv[0])) return fit;
  fit.rank_ok = true;
  const CVector y = svd.solve(r);
  fit.residual = (M * y - r).norm();
  fit.x1 = ScaledComplex::from_parts(y[0] * (nr / n1), rhs.logscale - c1.logscale);
  fit.x2 = ScaledComplex::from_parts(y[1] * (nr / n2), rhs.logscale - c2.logscale);
  return fit;
}

ScaledVector negate(ScaledVector v) {
  v.mantissas = -v.mantissas;
  return v;
}

template <class Build>
SecancyData search_shifts(const CVector& U, const CVector& V, const CVector& A, const PeriodMatrix& B,
                          const Build& build) {
  const int g = B.genus();
  SecancyData best;
  best.U = U;
  best.V = V;
  best.A = A;
  best.residual = std::numeric_limits<double>::infinity();
  LinearFit best_fit;
  const unsigned shifts = 1u << (2 * g);
  best.shift_residuals.assign(shifts, std::numeric_limits<double>::infinity());
  bool any = false;
  for (unsigned s = 0; s < shifts; ++s) {
    const CVector As = A + half_period(s, B);
    LinearFit fit = build(As);
    if (!fit.rank_ok) continue;
    best.shift_residuals[s] = fit.residual;
    if (!any || fit.residual < best.residual) {
      any = true;
      best.residual = fit.residual;
      best.calibration_shift = s;
      best.A_shifted = As;
      best_fit = fit;
    }
  }
  if (!any) fail(ErrorKind::RankDeficient, "design matrix is rank deficient for every calibration shift");
  best.exp_p = best_fit.x1.value();
  best.p = scaled_log(best_fit.x1);
  best.exp_E = best_fit.x2.value();
  best.E = scaled_log(best_fit.x2);
  return best;
}

}  // namespace

ProjectivePoint kummer_map(const CVector& Z, const PeriodMatrix& B) {
  ProjectivePoint p;
  p.g = B.genus();
  p.coords = level_two_vector(Z, B);
  const double m = p.coords.mantissas.cwiseAbs().maxCoeff();
  if (!(m >= 1e-250) || !std::isfinite(m)) fail(ErrorKind::ZeroVector, "Kummer coordinates vanish");
  return p;
}

double projective_distance(const ProjectivePoint& p, const ProjectivePoint& q) {
  if (p.coords.size() != q.coords.size()) fail(ErrorKind::DimensionMismatch, "projective dimensions differ");
  const CVector a = p.coords.mantissas.normalized();
  const CVector b = q.coords.mantissas.normalized();
  // Sine of the angle between the lines, from the component of b orthogonal to a.
  return (b - a * a.dot(b)).norm();
}

double collinearity_defect(const ProjectivePoint& p1, const ProjectivePoint& p2, const ProjectivePoint& p3) {
  const Eigen::Index n = p1.coords.size();
  if (p2.coords.size() != n || p3.coords.size() != n)
    fail(ErrorKind::DimensionMismatch, "projective dimensions differ");
  if (n < 3) return 0.0;
  CMatrix M(3, n);
  const ProjectivePoint* pts[3] = {&p1, &p2, &p3};
  for (int i = 0; i < 3; ++i) {
    const double norm = pts[i]->coords.mantissas.norm();
    if (norm == 0.0) fail(ErrorKind::ZeroVector, "projective point with zero coordinates");
    M.row(i) = pts[i]->coords.mantissas.transpose() / norm;
  }
  Eigen::JacobiSVD<CMatrix> svd(M);
  const auto& sv = svd.singularValues();
  return sv[2] / sv[0];
}

CVector half_period(unsigned index, const PeriodMatrix& B) {
  const int g = B.genus();
  RVector alpha = RVector::Zero(g), beta = RVector::Zero(g);
  for (int j = 0; j < g; ++j) {
    if (index & (1u << j)) alpha[j] = 1.0;
    if (index & (1u << (g + j))) beta[j] = 1.0;
  }
  return 0.5 * (alpha.cast<cplx>() + B.entries() * beta.cast<cplx>());
}

SecancyData fit_secancy_discrete(const CVector& U, const CVector& V, const CVector& A, const PeriodMatrix& B) {
  const int g = B.genus();
  if (U.size() != g || V.size() != g || A.size() != g)
    fail(ErrorKind::DimensionMismatch, "vector length differs from genus");
  require_distinct(U, V, B, "U and V");
  require_distinct(V, A, B, "V and A");
  require_distinct(A, U, B, "A and U");
  return search_shifts(U, V, A, B, [&](const CVector& As) {
    const ScaledVector c1 = level_two_vector(0.5 * (As + U - V), B);
    const ScaledVector c2 = negate(level_two_vector(0.5 * (As + V - U), B));
    const ScaledVector rhs = negate(level_two_vector(0.5 * (As - U - V), B));
    return solve_two_columns(c1, c2, rhs);
  });
}

SecancyData fit_secancy_semidiscrete(const CVector& U, const CVector& V, const CVector& A,
                                     const PeriodMatrix& B) {
  const int g = B.genus();
  if (U.size() != g || V.size() != g || A.size() != g)
    fail(ErrorKind::DimensionMismatch, "vector length differs from genus");
  require_distinct(U, A, B, "U and A");
  if (!(V.norm() > 1e-14)) fail(ErrorKind::InvalidInput, "V must be non-zero");
  SecancyData out = search_shifts(U, V, A, B, [&](const CVector& As) {
    const ScaledVector c1 = level_two_vector(0.5 * (As + U), B);
    const LevelTwoJet minus = level_two_jet(0.5 * (As - U), B, V);
    return solve_two_columns(c1, negate(minus.value), minus.derivative);
  });
  // E enters linearly here; exp_E is recorded for completeness.
  out.E = out.exp_E;
  out.exp_E = std::exp(out.E);
  return out;
}

}  // namespace theta_secant
