#include "theta_secant/divisor.hpp"

#include <algorithm>
#include <string>

#include "theta_secant/errors.hpp"
#include "theta_secant/rng.hpp"
#include "theta_secant/roots.hpp"

namespace theta_secant {

namespace {

void check_dims(const CVector& v, const PeriodMatrix& B, const char* name) {
  if (v.size() != B.genus())
    fail(ErrorKind::DimensionMismatch, std::string(name) + " has size " + std::to_string(v.size()) +
                                           ", genus is " + std::to_string(B.genus()));
}

ScaledComplex theta_at(const PeriodMatrix& B, const CVector& z) { return theta(B, z); }

// theta and its first two derivatives along V at z.
ThetaJet jet_along(const PeriodMatrix& B, const CVector& z, const CVector& V) {
  return theta_jet(B, z, {V}, 2);
}

}  // namespace

std::vector<DivisorSample> sample_theta_divisor(const PeriodMatrix& B, std::uint64_t seed, int count) {
  if (count < 0 || count > 10000) fail(ErrorKind::InvalidInput, "divisor sample count must be in [0, 10^4]");
  std::vector<DivisorSample> out;
  const int g = B.genus();
  const long max_lines = 100L * count;
  for (long line = 0; line < max_lines && static_cast<int>(out.size()) < count; ++line) {
    const std::uint64_t line_seed = derive_seed(seed, static_cast<std::uint64_t>(line));
    Rng rng(line_seed);
    RVector a(g), b(g);
    for (int j = 0; j < g; ++j) a[j] = rng.uniform();
    for (int j = 0; j < g; ++j) b[j] = rng.uniform();
    const CVector Z0 = a.cast<cplx>() + B.entries() * b.cast<cplx>();
    CVector D = rng.complex_vector(g, 1.0);
    D /= D.norm();

    LineFunction f = [&](cplx s) {
      ThetaJet j = theta_jet(B, Z0 + s * D, {D}, 1);
      return LineSample{j.value, j.d1[0], j.logscale};
    };
    const RootSearchBox box{0.0, 1.0, 8};
    double scale = 0.0;
    for (int i = 0; i <= 4; ++i)
      for (int k = 0; k <= 4; ++k) {
        cplx s(-1.0 + 0.5 * i, -1.0 + 0.5 * k);
        CVector z = Z0 + s * D;
        scale = std::max(scale, normalized_abs(theta_at(B, z), z, B));
      }
    for (cplx s : line_roots(f, box)) {
      CVector Z = Z0 + s * D;
      double rel = normalized_abs(theta_at(B, Z), Z, B) / scale;
      if (!(rel <= 1e-10)) continue;
      bool distinct = true;
      for (const auto& prev : out) distinct = distinct && lattice_distance(Z - prev.Z, B) > 1e-6;
      if (!distinct) continue;
      out.push_back({Z, rel, line_seed});
      if (static_cast<int>(out.size()) == count) break;
    }
  }
  if (static_cast<int>(out.size()) < count)
    fail(ErrorKind::RootSearchFailed, "found " + std::to_string(out.size()) + " of " + std::to_string(count) +
                                          " divisor points in " + std::to_string(max_lines) + " lines");
  return out;
}

double residual_cm7(const DivisorSample& s, const CVector& U, const CVector& V, const PeriodMatrix& B) {
  check_dims(s.Z, B, "Z");
  check_dims(U, B, "U");
  check_dims(V, B, "V");
  const ThetaJet p = jet_along(B, s.Z + U, V);
  const ThetaJet m = jet_along(B, s.Z - U, V);
  const ThetaJet c = jet_along(B, s.Z, V);
  const ScaledComplex lhs = (p.df(0) * m.f() + p.f() * m.df(0)) * c.df(0);
  const ScaledComplex rhs = p.f() * m.f() * c.ddf(0, 0);
  return relative_residual(lhs, rhs);
}

double residual_cm7d(const DivisorSample& s, const CVector& U, const CVector& V, const PeriodMatrix& B) {
  check_dims(s.Z, B, "Z");
  check_dims(U, B, "U");
  check_dims(V, B, "V");
  const CVector& Z = s.Z;
  const ScaledComplex t1 = theta_at(B, Z + U) * theta_at(B, Z - V) * theta_at(B, Z - U + V);
  const ScaledComplex t2 = theta_at(B, Z - U) * theta_at(B, Z + V) * theta_at(B, Z + U - V);
  return relative_residual(t1, -t2);
}

double singular_locus_probe(const DivisorSample& s, const CVector& U, const CVector& V, const PeriodMatrix& B,
                            int K) {
  check_dims(s.Z, B, "Z");
  check_dims(U, B, "U");
  check_dims(V, B, "V");
  if (K < 0) fail(ErrorKind::InvalidInput, "probe depth must be >= 0");
  const CVector step = U - V;
  double best = 0.0;
  for (int k = -K; k <= K; ++k) {
    CVector z = s.Z + static_cast<double>(k) * step;
    best = std::max(best, normalized_abs(theta_at(B, z), z, B));
  }
  return best;
}

}  // namespace theta_secant
