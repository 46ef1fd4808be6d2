#include "theta_secant/theta.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "theta_secant/errors.hpp"

namespace theta_secant {

struct PeriodMatrix::Impl {
  CMatrix B;
  RMatrix Y;
  RMatrix Yinv;
  double lambda = 0.0;
};

PeriodMatrix::PeriodMatrix(const CMatrix& entries) {
  if (entries.rows() == 0 || entries.rows() != entries.cols())
    fail(ErrorKind::InvalidInput, "period matrix must be square and non-empty");
  if (!entries.allFinite()) fail(ErrorKind::InvalidInput, "period matrix has non-finite entries");
  double scale = entries.cwiseAbs().maxCoeff();
  double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    std::ostringstream os;
    os << "period matrix not symmetric (max |B_jk - B_kj| = " << asym << ")";
    fail(ErrorKind::InvalidInput, os.str());
  }
  auto impl = std::make_shared<Impl>();
  impl->B = entries;
  impl->Y = entries.imag();
  Eigen::LLT<RMatrix> llt(impl->Y);
  if (llt.info() != Eigen::Success || (llt.matrixL().toDenseMatrix().diagonal().array() <= 0.0).any())
    fail(ErrorKind::NonPosDef, "PeriodMatrix: Im B is not positive definite (Cholesky failed)");
  impl->Yinv = llt.solve(RMatrix::Identity(impl->Y.rows(), impl->Y.cols()));
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(impl->Y, Eigen::EigenvaluesOnly);
  impl->lambda = eig.eigenvalues().minCoeff();
  if (!(impl->lambda > 0.0))
    fail(ErrorKind::NonPosDef, "PeriodMatrix: Im B has a non-positive eigenvalue");
  impl_ = std::move(impl);
}

int PeriodMatrix::genus() const { return impl_ ? static_cast<int>(impl_->B.rows()) : 0; }

const CMatrix& PeriodMatrix::entries() const {
  if (!impl_) fail(ErrorKind::InvalidInput, "empty period matrix");
  return impl_->B;
}
const RMatrix& PeriodMatrix::imag() const { return (void)entries(), impl_->Y; }
const RMatrix& PeriodMatrix::imag_inverse() const { return (void)entries(), impl_->Yinv; }
double PeriodMatrix::min_imag_eigenvalue() const { return (void)entries(), impl_->lambda; }

PeriodMatrix PeriodMatrix::doubled() const { return PeriodMatrix(2.0 * entries()); }

namespace {

double reduce_half(double x) {
  double r = 2.0 * x;
  r = std::round(r);
  r = std::fmod(r, 2.0);
  if (r < 0) r += 2.0;
  return r / 2.0;
}

std::atomic<int> g_radius_cap{64};

}  // namespace

ThetaCharacteristic::ThetaCharacteristic(const RVector& e, const RVector& d) : eps(e), delta(d) {
  if (eps.size() != delta.size()) fail(ErrorKind::DimensionMismatch, "characteristic halves differ in length");
  for (Eigen::Index j = 0; j < eps.size(); ++j) {
    if (std::abs(2.0 * eps[j] - std::round(2.0 * eps[j])) > 1e-12 ||
        std::abs(2.0 * delta[j] - std::round(2.0 * delta[j])) > 1e-12)
      fail(ErrorKind::InvalidInput, "characteristic entries must be half-integers");
    eps[j] = reduce_half(eps[j]);
    delta[j] = reduce_half(delta[j]);
  }
}

ThetaCharacteristic ThetaCharacteristic::zero(int g) {
  return ThetaCharacteristic(RVector::Zero(g), RVector::Zero(g));
}

ThetaCharacteristic ThetaCharacteristic::from_index(int g, unsigned index) {
  RVector e = RVector::Zero(g);
  for (int j = 0; j < g; ++j)
    if (index & (1u << (g - 1 - j))) e[j] = 0.5;
  return ThetaCharacteristic(e, RVector::Zero(g));
}

bool ThetaCharacteristic::is_zero() const {
  return (eps.size() == 0 || eps.isZero()) && (delta.size() == 0 || delta.isZero());
}

int default_radius_cap() { return g_radius_cap.load(); }

void set_default_radius_cap(int cap) {
  if (cap < 1) fail(ErrorKind::InvalidInput, "radius cap must be positive");
  g_radius_cap.store(cap);
}

namespace {

struct Reduction {
  RVector m;   // lattice shift along B
  RVector k;   // integer shift
  CVector w;   // reduced argument z - k - B m
  RVector c;   // Gaussian centre -Y^{-1} Im w
};

Reduction reduce(const PeriodMatrix& B, const CVector& z) {
  Reduction r;
  r.m = (B.imag_inverse() * z.imag()).array().round().matrix();
  CVector w0 = z - B.entries() * r.m.cast<cplx>();
  r.k = w0.real().array().round().matrix();
  r.w = w0 - r.k.cast<cplx>();
  r.c = -(B.imag_inverse() * r.w.imag());
  return r;
}

double tail_bound(int g, double lambda, int r, double poly) {
  double lr = lambda * r;
  double one_dim = 2.0 * std::exp(-kPi * lr * r) / (1.0 - std::exp(-2.0 * kPi * lr));
  return g * one_dim * std::pow(1.0 + 1.0 / std::sqrt(lambda), g - 1) * poly;
}

int radius_for(const PeriodMatrix& B, const Reduction& red, double tol, int order,
               double dir_norm, int cap) {
  if (!(tol >= 1e-16 && tol <= 1e-4)) fail(ErrorKind::InvalidInput, "tol must lie in [1e-16, 1e-4]");
  if (cap <= 0) cap = default_radius_cap();
  const int g = B.genus();
  const double lambda = B.min_imag_eigenvalue();
  const double sg = std::sqrt(static_cast<double>(g));
  const double offset = (red.c - red.m).norm() + sg;
  for (int r = 1;; ++r) {
    if (r > cap) {
      std::ostringstream os;
      os << "truncation radius exceeds cap " << cap << " (min eig Im B = " << lambda << ")";
      fail(ErrorKind::RadiusCap, os.str());
    }
    double poly = 1.0;
    if (order > 0)
      poly = std::pow(std::max(1.0, 2.0 * kPi * dir_norm * (sg * (r + 1.5) + offset)), order);
    if (tail_bound(g, lambda, r, poly) <= tol) return r;
  }
}

}  // namespace

int truncation_radius(const PeriodMatrix& B, const CVector& z, double tol, int deriv_order,
                      double dir_norm, int cap) {
  if (z.size() != B.genus()) fail(ErrorKind::DimensionMismatch, "argument length differs from genus");
  return radius_for(B, reduce(B, z), tol, deriv_order, dir_norm, cap);
}

ScaledComplex ThetaJet::ddf(int i, int j) const {
  int n = static_cast<int>(d1.size());
  return ScaledComplex::from_parts(d2[i * n + j], logscale);
}

ThetaJet theta_jet(const PeriodMatrix& B, const CVector& z, const std::vector<CVector>& dirs,
                   int order, const ThetaCharacteristic& ch, const ThetaOptions& options) {
  const int g = B.genus();
  if (g == 0) fail(ErrorKind::InvalidInput, "empty period matrix");
  if (z.size() != g) fail(ErrorKind::DimensionMismatch, "argument length differs from genus");
  if (order < 0 || order > 2) fail(ErrorKind::InvalidInput, "derivative order must be 0, 1 or 2");
  if (order > 0 && dirs.empty()) fail(ErrorKind::InvalidInput, "derivative requested without direction");
  double dir_norm = 0.0;
  for (const auto& d : dirs) {
    if (d.size() != g) fail(ErrorKind::DimensionMismatch, "direction length differs from genus");
    dir_norm = std::max(dir_norm, d.norm());
  }
  if (!z.allFinite()) fail(ErrorKind::InvalidInput, "non-finite theta argument");
  RVector eps = ch.eps.size() ? ch.eps : RVector::Zero(g);
  RVector delta = ch.delta.size() ? ch.delta : RVector::Zero(g);
  if (eps.size() != g || delta.size() != g)
    fail(ErrorKind::DimensionMismatch, "characteristic length differs from genus");

  const Reduction red = reduce(B, z);
  const int radius = options.radius_override > 0
                         ? options.radius_override
                         : radius_for(B, red, options.tol, order, dir_norm, options.radius_cap);

  const CMatrix& Bm = B.entries();
  const RMatrix& Y = B.imag();
  const CVector wd = red.w + delta.cast<cplx>();
  const cplx two_pi_i = 2.0 * kPi * kI;

  cplx lnF = two_pi_i * eps.dot(red.k);
  CVector mc = red.m.cast<cplx>();
  lnF -= kPi * kI * mc.dot(Bm * mc);  // dot() conjugates its first argument; mc is real
  lnF -= two_pi_i * mc.dot(wd);
  const double M0 = kPi * red.c.dot(Y * red.c);

  const int nd = order > 0 ? static_cast<int>(dirs.size()) : 0;
  ThetaJet jet;
  jet.radius = radius;
  jet.d1.assign(nd, cplx(0.0));
  jet.d2.assign(order > 1 ? nd * nd : 0, cplx(0.0));
  cplx value = 0.0;

  RVector center = red.c.array().round().matrix();
  std::vector<int> idx(g, -radius);
  RVector v(g);
  std::vector<cplx> mult(nd);
  const int side = 2 * radius + 1;
  long total = 1;
  for (int j = 0; j < g; ++j) total *= side;
  for (long count = 0; count < total; ++count) {
    for (int j = 0; j < g; ++j) v[j] = center[j] + idx[j] + eps[j];
    cplx quad = 0.0;
    for (int a = 0; a < g; ++a) {
      cplx row = 0.0;
      for (int b = 0; b < g; ++b) row += Bm(a, b) * v[b];
      quad += v[a] * row;
    }
    cplx lin = 0.0;
    for (int a = 0; a < g; ++a) lin += v[a] * wd[a];
    cplx t = std::exp(kPi * kI * quad + two_pi_i * lin - M0);
    value += t;
    if (nd > 0) {
      for (int i = 0; i < nd; ++i) {
        cplx s = 0.0;
        for (int a = 0; a < g; ++a) s += dirs[i][a] * (v[a] - red.m[a]);
        mult[i] = two_pi_i * s;
        jet.d1[i] += t * mult[i];
      }
      if (order > 1)
        for (int i = 0; i < nd; ++i)
          for (int j = 0; j < nd; ++j) jet.d2[i * nd + j] += t * mult[i] * mult[j];
    }
    for (int j = g - 1; j >= 0; --j) {
      if (++idx[j] <= radius) break;
      idx[j] = -radius;
    }
  }

  const cplx phase = std::polar(1.0, lnF.imag());
  jet.logscale = M0 + lnF.real();
  jet.value = value * phase;
  for (auto& x : jet.d1) x *= phase;
  for (auto& x : jet.d2) x *= phase;
  return jet;
}

ScaledComplex theta(const ThetaRequest& req) {
  if (req.deriv_dirs.size() > 2) fail(ErrorKind::InvalidInput, "at most two derivative directions");
  if (!(req.options.tol >= 1e-16 && req.options.tol <= 1e-4))
    fail(ErrorKind::InvalidInput, "tol must lie in [1e-16, 1e-4]");
  const int order = static_cast<int>(req.deriv_dirs.size());
  ThetaJet jet = theta_jet(req.B, req.z, req.deriv_dirs, order, req.ch, req.options);
  if (order == 0) return jet.f();
  if (order == 1) return jet.df(0);
  return jet.ddf(0, 1);
}

ScaledComplex theta(const PeriodMatrix& B, const CVector& z, const ThetaOptions& options) {
  return theta_jet(B, z, {}, 0, {}, options).f();
}

double theta_fd_check(const ThetaRequest& req, double h) {
  if (req.deriv_dirs.empty() || req.deriv_dirs.size() > 2)
    fail(ErrorKind::InvalidInput, "finite-difference check needs one or two directions");
  if (!(h >= 1e-6 && h <= 1e-3)) fail(ErrorKind::InvalidInput, "step h must lie in [1e-6, 1e-3]");
  const ScaledComplex analytic = theta(req);
  auto at = [&](const CVector& z) {
    return theta_jet(req.B, z, {}, 0, req.ch, req.options).f();
  };
  ScaledComplex fd;
  if (req.deriv_dirs.size() == 1) {
    const CVector& d = req.deriv_dirs[0];
    fd = (at(req.z + h * d) - at(req.z - h * d)) / ScaledComplex(2.0 * h);
  } else {
    const CVector& d1 = req.deriv_dirs[0];
    const CVector& d2 = req.deriv_dirs[1];
    fd = (at(req.z + h * d1 + h * d2) - at(req.z + h * d1 - h * d2) - at(req.z - h * d1 + h * d2) +
          at(req.z - h * d1 - h * d2)) /
         ScaledComplex(4.0 * h * h);
  }
  return relative_residual(analytic, fd);
}

namespace {

ScaledVector common_scale(const std::vector<ScaledComplex>& parts, double ref) {
  ScaledVector out;
  out.logscale = ref;
  out.mantissas.resize(static_cast<Eigen::Index>(parts.size()));
  for (size_t i = 0; i < parts.size(); ++i) out.mantissas[static_cast<Eigen::Index>(i)] = parts[i].value_scaled(ref);
  out.normalize();
  return out;
}

double max_logscale(const std::vector<ScaledComplex>& parts) {
  double ref = -std::numeric_limits<double>::infinity();
  for (const auto& p : parts)
    if (!p.is_zero()) ref = std::max(ref, p.logscale());
  return std::isfinite(ref) ? ref : 0.0;
}

}  // namespace

ScaledVector level_two_vector(const CVector& Z, const PeriodMatrix& B, const ThetaOptions& options) {
  const int g = B.genus();
  if (Z.size() != g) fail(ErrorKind::DimensionMismatch, "argument length differs from genus");
  const PeriodMatrix B2 = B.doubled();
  const CVector Z2 = 2.0 * Z;
  std::vector<ScaledComplex> parts;
  for (unsigned idx = 0; idx < (1u << g); ++idx)
    parts.push_back(theta_jet(B2, Z2, {}, 0, ThetaCharacteristic::from_index(g, idx), options).f());
  return common_scale(parts, max_logscale(parts));
}

LevelTwoJet level_two_jet(const CVector& Z, const PeriodMatrix& B, const CVector& dir,
                          const ThetaOptions& options) {
  const int g = B.genus();
  if (Z.size() != g || dir.size() != g) fail(ErrorKind::DimensionMismatch, "vector length differs from genus");
  const PeriodMatrix B2 = B.doubled();
  const CVector Z2 = 2.0 * Z;
  const std::vector<CVector> dirs{2.0 * dir};
  std::vector<ScaledComplex> values, derivs;
  for (unsigned idx = 0; idx < (1u << g); ++idx) {
    ThetaJet jet = theta_jet(B2, Z2, dirs, 1, ThetaCharacteristic::from_index(g, idx), options);
    values.push_back(jet.f());
    derivs.push_back(jet.df(0));
  }
  std::vector<ScaledComplex> all = values;
  all.insert(all.end(), derivs.begin(), derivs.end());
  const double ref = max_logscale(all);
  return {common_scale(values, ref), common_scale(derivs, ref)};
}

double normalized_abs(const ScaledComplex& value, const CVector& z, const PeriodMatrix& B) {
  if (value.is_zero()) return 0.0;
  const RVector y = z.imag();
  return std::exp(value.log_abs() - kPi * y.dot(B.imag_inverse() * y));
}

LatticeCoordinates lattice_coordinates(const CVector& z, const PeriodMatrix& B) {
  if (z.size() != B.genus()) fail(ErrorKind::DimensionMismatch, "vector length differs from genus");
  LatticeCoordinates lc;
  lc.beta = B.imag_inverse() * z.imag();
  lc.alpha = z.real() - B.entries().real() * lc.beta;
  return lc;
}

double lattice_distance(const CVector& z, const PeriodMatrix& B) {
  const int g = B.genus();
  LatticeCoordinates lc = lattice_coordinates(z, B);
  RVector a = lc.alpha - lc.alpha.array().round().matrix();
  RVector b = lc.beta - lc.beta.array().round().matrix();
  // The rounded representative is not always the nearest point for a skewed
  // lattice; scan the neighbouring cells.
  double best = std::numeric_limits<double>::infinity();
  const int n = 2 * g;
  long total = 1;
  for (int j = 0; j < n; ++j) total *= 3;
  std::vector<int> off(n, -1);
  for (long count = 0; count < total; ++count) {
    RVector aa = a, bb = b;
    for (int j = 0; j < g; ++j) {
      aa[j] += off[j];
      bb[j] += off[g + j];
    }
    CVector w = aa.cast<cplx>() + B.entries() * bb.cast<cplx>();
    best = std::min(best, w.norm());
    for (int j = n - 1; j >= 0; --j) {
      if (++off[j] <= 1) break;
      off[j] = -1;
    }
  }
  return best;
}

}  // namespace theta_secant
