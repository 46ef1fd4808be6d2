#include "theta_secant/series.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/LU>

#include "theta_secant/errors.hpp"
#include "theta_secant/roots.hpp"

namespace theta_secant {

namespace {

constexpr double kGuardFloor = 1e-8;
constexpr double kF2dFloor = 1e-10;
constexpr double kCollision = 1e-6;
constexpr double kLaurentRadius = 0.02;

// tau and d tau / dx only, as a LineSample in x at fixed t.
LineSample sample_x(const LineTau& tau, cplx x, cplx t) {
  ThetaJet j = theta_jet(tau.B, tau.argument(x, t), {tau.dx}, 1);
  cplx value = j.value;
  if (tau.offset != cplx(0.0)) value += tau.offset * std::exp(-j.logscale);
  return LineSample{value, j.d1[0], j.logscale};
}

void check_genus(const LineTau& tau) {
  const int g = tau.B.genus();
  if (tau.dx.size() != g || tau.dt.size() != g || tau.base.size() != g)
    fail(ErrorKind::DimensionMismatch, "tau directions and base point must have the genus as size");
}

// Weights on the nodes -2..2 (unit spacing) for the derivative at each node
// and for the integral from node 0 to each node, both from the quartic
// Lagrange interpolant.
struct Stencil {
  RMatrix D, Q;
  Stencil() {
    RMatrix V(5, 5), Dp(5, 5), Ip(5, 5);
    for (int i = 0; i < 5; ++i) {
      const double s = i - 2;
      for (int p = 0; p < 5; ++p) {
        V(i, p) = std::pow(s, p);
        Dp(i, p) = p == 0 ? 0.0 : p * std::pow(s, p - 1);
        Ip(i, p) = std::pow(s, p + 1) / (p + 1);
      }
    }
    const RMatrix Vinv = V.inverse();
    D = Dp * Vinv;
    Q = Ip * Vinv;
  }
};

const Stencil& stencil() {
  static const Stencil s;
  return s;
}

}  // namespace

// ---- LineTau ----

LineTau LineTau::continuous(const CVector& U, const CVector& V, const CVector& Z, const PeriodMatrix& B) {
  LineTau t{B, U, V, Z, 0.0};
  check_genus(t);
  return t;
}

LineTau LineTau::discrete(const CVector& U, const CVector& V, const CVector& Z, const PeriodMatrix& B) {
  if (U.size() != V.size() || U.size() != Z.size())
    fail(ErrorKind::DimensionMismatch, "U, V and Z must have the same size");
  LineTau t{B, 0.5 * (U - V), 0.5 * (U + V), Z + 0.5 * (U + V), 0.0};
  check_genus(t);
  return t;
}

ScaledComplex LineTau::operator()(cplx x, cplx t) const {
  ScaledComplex v = theta(B, argument(x, t));
  if (offset != cplx(0.0)) v += ScaledComplex(offset);
  return v;
}

double LineTau::normalized(cplx x, cplx t) const {
  const CVector z = argument(x, t);
  return normalized_abs((*this)(x, t), z, B);
}

TauJet tau_jet(const LineTau& tau, cplx x, cplx t, int order) {
  if (order < 1 || order > 2) fail(ErrorKind::InvalidInput, "tau_jet order must be 1 or 2");
  ThetaJet j = theta_jet(tau.B, tau.argument(x, t), {tau.dx, tau.dt}, order);
  TauJet out;
  out.f = j.f();
  if (tau.offset != cplx(0.0)) out.f += ScaledComplex(tau.offset);
  out.fx = j.df(0);
  out.ft = j.df(1);
  if (order == 2) {
    out.fxx = j.ddf(0, 0);
    out.fxt = j.ddf(0, 1);
    out.ftt = j.ddf(1, 1);
  }
  return out;
}

cplx tau_v(const LineTau& tau, cplx x, cplx t) {
  TauJet j = tau_jet(tau, x, t, 1);
  return -(j.ft / j.f).value();
}

cplx find_tau_zero(const LineTau& tau, cplx t, cplx center, double half_width) {
  check_genus(tau);
  LineFunction f = [&](cplx x) { return sample_x(tau, x, t); };
  // Zeros along the line are spaced about 1/|dx|, so a short dx needs a wide square.
  const double dx_size = tau.dx.cwiseAbs().maxCoeff();
  const double limit = std::max(8.0 * half_width, dx_size > 0.0 ? 2.0 / dx_size : 0.0);
  std::vector<cplx> roots;
  for (double w = half_width; roots.empty() && w <= limit; w *= 2.0)
    roots = line_roots(f, RootSearchBox{center, w, 8});
  if (roots.empty())
    fail(ErrorKind::RootSearchFailed, "no zero of tau in the search square around the initial guess");
  return *std::min_element(roots.begin(), roots.end(),
                           [&](cplx a, cplx b) { return std::abs(a - center) < std::abs(b - center); });
}

cplx canonical_zero(const LineTau& tau, cplx t) {
  check_genus(tau);
  if (tau.B.genus() != 1) fail(ErrorKind::InvalidInput, "canonical zero needs genus 1");
  if (tau.dx[0] == cplx(0.0)) fail(ErrorKind::InvalidInput, "canonical zero needs dx != 0");
  return (0.5 * (1.0 + tau.B(0, 0)) - t * tau.dt[0] - tau.base[0]) / tau.dx[0];
}

// ---- zero tracking ----

ZeroPath track_tau_zero(const LineTau& tau, const std::vector<double>& grid, cplx x_guess,
                        double search_half_width) {
  check_genus(tau);
  if (grid.empty()) fail(ErrorKind::InvalidInput, "empty parameter grid");
  for (double t : grid)
    if (!std::isfinite(t)) fail(ErrorKind::InvalidInput, "grid values must be finite");
  ZeroPath path;
  cplx eta = find_tau_zero(tau, grid[0], x_guess, search_half_width);
  for (size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    if (i > 0) {
      bool converged = false;
      for (int it = 0; it < 50; ++it) {
        LineSample s = sample_x(tau, eta, t);
        if (s.slope == cplx(0.0)) break;
        const cplx step = s.value / s.slope;
        if (!std::isfinite(std::abs(step))) break;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(eta))) {
          converged = true;
          break;
        }
        eta -= step;
      }
      if (!converged)
        fail(ErrorKind::LostZero, "Newton did not converge at t = " + std::to_string(t));
    }
    TauJet j = tau_jet(tau, eta, t, 2);
    const CVector arg = tau.argument(eta, t);
    if (normalized_abs(j.fx, arg, tau.B) < 1e-10)
      fail(ErrorKind::DegenerateZero, "d tau / dx vanishes at the tracked zero, t = " + std::to_string(t));
    if (!(std::abs((j.f / j.fx).value()) <= 1e-10))
      fail(ErrorKind::LostZero, "tracked point is not a zero at t = " + std::to_string(t));
    const cplx eta_dot = -(j.ft / j.fx).value();
    if (i > 0) {
      const double h = t - grid[i - 1];
      const cplx disp = eta - path.eta.back();
      const double speed = std::max(std::abs(eta_dot), std::abs(path.eta_dot.back()));
      const cplx predicted = 0.5 * h * (eta_dot + path.eta_dot.back());
      if (std::abs(disp) > 10 * std::abs(h) * speed + 1e-12 ||
          std::abs(disp - predicted) > 0.5 * std::abs(h) * speed + 1e-10)
        fail(ErrorKind::LostZero, "zero jumped between t = " + std::to_string(grid[i - 1]) +
                                      " and t = " + std::to_string(t));
    }
    cplx v0 = 0.0;
    for (int k = 0; k < 5; ++k) {
      const cplx d = kLaurentRadius * std::exp(cplx(0.0, 2 * kPi * k / 5));
      v0 += tau_v(tau, eta + d, t) - eta_dot / d;
    }
    v0 /= 5.0;
    const cplx closed = ((-0.5 * eta_dot) * j.fxx / j.fx - j.fxt / j.fx).value();
    path.t.push_back(t);
    path.eta.push_back(eta);
    path.eta_dot.push_back(eta_dot);
    path.v0.push_back(v0);
    path.v0_closed.push_back(closed);
  }
  return path;
}

ZeroPath track_tau_zero(const CVector& U, const CVector& V, const CVector& Z, const PeriodMatrix& B,
                        const std::vector<double>& grid, cplx x_guess) {
  return track_tau_zero(LineTau::continuous(U, V, Z, B), grid, x_guess);
}

double cm5_residual(const ZeroPath& path, const LineTau& tau) {
  const size_t n = path.t.size();
  if (n < 5) fail(ErrorKind::InvalidInput, "cm5 needs at least 5 grid points");
  const double h = path.t[1] - path.t[0];
  for (size_t i = 1; i < n; ++i)
    if (std::abs(path.t[i] - path.t[i - 1] - h) > 1e-9 * std::abs(h))
      fail(ErrorKind::InvalidInput, "cm5 needs a uniform grid");
  double worst = 0.0;
  for (size_t i = 2; i + 2 < n; ++i) {
    const auto& e = path.eta;
    const cplx eta = e[i];
    const double t = path.t[i];
    if (tau.normalized(eta + 1.0, t) < kGuardFloor || tau.normalized(eta - 1.0, t) < kGuardFloor)
      fail(ErrorKind::GuardFailed, "tau vanishes at eta +- 1, t = " + std::to_string(t));
    // 5-point second difference written in offsets from eta_i.
    const cplx near = (e[i + 1] - eta) + (e[i - 1] - eta);
    const cplx far = (e[i + 2] - eta) + (e[i - 2] - eta);
    const cplx ddot = (16.0 * near - far) / (12 * h * h);
    const cplx vp = tau_v(tau, eta + 1.0, t);
    const cplx vm = tau_v(tau, eta - 1.0, t);
    const cplx v0 = path.v0[i];
    const cplx d = path.eta_dot[i];
    const cplx rhs = d * (2.0 * v0 - vp - vm);
    const double scale =
        std::abs(ddot) + std::abs(d) * (2 * std::abs(v0) + std::abs(vp) + std::abs(vm)) + kResidualFloor;
    worst = std::max(worst, std::abs(ddot - rhs) / scale);
  }
  return worst;
}

// ---- RS kernels and integrator ----

RSKernel RSKernel::rational() { return RSKernel{}; }

RSKernel RSKernel::trigonometric(double L) {
  if (!(L > 0.0) || !std::isfinite(L)) fail(ErrorKind::InvalidInput, "trigonometric period must be positive");
  RSKernel k;
  k.kind = KernelKind::Trigonometric;
  k.period = L;
  return k;
}

RSKernel RSKernel::elliptic(cplx w1, cplx w2) {
  if (w1 == cplx(0.0)) fail(ErrorKind::InvalidInput, "elliptic period w1 is zero");
  const cplx ratio = w2 / w1;
  if (!(ratio.imag() > 0.0)) fail(ErrorKind::InvalidInput, "elliptic periods need Im(w2/w1) > 0");
  RSKernel k;
  k.kind = KernelKind::Elliptic;
  k.w1 = w1;
  k.w2 = w2;
  k.tau = PeriodMatrix(CMatrix::Constant(1, 1, ratio));
  return k;
}

cplx RSKernel::phi(cplx x) const {
  switch (kind) {
    case KernelKind::Rational:
      return 1.0 / x;
    case KernelKind::Trigonometric: {
      const cplx a = kPi * x / period;
      return (kPi / period) * std::cos(a) / std::sin(a);
    }
    case KernelKind::Elliptic: {
      RVector half = RVector::Constant(1, 0.5);
      ThetaJet j = theta_jet(tau, CVector::Constant(1, x / w1), {CVector::Constant(1, 1.0)}, 1,
                             ThetaCharacteristic(half, half));
      return j.d1[0] / (j.value * w1);
    }
  }
  return 0.0;
}

double RSKernel::singular_distance(cplx x) const {
  double best = 1e300;
  for (double c : {0.0, 1.0, -1.0}) {
    cplx y = x - c;
    double d = 0.0;
    switch (kind) {
      case KernelKind::Rational:
        d = std::abs(y);
        break;
      case KernelKind::Trigonometric:
        d = std::abs(cplx(std::remainder(y.real(), period), y.imag()));
        break;
      case KernelKind::Elliptic:
        d = lattice_distance(CVector::Constant(1, y / w1), tau) * std::abs(w1);
        break;
    }
    best = std::min(best, d);
  }
  return best;
}

namespace {

void check_guard(const CVector& x, const RSKernel& k, ErrorKind kind) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (Eigen::Index j = i + 1; j < x.size(); ++j)
      if (!(k.singular_distance(x[i] - x[j]) >= kCollision))
        fail(kind, "particles " + std::to_string(i) + " and " + std::to_string(j) +
                       " are within 1e-6 of a kernel singularity");
}

CVector acceleration(const CVector& x, const CVector& xdot, const RSKernel& k) {
  check_guard(x, k, ErrorKind::Collision);
  const Eigen::Index n = x.size();
  CVector a = CVector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      // f is odd, so one evaluation serves both particles.
      const cplx f = k(x[i] - x[j]);
      const cplx w = xdot[i] * xdot[j] * f;
      a[i] += w;
      a[j] -= w;
    }
  return a;
}

}  // namespace

CVector rs_acceleration(const RSState& s) { return acceleration(s.x, s.xdot, s.kernel); }

RSTrajectory rs_integrate(const RSState& state, double t_end, double h, int sample_every) {
  if (state.x.size() != state.xdot.size()) fail(ErrorKind::DimensionMismatch, "x and xdot differ in size");
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::InvalidInput, "step must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) fail(ErrorKind::InvalidInput, "t_end must be >= 0");
  if (sample_every < 1) fail(ErrorKind::InvalidInput, "sample_every must be >= 1");
  check_guard(state.x, state.kernel, ErrorKind::InvalidInput);
  const RSKernel& k = state.kernel;
  RSTrajectory traj;
  CVector x = state.x, v = state.xdot;
  double t = 0.0;
  traj.t.push_back(t);
  traj.x.push_back(x);
  traj.xdot.push_back(v);
  const long steps = static_cast<long>(std::ceil(t_end / h - 1e-9));
  for (long n = 1; n <= steps; ++n) {
    const double dt = std::min(h, t_end - t);
    const CVector a1 = acceleration(x, v, k);
    const CVector x2 = x + 0.5 * dt * v, v2 = v + 0.5 * dt * a1;
    const CVector a2 = acceleration(x2, v2, k);
    const CVector x3 = x + 0.5 * dt * v2, v3 = v + 0.5 * dt * a2;
    const CVector a3 = acceleration(x3, v3, k);
    const CVector x4 = x + dt * v3, v4 = v + dt * a3;
    const CVector a4 = acceleration(x4, v4, k);
    x += dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4);
    v += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    t = n == steps ? t_end : t + dt;
    if (n % sample_every == 0 || n == steps) {
      traj.t.push_back(t);
      traj.x.push_back(x);
      traj.xdot.push_back(v);
    }
  }
  check_guard(x, k, ErrorKind::Collision);
  return traj;
}

// ---- discrete pole dynamics ----

double f2d_residual(const LineTau& tau, cplx eta, double nu) {
  check_genus(tau);
  struct Factor {
    double dx, dnu;
  };
  const Factor num[3] = {{1, 1}, {-2, 0}, {1, -1}};
  const Factor den[3] = {{-1, 1}, {2, 0}, {-1, -1}};
  ScaledComplex top = 1.0, bottom = 1.0;
  for (int i = 0; i < 3; ++i) {
    const cplx xn = eta + num[i].dx, xd = eta + den[i].dx;
    const double tn = nu + num[i].dnu, td = nu + den[i].dnu;
    if (tau.normalized(xn, tn) < kF2dFloor || tau.normalized(xd, td) < kF2dFloor)
      fail(ErrorKind::GuardFailed, "a tau factor of the pole-dynamics ratio vanishes");
    top *= tau(xn, tn);
    bottom *= tau(xd, td);
  }
  return std::abs((top / bottom).value() + 1.0);
}

double f2d_residual(const CVector& U, const CVector& V, const CVector& Z, const PeriodMatrix& B, double nu,
                    cplx x_guess) {
  LineTau tau = LineTau::discrete(U, V, Z, B);
  return f2d_residual(tau, find_tau_zero(tau, nu, x_guess, 1.0), nu);
}

DiscretePotential discrete_potential(const LineTau& tau) {
  return [tau](cplx x, double nu) {
    return (tau(x, nu + 1) * tau(x, nu - 1) / (tau(x - 1.0, nu) * tau(x + 1.0, nu))).value();
  };
}

bool DiscreteSeries::has(int s, int k, int j) const { return s == 0 || xi.count({s, k, j}) > 0; }

cplx DiscreteSeries::at(int s, int k, int j) const {
  if (s == 0) return 1.0;
  auto it = xi.find({s, k, j});
  if (it == xi.end())
    fail(ErrorKind::WindowExhausted, "xi_" + std::to_string(s) + " is not stored at k = " + std::to_string(k) +
                                         ", level " + std::to_string(j));
  return it->second;
}

void discrete_series_extend(DiscreteSeries& table, const DiscretePotential& u, int s, int j, cplx seed_even,
                            cplx seed_odd) {
  const int W = table.window;
  if (W < 1) fail(ErrorKind::InvalidInput, "orbit window must be >= 1");
  if (s < 0) fail(ErrorKind::InvalidInput, "series level must be >= 0");
  const double nu = table.nu0 + j;
  auto u_at = [&](int k) {
    const cplx value = u(table.x0 + double(k), nu);
    if (!(std::abs(value) <= 1e8)) table.near_poles.push_back({s + 1, k, j});
    return value;
  };
  table.xi[{s + 1, 0, j}] = seed_even;
  table.xi[{s + 1, 1, j}] = seed_odd;
  for (int k = 1; k <= W - 1; ++k)
    table.xi[{s + 1, k + 1, j}] = table.at(s + 1, k - 1, j) - u_at(k) * table.at(s, k, j - 1);
  for (int k = 0; k >= -W + 1; --k)
    table.xi[{s + 1, k - 1, j}] = table.at(s + 1, k + 1, j) + u_at(k) * table.at(s, k, j - 1);
}

double discrete_recursion_defect(const DiscreteSeries& table, const DiscretePotential& u, int s, int j) {
  const double nu = table.nu0 + j;
  double worst = 0.0;
  for (int k = -table.window + 1; k <= table.window - 1; ++k) {
    const cplx a = table.at(s + 1, k - 1, j), b = table.at(s + 1, k + 1, j);
    const cplx r = u(table.x0 + double(k), nu) * table.at(s, k, j - 1);
    worst = std::max(worst, std::abs(a - b - r) / (std::abs(a) + std::abs(b) + std::abs(r) + kResidualFloor));
  }
  return worst;
}

ResidueCheck residue_consistency(const LineTau& tau, cplx eta, double nu, cplx xi_plus, cplx xi_minus) {
  const ScaledComplex v0 = tau_jet(tau, eta, nu, 1).fx;
  const ScaledComplex rp =
      tau(eta + 1.0, nu + 1) * tau(eta + 1.0, nu - 1) / (v0 * tau(eta + 2.0, nu)) * ScaledComplex(xi_plus);
  const ScaledComplex rm =
      -(tau(eta - 1.0, nu + 1) * tau(eta - 1.0, nu - 1) / (v0 * tau(eta - 2.0, nu)) * ScaledComplex(xi_minus));
  return ResidueCheck{rp.value(), rm.value(), relative_residual(rp, rm)};
}

// ---- periodic semidiscrete series ----

PeriodicSeries make_periodic_series(const LineTau& tau, int N, cplx x0, double t0, double h) {
  check_genus(tau);
  if (N < 1) fail(ErrorKind::InvalidInput, "period must be >= 1");
  if (!(h > 0.0)) fail(ErrorKind::InvalidInput, "stencil step must be positive");
  PeriodicSeries p;
  p.tau = tau;
  p.N = N;
  p.x0 = x0;
  p.t0 = t0;
  p.h = h;
  double drift = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double t = p.node(i);
    CVector v(2 * N + 1);
    for (int k = 0; k <= 2 * N; ++k) v[k] = tau_v(tau, x0 + double(k), t);
    CVector u(N);
    for (int k = 0; k < N; ++k) {
      u[k] = v[k + 1] - v[k];
      drift = std::max(drift, std::abs(v[k + N + 1] - v[k + N] - u[k]));
    }
    p.u.push_back(u);
    p.v.push_back(v.head(N));
  }
  if (drift > 1e-10)
    fail(ErrorKind::NonPeriodic, "u is not N-periodic in x (max drift " + std::to_string(drift) + ")");
  p.xi.push_back(std::vector<CVector>(5, CVector::Ones(N)));
  return p;
}

void semidiscrete_series_extend(PeriodicSeries& p, bool cancel_mean) {
  const int s = p.levels() - 1;
  const int N = p.N;
  const Stencil& st = stencil();
  std::vector<CVector>& cur = p.xi[s];
  std::vector<CVector> dot(5, CVector::Zero(N));
  std::vector<cplx> c(5, 0.0), cdot(5, 0.0);
  if (s > 0) {
    for (int i = 0; i < 5; ++i)
      for (int m = 0; m < 5; ++m) dot[i] += (st.D(i, m) / p.h) * cur[m];
    if (cancel_mean) {
      for (int i = 0; i < 5; ++i) cdot[i] = -(dot[i] + p.u[i].cwiseProduct(cur[i])).mean();
      for (int i = 0; i < 5; ++i) {
        for (int m = 0; m < 5; ++m) c[i] += p.h * st.Q(i, m) * cdot[m];
        cur[i].array() += c[i];
        dot[i].array() += cdot[i];
      }
    }
  }
  std::vector<CVector> next(5, CVector::Zero(N));
  double defect = 0.0;
  for (int i = 0; i < 5; ++i) {
    const CVector rhs = dot[i] + p.u[i].cwiseProduct(cur[i]);
    defect = std::max(defect, std::abs(rhs.sum()));
    for (int k = 0; k + 1 < N; ++k) next[i][k + 1] = next[i][k] + rhs[k];
  }
  if (static_cast<int>(p.xi_dot.size()) <= s) p.xi_dot.resize(s + 1);
  p.xi_dot[s] = dot;
  p.c.push_back(c);
  p.c_dot.push_back(cdot);
  p.defect.push_back(defect);
  p.xi.push_back(next);
}

double periodic_recursion_defect(const PeriodicSeries& p, int s) {
  if (s < 0 || s + 1 >= p.levels()) fail(ErrorKind::InvalidInput, "level not built");
  double worst = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < p.N; ++k) {
      const cplx lhs = p.xi[s + 1][i][(k + 1) % p.N] - p.xi[s + 1][i][k];
      const cplx rhs = p.xi_dot[s][i][k] + p.u[i][k] * p.xi[s][i][k];
      worst = std::max(worst, std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + kResidualFloor));
    }
  return worst;
}

void write_trajectory_csv(const RSTrajectory& traj, std::ostream& out) {
  out << "t,i,x_re,x_im,xdot_re,xdot_im\n";
  out.precision(17);
  for (size_t n = 0; n < traj.t.size(); ++n)
    for (Eigen::Index i = 0; i < traj.x[n].size(); ++i)
      out << traj.t[n] << ',' << i << ',' << traj.x[n][i].real() << ',' << traj.x[n][i].imag() << ','
          << traj.xdot[n][i].real() << ',' << traj.xdot[n][i].imag() << '\n';
}

void write_zero_path_csv(const ZeroPath& path, std::ostream& out) {
  out << "t,eta_re,eta_im,v0_re,v0_im\n";
  out.precision(17);
  for (size_t n = 0; n < path.t.size(); ++n)
    out << path.t[n] << ',' << path.eta[n].real() << ',' << path.eta[n].imag() << ',' << path.v0[n].real() << ','
        << path.v0[n].imag() << '\n';
}

}  // namespace theta_secant
