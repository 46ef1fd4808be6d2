#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <vector>

#include "theta_secant/linalg.hpp"
#include "theta_secant/scaled_complex.hpp"
#include "theta_secant/theta.hpp"

namespace theta_secant {

// tau(x, t) = theta(x dx + t dt + base) + offset. A nonzero offset gives a
// function that is not a theta function of the lattice, used as a control.
struct LineTau {
  PeriodMatrix B;
  CVector dx, dt, base;
  cplx offset{0.0, 0.0};

  // tau(x, t) = theta(xU + tV + Z).
  static LineTau continuous(const CVector& U, const CVector& V, const CVector& Z, const PeriodMatrix& B);
  // tau(x, nu) = theta((x/2)(U - V) + ((nu + 1)/2)(U + V) + Z), i.e. theta(mU + nV + Z)
  // with x = m - n, nu = m + n - 1.
  static LineTau discrete(const CVector& U, const CVector& V, const CVector& Z, const PeriodMatrix& B);

  CVector argument(cplx x, cplx t) const { return x * dx + t * dt + base; }
  ScaledComplex operator()(cplx x, cplx t) const;
  // Normalized modulus of tau at (x, t); the Gaussian weight of the theta
  // argument is applied to the offset too.
  double normalized(cplx x, cplx t) const;
};

struct TauJet {
  ScaledComplex f, fx, ft, fxx, fxt, ftt;
};
// order 1 fills f, fx, ft; order 2 adds the second derivatives.
TauJet tau_jet(const LineTau& tau, cplx x, cplx t, int order);

// v = -d_t ln tau.
cplx tau_v(const LineTau& tau, cplx x, cplx t);

// Zero of x -> tau(x, t) closest to center among those found in the square of
// the given half width. While empty the square is doubled, up to 8 times its
// first size or 2/max|dx_j|, whichever is larger. RootSearchFailed if there is
// still none.
cplx find_tau_zero(const LineTau& tau, cplx t, cplx center, double half_width = 0.5);

// Genus 1: the x where the argument of tau(., t) is (1 + B)/2, the zero of
// theta in the fundamental cell. Near other zeros, translates by multiples of
// B, |theta| is larger and a fixed additive offset matters less. InvalidInput
// for genus above 1 or dx = 0.
cplx canonical_zero(const LineTau& tau, cplx t);

// ---- zero tracking and pole dynamics ----

struct ZeroPath {
  std::vector<double> t;
  std::vector<cplx> eta;
  std::vector<cplx> eta_dot;    // -tau_t / tau_x at the zero
  std::vector<cplx> v0;         // mean of v - eta_dot/(x - eta) on a 5-point circle of radius 0.02
  std::vector<cplx> v0_closed;  // (-tau_xx eta_dot / 2 - tau_xt) / tau_x
};

// Follows a zero of tau(., t) along the grid, Newton warm-started at the
// previous zero. The first zero is the one closest to x_guess within the
// square of half width search_half_width.
ZeroPath track_tau_zero(const LineTau& tau, const std::vector<double>& grid, cplx x_guess = 0.0,
                        double search_half_width = 0.5);
ZeroPath track_tau_zero(const CVector& U, const CVector& V, const CVector& Z, const PeriodMatrix& B,
                        const std::vector<double>& grid, cplx x_guess = 0.0);

// Max over interior points (5-point stencil) of
// |eta_ddot - eta_dot (2 v0 - v(eta+1) - v(eta-1))| divided by
// |eta_ddot| + |eta_dot| (2|v0| + |v(eta+1)| + |v(eta-1)|) + floor.
// The grid must be uniform.
double cm5_residual(const ZeroPath& path, const LineTau& tau);

// ---- Ruijsenaars-Schneider dynamics ----

enum class KernelKind { Rational, Trigonometric, Elliptic };

// f(x) = 2 phi(x) - phi(x+1) - phi(x-1) with
//   rational:      phi(x) = 1/x
//   trigonometric: phi(x) = (pi/L) cot(pi x / L)
//   elliptic:      phi(x) = theta_11'(x/w1 | w2/w1) / (w1 theta_11(x/w1 | w2/w1))
struct RSKernel {
  KernelKind kind = KernelKind::Rational;
  double period = 0.0;  // L
  cplx w1{0.0, 0.0}, w2{0.0, 0.0};
  PeriodMatrix tau;  // [[w2 / w1]] for the elliptic kernel

  static RSKernel rational();
  static RSKernel trigonometric(double L);
  static RSKernel elliptic(cplx w1, cplx w2);

  cplx phi(cplx x) const;
  cplx operator()(cplx x) const { return 2.0 * phi(x) - phi(x + 1.0) - phi(x - 1.0); }
  // Distance from x to the set {0, 1, -1} plus the kernel's periods.
  double singular_distance(cplx x) const;
};

struct RSState {
  CVector x;
  CVector xdot;
  RSKernel kernel;
  int size() const { return static_cast<int>(x.size()); }
};

struct RSTrajectory {
  std::vector<double> t;
  std::vector<CVector> x;
  std::vector<CVector> xdot;
};

// x_i'' = sum_{j != i} x_i' x_j' f(x_i - x_j).
CVector rs_acceleration(const RSState& s);

// Classical RK4 with fixed step h, sampling every sample_every steps and at
// t_end. InvalidInput if the start violates the 1e-6 collision guard,
// Collision if a stage does.
RSTrajectory rs_integrate(const RSState& state, double t_end, double h, int sample_every = 1);

// ---- discrete pole dynamics ----

// |ratio + 1| for ratio = tau(e+1,nu+1) tau(e-2,nu) tau(e+1,nu-1)
//                       / (tau(e-1,nu+1) tau(e+2,nu) tau(e-1,nu-1)), e = eta.
// GuardFailed if a factor has normalized modulus below 1e-10.
double f2d_residual(const LineTau& tau, cplx eta, double nu);
// Same at the zero of tau(., nu) closest to x_guess, tau from LineTau::discrete.
double f2d_residual(const CVector& U, const CVector& V, const CVector& Z, const PeriodMatrix& B, double nu,
                    cplx x_guess = 0.0);

// u(x, nu) = tau(x, nu+1) tau(x, nu-1) / (tau(x-1, nu) tau(x+1, nu)).
using DiscretePotential = std::function<cplx(cplx x, double nu)>;
DiscretePotential discrete_potential(const LineTau& tau);

// xi_s(x0 + k, nu0 + j) for |k| <= window; xi_0 = 1.
struct DiscreteSeries {
  cplx x0{0.0, 0.0};
  double nu0 = 0.0;
  int window = 32;
  std::map<std::array<int, 3>, cplx> xi;        // key (s, k, j)
  std::vector<std::array<int, 3>> near_poles;  // (s+1, k, j) where |u| > 1e8
  // WindowExhausted if the value is not stored.
  cplx at(int s, int k, int j) const;
  bool has(int s, int k, int j) const;
};

// Fills xi_{s+1}(x0 + k, nu0 + j) for all |k| <= window from seeds at k = 0
// and k = 1 by xi_{s+1}(x+1) = xi_{s+1}(x-1) - u(x, nu) xi_s(x, nu-1).
// WindowExhausted when xi_s at level j - 1 is missing where needed.
void discrete_series_extend(DiscreteSeries& table, const DiscretePotential& u, int s, int j,
                            cplx seed_even, cplx seed_odd);

// max |xi_{s+1}(x-1) - xi_{s+1}(x+1) - u(x) xi_s(x, nu-1)| / (sum of moduli + floor)
// over interior points of level j.
double discrete_recursion_defect(const DiscreteSeries& table, const DiscretePotential& u, int s, int j);

// The residue r_{s+1} at a zero eta of tau(., nu) from the no-pole condition at
// eta+1 (r_plus) and from the condition at eta-1 (r_minus, sign included).
struct ResidueCheck {
  cplx r_plus;
  cplx r_minus;
  double defect;  // |r_plus - r_minus| / (|r_plus| + |r_minus| + floor)
};
ResidueCheck residue_consistency(const LineTau& tau, cplx eta, double nu, cplx xi_plus, cplx xi_minus);

// ---- periodic semidiscrete series ----

// Levels xi_s(x0 + k, t0 + (i-2) h), k in Z/N, i = 0..4 of
// (T - 1) xi_{s+1} = xi_s' + u xi_s, with u, v exactly N-periodic in x.
struct PeriodicSeries {
  LineTau tau;
  int N = 0;
  cplx x0{0.0, 0.0};
  double t0 = 0.0;
  double h = 0.0;
  std::vector<CVector> u;   // per stencil node
  std::vector<CVector> v;
  // xi[s][i], xi_dot[s][i]; xi_dot[s] is filled once level s+1 is built.
  std::vector<std::vector<CVector>> xi;
  std::vector<std::vector<CVector>> xi_dot;
  std::vector<std::vector<cplx>> c;      // normalization constant added to level s, per node
  std::vector<std::vector<cplx>> c_dot;
  std::vector<double> defect;  // max_i |sum_x rhs| for the step s -> s+1

  double node(int i) const { return t0 + (i - 2) * h; }
  int levels() const { return static_cast<int>(xi.size()); }
};

// Level 0 (xi_0 = 1) and the u, v tables. NonPeriodic if
// max |u(x+N) - u(x)| > 1e-10 on the stencil.
PeriodicSeries make_periodic_series(const LineTau& tau, int N, cplx x0, double t0, double h);

// Builds the next level. With cancel_mean, the constant c_s added to level s
// solves N c_s' = -sum_x (xi_s' + u xi_s), integrated on the stencil from
// c_s(t0) = 0, so the prefix-sum solution closes up periodically.
void semidiscrete_series_extend(PeriodicSeries& table, bool cancel_mean = true);

// Max relative defect of (T - 1) xi_{s+1} = xi_s' + u xi_s over x and nodes,
// using the stored derivatives.
double periodic_recursion_defect(const PeriodicSeries& table, int s);

// Columns t, i, re/im x_i, re/im xdot_i.
void write_trajectory_csv(const RSTrajectory& traj, std::ostream& out);
// Columns t, re/im eta, re/im v0.
void write_zero_path_csv(const ZeroPath& path, std::ostream& out);

}  // namespace theta_secant
