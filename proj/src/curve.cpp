#include "theta_secant/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "quadrature.hpp"
#include "theta_secant/errors.hpp"

namespace theta_secant {

namespace {

constexpr double kClearance = 1e-3;   // min distance of a path from branch points
constexpr double kBranchGuard = 1e-10;
constexpr double kQuadTol = 1e-10;

cplx product_poly(const std::vector<cplx>& roots, cplx x) {
  cplx p = 1.0;
  for (cplx e : roots) p *= x - e;
  return p;
}

cplx principal_y(const std::vector<cplx>& roots, cplx x) { return std::sqrt(product_poly(roots, x)); }

cplx nearest_sign(cplx candidate, cplx previous) {
  return std::abs(candidate - previous) <= std::abs(candidate + previous) ? candidate : -candidate;
}

double point_segment_distance(cplx e, cplx a, cplx b) {
  cplx d = b - a;
  double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(e - a);
  double t = std::clamp(((e - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(e - (a + t * d));
}

// Continue a branch of sqrt(f(x)) from (x_from, v_from) along the straight
// segment to x_to, in steps small against the distance to the nearest zero
// of f (listed in zeros).
template <class F>
cplx continue_branch(const F& f, const std::vector<cplx>& zeros, cplx x_from, cplx v_from, cplx x_to) {
  double clear = std::numeric_limits<double>::infinity();
  for (cplx e : zeros) clear = std::min(clear, point_segment_distance(e, x_from, x_to));
  double len = std::abs(x_to - x_from);
  if (len == 0.0) return v_from;
  int steps = clear > 0.0 ? static_cast<int>(std::ceil(len / (0.2 * clear))) : 100000;
  steps = std::clamp(steps, 1, 100000);
  cplx v = v_from;
  for (int i = 1; i <= steps; ++i) {
    cplx x = x_from + (x_to - x_from) * (static_cast<double>(i) / steps);
    v = nearest_sign(std::sqrt(f(x)), v);
  }
  return v;
}

cplx continue_y(const std::vector<cplx>& roots, cplx x_from, cplx y_from, cplx x_to) {
  return continue_branch([&](cplx x) { return product_poly(roots, x); }, roots, x_from, y_from, x_to);
}

// Descending node order so tracking can march from the far end of a segment.
std::vector<int> descending(const detail::GaussLegendre& rule) {
  std::vector<int> idx(rule.nodes.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return rule.nodes[a] > rule.nodes[b]; });
  return idx;
}

// Split [0, 1] into panels, each no longer than twice the distance from its
// image segment [pos(t0), pos(t1)] to the nearest zero. Gauss-Legendre on
// each panel then converges at a rate independent of how close the path
// passes to a branch point.
template <class Pos>
std::vector<std::pair<double, double>> graded_panels(const Pos& pos, const std::vector<cplx>& zeros) {
  std::vector<std::pair<double, double>> out;
  std::vector<std::pair<double, double>> todo{{0.0, 1.0}};
  while (!todo.empty()) {
    auto [t0, t1] = todo.back();
    todo.pop_back();
    cplx x0 = pos(t0), x1 = pos(t1);
    double clear = std::numeric_limits<double>::infinity();
    for (cplx e : zeros) clear = std::min(clear, point_segment_distance(e, x0, x1));
    if (std::abs(x1 - x0) > 2.0 * clear && t1 - t0 > 1e-6) {
      double mid = 0.5 * (t0 + t1);
      todo.push_back({t0, mid});
      todo.push_back({mid, t1});
    } else {
      out.push_back({t0, t1});
    }
  }
  // Descending order: the integration marches from the far end.
  std::sort(out.begin(), out.end(), [](const auto& p, const auto& q) { return p.first > q.first; });
  return out;
}

// One edge of the branch-point chain [a, b]. Along it
//   y = (b - a) i sqrt(s (1 - s)) R(x),  x = a + (b - a) s,
// where R is the branch of sqrt(prod_{others}(x - e)) that is continuous on
// the edge. With s = (1 - cos phi)/2 the integral of f dx/y becomes the
// smooth integral of f / (i R) over phi in [0, pi].
struct ChainEdge {
  cplx a, b;
  std::vector<cplx> others;

  cplx R(cplx x) const {
    cplx mid = 0.5 * (a + b);
    cplx r = 1.0;
    for (cplx e : others) {
      cplx d = mid - e;
      r *= std::sqrt((x - e) / d) * std::sqrt(d);
    }
    return r;
  }
  cplx y(cplx x) const {
    cplx s = (x - a) / (b - a);
    return (b - a) * kI * std::sqrt(s * (1.0 - s)) * R(x);
  }
  Eigen::Vector2cd integral() const {
    Eigen::Vector2cd prev = Eigen::Vector2cd::Zero();
    for (int n = detail::kFirstNodes; n <= detail::kMaxNodes; n *= 2) {
      const auto& rule = detail::gauss_legendre(n);
      Eigen::Vector2cd sum = Eigen::Vector2cd::Zero();
      for (int i = 0; i < n; ++i) {
        double phi = 0.5 * kPi * (rule.nodes[i] + 1.0);
        double w = 0.5 * kPi * rule.weights[i];
        cplx x = a + (b - a) * (0.5 * (1.0 - std::cos(phi)));
        cplx f = w / (kI * R(x));
        sum[0] += f;
        sum[1] += f * x;
      }
      if (n > detail::kFirstNodes && (sum - prev).cwiseAbs().maxCoeff() < kQuadTol) return sum;
      prev = sum;
    }
    fail(ErrorKind::QuadratureStall, "period integral did not converge with 8192 nodes");
  }
};

ChainEdge make_edge(const std::vector<cplx>& roots, int k) {
  ChainEdge e{roots[k], roots[k + 1], {}};
  for (int j = 0; j < static_cast<int>(roots.size()); ++j)
    if (j != k && j != k + 1) e.others.push_back(roots[j]);
  return e;
}

// Relative sign between the y branches of consecutive chain edges, found by
// carrying y from edge `in` half way around their shared branch point
// (clockwise, at radius rho) onto edge `out`.
int relative_sign(const std::vector<cplx>& roots, const ChainEdge& in, const ChainEdge& out) {
  const cplx centre = in.b;
  double rho = 0.05;
  for (cplx e : roots)
    if (e != centre) rho = std::min(rho, 0.25 * std::abs(e - centre));
  cplx din = (in.b - in.a) / std::abs(in.b - in.a);
  cplx dout = (out.b - out.a) / std::abs(out.b - out.a);
  double ang0 = std::arg(-din);
  double ang1 = std::arg(dout);
  double sweep = std::fmod(ang0 - ang1, 2.0 * kPi);
  if (sweep < 0) sweep += 2.0 * kPi;
  const int steps = 2000;
  cplx y = in.y(centre - rho * din);
  for (int i = 1; i <= steps; ++i) {
    double ang = ang0 - sweep * i / steps;
    y = nearest_sign(principal_y(roots, centre + rho * std::polar(1.0, ang)), y);
  }
  cplx target = out.y(centre + rho * dout);
  return std::abs(y - target) <= std::abs(y + target) ? 1 : -1;
}

bool segment_clear(const std::vector<cplx>& roots, cplx a, cplx b, cplx skip, bool use_skip) {
  for (cplx e : roots) {
    if (use_skip && e == skip) continue;
    if (point_segment_distance(e, a, b) < kClearance) return false;
  }
  return true;
}

void require_hyperelliptic(const AbelData& data) {
  if (data.curve.kind != CurveKind::Hyperelliptic2)
    fail(ErrorKind::InvalidInput, "operation needs a hyperelliptic curve");
}

}  // namespace

CurveSpec CurveSpec::genus1(cplx tau) {
  CurveSpec c;
  c.kind = CurveKind::Genus1;
  c.tau = tau;
  return c;
}

CurveSpec CurveSpec::hyperelliptic(std::vector<cplx> ascending_coeffs) {
  CurveSpec c;
  c.kind = CurveKind::Hyperelliptic2;
  c.poly = std::move(ascending_coeffs);
  return c;
}

CurvePoint CurvePoint::torus(cplx z) {
  CurvePoint p;
  p.z = z;
  return p;
}

CurvePoint CurvePoint::affine(cplx x, int sheet) {
  if (sheet != 1 && sheet != -1) fail(ErrorKind::InvalidInput, "sheet must be +1 or -1");
  CurvePoint p;
  p.x = x;
  p.sheet = sheet;
  return p;
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) fail(ErrorKind::InvalidInput, "polynomial must have positive degree");
  if (std::abs(c[n] - 1.0) > 1e-14) fail(ErrorKind::InvalidInput, "polynomial must be monic");
  CMatrix companion = CMatrix::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[i];
  Eigen::ComplexEigenSolver<CMatrix> solver(companion, false);
  if (solver.info() != Eigen::Success) fail(ErrorKind::DegenerateCurve, "root finder failed");
  std::vector<cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  auto eval = [&](cplx x, cplx* dp) {
    cplx p = 0.0, d = 0.0;
    for (int k = n; k >= 0; --k) {
      d = d * x + p;
      p = p * x + c[k];
    }
    *dp = d;
    return p;
  };
  for (cplx& r : roots) {
    for (int it = 0; it < 3; ++it) {
      cplx dp;
      cplx p = eval(r, &dp);
      if (dp == cplx(0.0)) break;
      cplx cand = r - p / dp;
      cplx dummy;
      if (std::abs(eval(cand, &dummy)) < std::abs(p)) r = cand; else break;
    }
  }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    double tol = 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
    if (std::abs(a.real() - b.real()) > tol) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

AbelData build_abel_data(const CurveSpec& curve) {
  AbelData data;
  data.curve = curve;
  if (curve.kind == CurveKind::Genus1) {
    if (!(curve.tau.imag() > 0.0))
      fail(ErrorKind::NonPosDef, "PeriodMatrix: Im tau must be positive");
    CMatrix B(1, 1);
    B(0, 0) = curve.tau;
    data.B = PeriodMatrix(B);
    data.a_periods = CMatrix::Identity(1, 1);
    data.b_periods = B;
    data.normalization = CMatrix::Identity(1, 1);
    return data;
  }

  if (curve.poly.size() != 6) fail(ErrorKind::InvalidInput, "hyperelliptic model needs a degree-5 polynomial");
  for (cplx c : curve.poly)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      fail(ErrorKind::InvalidInput, "polynomial has non-finite coefficients");
  std::vector<cplx> roots = polynomial_roots(curve.poly);
  double scale = 1.0;
  for (cplx r : roots) scale = std::max(scale, 1.0 + std::abs(r));
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j)
      if (std::abs(roots[i] - roots[j]) <= 1e-6 * scale) {
        std::ostringstream os;
        os << "branch points " << roots[i] << " and " << roots[j] << " coincide (repeated root)";
        fail(ErrorKind::DegenerateCurve, os.str());
      }
  data.branch_points = roots;
  data.basepoint = roots[0];

  // Edge integrals over the chain e1-e2-e3-e4-e5 with consistent sheets.
  std::vector<Eigen::Vector2cd> periods;
  int sign = 1;
  for (int k = 0; k < 4; ++k) {
    ChainEdge edge = make_edge(roots, k);
    if (k > 0) sign *= relative_sign(roots, make_edge(roots, k - 1), edge);
    periods.push_back(2.0 * sign * edge.integral());
  }
  CMatrix A(2, 2), Bp(2, 2);
  A.col(0) = periods[0];
  A.col(1) = periods[2];
  Bp.col(0) = periods[1] + periods[3];
  Bp.col(1) = periods[3];
  Eigen::FullPivLU<CMatrix> lu(A);
  if (!lu.isInvertible()) fail(ErrorKind::DegenerateCurve, "a-period matrix is singular");
  CMatrix N = lu.inverse();
  CMatrix tau = N * Bp;
  RMatrix Y = tau.imag();
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(0.5 * (Y + Y.transpose()), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().maxCoeff() < 0.0) {
    // Opposite intersection orientation of the b-cycles.
    Bp = -Bp;
    tau = -tau;
  }
  data.symmetry_defect = (tau - tau.transpose()).cwiseAbs().maxCoeff();
  if (data.symmetry_defect > 1e-8) {
    std::ostringstream os;
    os << "computed period matrix violates the Riemann symmetry relation (defect " << data.symmetry_defect << ")";
    fail(ErrorKind::NonPosDef, os.str());
  }
  data.a_periods = A;
  data.b_periods = Bp;
  data.normalization = N;
  data.B = PeriodMatrix(0.5 * (tau + tau.transpose()));
  return data;
}

cplx curve_polynomial(const AbelData& data, cplx x) {
  require_hyperelliptic(data);
  return product_poly(data.branch_points, x);
}

cplx curve_y(const AbelData& data, const CurvePoint& P) {
  require_hyperelliptic(data);
  return static_cast<double>(P.sheet) * principal_y(data.branch_points, P.x);
}

CVector abel_map_along(const AbelData& data, const CurvePoint& P, const std::vector<cplx>& waypoints) {
  if (data.curve.kind == CurveKind::Genus1) {
    CVector r(1);
    r[0] = P.z;
    return r;
  }
  const auto& roots = data.branch_points;
  const cplx e0 = data.basepoint;
  if (std::abs(P.x - e0) < 1e-14) return CVector::Zero(2);

  std::vector<cplx> pts{e0};
  pts.insert(pts.end(), waypoints.begin(), waypoints.end());
  pts.push_back(P.x);
  for (size_t s = 0; s + 1 < pts.size(); ++s)
    if (!segment_clear(roots, pts[s], pts[s + 1], e0, s == 0))
      fail(ErrorKind::PathFailure, "path passes within 1e-3 of a branch point");

  std::vector<cplx> others(roots.begin(), roots.end());
  others.erase(std::find(others.begin(), others.end(), e0));
  const cplx yP = curve_y(data, P);
  Eigen::Vector2cd prev = Eigen::Vector2cd::Zero();
  for (int n = detail::kFirstNodes; n <= detail::kMaxNodes; n *= 2) {
    const auto& rule = detail::gauss_legendre(n);
    const std::vector<int> order = descending(rule);
    Eigen::Vector2cd sum = Eigen::Vector2cd::Zero();
    cplx y = yP;
    cplx x_prev = P.x;
    for (int s = static_cast<int>(pts.size()) - 2; s >= 0; --s) {
      const cplx a = pts[s], b = pts[s + 1];
      if (s == 0) {
        // x - e0 = (b - e0) u^2. Track Y = y / u = sqrt((b - e0) prod_{j>0}(x - e_j)),
        // which stays away from zero; forming x - e0 near u = 0 would lose
        // all relative precision.
        auto pos = [&](double u) { return a + (b - a) * (u * u); };
        auto f = [&](cplx x) { return (b - a) * product_poly(others, x); };
        cplx Y = y;  // u = 1 at the segment end
        for (const auto& [u0, u1] : graded_panels(pos, others))
          for (int i : order) {
            const double u = u0 + (u1 - u0) * 0.5 * (rule.nodes[i] + 1.0);
            const double w = 0.5 * (u1 - u0) * rule.weights[i];
            const cplx x = pos(u);
            Y = continue_branch(f, others, x_prev, Y, x);
            x_prev = x;
            const cplx fval = w * 2.0 * (b - a) / Y;
            sum[0] += fval;
            sum[1] += fval * x;
          }
        continue;
      }
      auto pos = [&](double t) { return a + (b - a) * t; };
      for (const auto& [t0, t1] : graded_panels(pos, roots))
        for (int i : order) {
          const double t = t0 + (t1 - t0) * 0.5 * (rule.nodes[i] + 1.0);
          const double w = 0.5 * (t1 - t0) * rule.weights[i];
          const cplx x = pos(t);
          y = continue_y(roots, x_prev, y, x);
          x_prev = x;
          const cplx fval = w * (b - a) / y;
          sum[0] += fval;
          sum[1] += fval * x;
        }
      y = continue_y(roots, x_prev, y, a);
      x_prev = a;
    }
    if (n > detail::kFirstNodes && (sum - prev).cwiseAbs().maxCoeff() < kQuadTol)
      return data.normalization * sum;
    prev = sum;
  }
  fail(ErrorKind::QuadratureStall, "Abel integral did not converge with 8192 nodes");
}

CVector abel_map(const AbelData& data, const CurvePoint& P) {
  if (data.curve.kind == CurveKind::Genus1) return abel_map_along(data, P, {});
  const auto& roots = data.branch_points;
  const cplx e0 = data.basepoint;
  if (std::abs(P.x - e0) < 1e-14) return CVector::Zero(2);
  if (segment_clear(roots, e0, P.x, e0, true)) return abel_map_along(data, P, {});
  static constexpr double offsets[] = {0.15, -0.15, 0.3, -0.3, 0.45, -0.45, 0.6, -0.6};
  for (double delta : offsets) {
    cplx mid = 0.5 * (e0 + P.x) + kI * (P.x - e0) * delta;
    if (segment_clear(roots, e0, mid, e0, true) && segment_clear(roots, mid, P.x, e0, false))
      return abel_map_along(data, P, {mid});
  }
  fail(ErrorKind::PathFailure, "no admissible detour found in 8 attempts");
}

CVector abel_tangent(const AbelData& data, const CurvePoint& P) {
  if (data.curve.kind == CurveKind::Genus1) return CVector::Ones(1);
  cplx p = curve_polynomial(data, P.x);
  if (std::abs(p) < kBranchGuard) fail(ErrorKind::BranchPoint, "point is (numerically) a branch point");
  cplx y = static_cast<double>(P.sheet) * std::sqrt(p);
  Eigen::Vector2cd w(1.0 / y, P.x / y);
  return data.normalization * w;
}

FayVectors fay_vectors(const AbelData& data, const CurvePoint& a, const CurvePoint& b,
                       const CurvePoint& c, const CurvePoint& d) {
  const CVector images[4] = {abel_map(data, a), abel_map(data, b), abel_map(data, c), abel_map(data, d)};
  const char* names = "abcd";
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (lattice_distance(images[i] - images[j], data.B) < 1e-8) {
        std::ostringstream os;
        os << "points " << names[i] << " and " << names[j] << " have coincident Abel images";
        fail(ErrorKind::CoincidentPoints, os.str());
      }
  return {images[2] - images[1], images[3] - images[1], images[0] - images[1]};
}

CurvePoint random_curve_point(const AbelData& data, Rng& rng) {
  if (data.curve.kind == CurveKind::Genus1) {
    double alpha = rng.uniform();
    double beta = rng.uniform();
    return CurvePoint::torus(alpha + beta * data.curve.tau);
  }
  for (int attempt = 0; attempt < 10000; ++attempt) {
    double re = rng.uniform(-1.2, 1.2);
    double im = rng.uniform(-1.2, 1.2);
    int sheet = (rng.next() >> 63) ? 1 : -1;
    cplx x(re, im);
    bool clear = true;
    for (cplx e : data.branch_points) clear = clear && std::abs(x - e) >= 0.1;
    if (clear) return CurvePoint::affine(x, sheet);
  }
  fail(ErrorKind::InvalidInput, "could not draw a point away from the branch points");
}

FayTuple random_fay_tuple(const AbelData& data, Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    FayTuple t;
    t.a = random_curve_point(data, rng);
    t.b = random_curve_point(data, rng);
    t.c = random_curve_point(data, rng);
    t.d = random_curve_point(data, rng);
    try {
      t.vectors = fay_vectors(data, t.a, t.b, t.c, t.d);
      return t;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::CoincidentPoints && e.kind() != ErrorKind::PathFailure) throw;
    }
  }
  fail(ErrorKind::PathFailure, "could not draw an admissible point tuple");
}

}  // namespace theta_secant
