#include "theta_secant/roots.hpp"

#include <cmath>

namespace theta_secant {

namespace {

double phase_step(cplx a, cplx b) {
  // arg(b / a) in (-pi, pi].
  return std::arg(b * std::conj(a));
}

double edge_phase(const LineFunction& f, cplx a, cplx fa, cplx b, cplx fb, int depth) {
  double d = phase_step(fa, fb);
  if (std::abs(d) < kPi / 4 || depth >= 16) return d;
  cplx m = 0.5 * (a + b);
  cplx fm = f(m).value;
  return edge_phase(f, a, fa, m, fm, depth + 1) + edge_phase(f, m, fm, b, fb, depth + 1);
}

}  // namespace

int winding_number(const LineFunction& f, cplx lo, cplx hi) {
  const cplx corners[4] = {lo, cplx(hi.real(), lo.imag()), hi, cplx(lo.real(), hi.imag())};
  cplx vals[4];
  for (int i = 0; i < 4; ++i) vals[i] = f(corners[i]).value;
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    int j = (i + 1) % 4;
    total += edge_phase(f, corners[i], vals[i], corners[j], vals[j], 0);
  }
  return static_cast<int>(std::lround(total / (2 * kPi)));
}

bool newton_refine(const LineFunction& f, cplx& s, double reach, int max_iter) {
  const cplx s0 = s;
  for (int it = 0; it < max_iter; ++it) {
    LineSample v = f(s);
    if (v.value == cplx(0.0)) return true;
    if (v.slope == cplx(0.0)) return false;
    cplx step = v.value / v.slope;
    // Keep the early steps inside the search region.
    if (std::abs(step) > reach) step *= reach / std::abs(step);
    s -= step;
    if (std::abs(s - s0) > 2 * reach) return false;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(s))) return true;
  }
  LineSample v = f(s);
  return v.slope != cplx(0.0) && std::abs(v.value / v.slope) <= 1e-12 * (1.0 + std::abs(s));
}

std::vector<cplx> line_roots(const LineFunction& f, const RootSearchBox& box) {
  std::vector<cplx> roots;
  const double h = 2 * box.half_width / box.cells;
  const cplx origin = box.center - cplx(box.half_width, box.half_width);
  for (int i = 0; i < box.cells; ++i) {
    for (int j = 0; j < box.cells; ++j) {
      cplx lo = origin + cplx(i * h, j * h);
      cplx hi = lo + cplx(h, h);
      if (winding_number(f, lo, hi) <= 0) continue;
      cplx s = 0.5 * (lo + hi);
      if (!newton_refine(f, s, h)) continue;
      bool seen = false;
      for (cplx r : roots) seen = seen || std::abs(r - s) < 1e-9;
      if (!seen) roots.push_back(s);
    }
  }
  return roots;
}

}  // namespace theta_secant
