#pragma once

#include <functional>
#include <vector>

#include "theta_secant/linalg.hpp"

namespace theta_secant {

// Value and derivative of a holomorphic function of one variable, both
// multiplied by the same positive factor exp(-logscale).
struct LineSample {
  cplx value;
  cplx slope;
  double logscale = 0.0;
};

using LineFunction = std::function<LineSample(cplx)>;

struct RootSearchBox {
  cplx center;
  double half_width = 0.5;
  int cells = 8;  // per side
};

// Winding number of f around the boundary of [lo.re, hi.re] x [lo.im, hi.im],
// with edges subdivided until consecutive phase jumps are below pi/4.
int winding_number(const LineFunction& f, cplx lo, cplx hi);

// Newton iteration from s0. Returns false if it does not settle within
// max_iter steps or leaves the disk |s - s0| <= reach.
bool newton_refine(const LineFunction& f, cplx& s, double reach, int max_iter = 60);

// Roots of f inside the box: argument principle on each cell, Newton from the
// cell centre for cells with nonzero winding. Roots closer than 1e-9 are merged.
std::vector<cplx> line_roots(const LineFunction& f, const RootSearchBox& box);

}  // namespace theta_secant
