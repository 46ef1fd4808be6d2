#pragma once

#include <vector>

namespace theta_secant::detail {

// Gauss-Legendre rule on [-1, 1]; tables are built once per node count.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussLegendre& gauss_legendre(int n);

inline constexpr int kFirstNodes = 16;
inline constexpr int kMaxNodes = 1 << 13;

}  // namespace theta_secant::detail
