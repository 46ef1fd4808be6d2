#include "quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <gsl/gsl_integration.h>

namespace theta_secant::detail {

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<GaussLegendre>();
    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
    slot->nodes.resize(n);
    slot->weights.resize(n);
    for (int i = 0; i < n; ++i)
      gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &slot->nodes[i], &slot->weights[i], table);
    gsl_integration_glfixed_table_free(table);
    // GSL's tables for n >= 2048 carry ~1e-9 errors; two Newton steps on the
    // Legendre recurrence restore full precision.
    for (int i = 0; i < n; ++i) {
      double x = slot->nodes[i];
      double dp = 1.0;
      for (int it = 0; it < 2; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        x -= p1 / dp;
      }
      slot->nodes[i] = x;
      slot->weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
  return *slot;
}

}  // namespace theta_secant::detail
