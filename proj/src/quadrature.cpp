#include "msol/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

namespace msol {

namespace {

GaussRule build_rule(std::size_t n) {
  GaussRule g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                          static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    g.nodes[n - 1 - i] = x;
    g.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
  if (n < 1 || n > 64) throw DomainError("Gauss-Legendre rules are provided for 1..64 nodes");
  static std::array<GaussRule, 65> cache;
  static std::array<std::once_flag, 65> flags;
  std::call_once(flags[n], [n] { cache[n] = build_rule(n); });
  return cache[n];
}

std::size_t panels_for_frequency(double frequency) {
  // 16 nodes resolve about 1.25 periods per panel to ~1e-15.
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::fabs(frequency) / 1.25)));
}

}  // namespace msol
