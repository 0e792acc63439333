#pragma once

#include <cstddef>
#include <vector>

#include "msol/common.hpp"

namespace msol {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (cached for n <= 64).
const GaussRule& gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre over [a, b] with equal panels.
template <class F>
double composite_gauss(F&& f, double a, double b, std::size_t panels, std::size_t nodes = 16) {
  const GaussRule& g = gauss_legendre(nodes);
  const double h = (b - a) / static_cast<double>(panels);
  CompensatedSum s;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * h;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s.add(0.5 * h * g.weights[i] * f(mid + 0.5 * h * g.nodes[i]));
  }
  return s.value();
}

/// Panels needed for 16-node panels to integrate a trigonometric integrand
/// of the given frequency over a unit interval to near machine precision.
std::size_t panels_for_frequency(double frequency);

}  // namespace msol
