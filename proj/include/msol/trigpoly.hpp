#pragma once

#include <cstddef>
#include <vector>

namespace msol {

/// Real trigonometric polynomial on the unit circle:
///   p(x) = c + sum_{k>=1} a_k cos(2 pi k x) + b_k sin(2 pi k x).
/// cos_coeffs[k-1] = a_k, sin_coeffs[k-1] = b_k.
struct TrigPoly {
  double constant = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  static TrigPoly constant_poly(double c) { return TrigPoly{c, {}, {}}; }

  std::size_t max_frequency() const noexcept;
  double operator()(double x) const noexcept;
  double derivative(double x) const noexcept;
  double second_derivative(double x) const noexcept;

  /// Exact integral over [a, b] (a <= b, any reals; periodic extension).
  double integrate(double a, double b) const noexcept;
  /// Mean over one period.
  double mean() const noexcept { return constant; }

  TrigPoly scaled(double s) const;
  TrigPoly plus(const TrigPoly& other) const;
  /// x -> p(x - shift).
  TrigPoly shifted(double shift) const;
  bool is_constant() const noexcept;
};

/// Global minimum of p over [0,1): dense grid scan followed by Newton
/// refinement on p' around the best grid points.
struct TrigPolyMin {
  double value;
  double argmin;
};
TrigPolyMin trig_minimum(const TrigPoly& p, std::size_t grid = 4096, double tol = 1e-10);

/// Smallest sampled value on a uniform grid of max(4, 4*K) points, K the
/// maximal frequency.
double trig_grid_min(const TrigPoly& p);

}  // namespace msol
