#include "msol/trigpoly.hpp"

#include <algorithm>
#include <cmath>

#include "msol/common.hpp"

namespace msol {

std::size_t TrigPoly::max_frequency() const noexcept {
  std::size_t k = std::max(cos_coeffs.size(), sin_coeffs.size());
  while (k > 0) {
    const double a = k <= cos_coeffs.size() ? cos_coeffs[k - 1] : 0.0;
    const double b = k <= sin_coeffs.size() ? sin_coeffs[k - 1] : 0.0;
    if (a != 0.0 || b != 0.0) break;
    --k;
  }
  return k;
}

double TrigPoly::operator()(double x) const noexcept {
  double s = constant;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k)
    s += cos_coeffs[k] * std::cos(kTwoPi * static_cast<double>(k + 1) * x);
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k)
    s += sin_coeffs[k] * std::sin(kTwoPi * static_cast<double>(k + 1) * x);
  return s;
}

double TrigPoly::derivative(double x) const noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k + 1);
    s -= cos_coeffs[k] * w * std::sin(w * x);
  }
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k + 1);
    s += sin_coeffs[k] * w * std::cos(w * x);
  }
  return s;
}

double TrigPoly::second_derivative(double x) const noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k + 1);
    s -= cos_coeffs[k] * w * w * std::cos(w * x);
  }
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k + 1);
    s -= sin_coeffs[k] * w * w * std::sin(w * x);
  }
  return s;
}

double TrigPoly::integrate(double a, double b) const noexcept {
  double s = constant * (b - a);
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k + 1);
    s += cos_coeffs[k] * (std::sin(w * b) - std::sin(w * a)) / w;
  }
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k + 1);
    s -= sin_coeffs[k] * (std::cos(w * b) - std::cos(w * a)) / w;
  }
  return s;
}

TrigPoly TrigPoly::scaled(double s) const {
  TrigPoly out = *this;
  out.constant *= s;
  for (double& a : out.cos_coeffs) a *= s;
  for (double& b : out.sin_coeffs) b *= s;
  return out;
}

TrigPoly TrigPoly::plus(const TrigPoly& other) const {
  TrigPoly out = *this;
  out.constant += other.constant;
  if (out.cos_coeffs.size() < other.cos_coeffs.size()) out.cos_coeffs.resize(other.cos_coeffs.size(), 0.0);
  if (out.sin_coeffs.size() < other.sin_coeffs.size()) out.sin_coeffs.resize(other.sin_coeffs.size(), 0.0);
  for (std::size_t k = 0; k < other.cos_coeffs.size(); ++k) out.cos_coeffs[k] += other.cos_coeffs[k];
  for (std::size_t k = 0; k < other.sin_coeffs.size(); ++k) out.sin_coeffs[k] += other.sin_coeffs[k];
  return out;
}

TrigPoly TrigPoly::shifted(double shift) const {
  // a cos(w(x-s)) + b sin(w(x-s)) = (a cos ws - b sin ws) cos wx + (a sin ws + b cos ws) sin wx
  const std::size_t K = std::max(cos_coeffs.size(), sin_coeffs.size());
  TrigPoly out{constant, std::vector<double>(K, 0.0), std::vector<double>(K, 0.0)};
  for (std::size_t k = 0; k < K; ++k) {
    const double a = k < cos_coeffs.size() ? cos_coeffs[k] : 0.0;
    const double b = k < sin_coeffs.size() ? sin_coeffs[k] : 0.0;
    const double ws = kTwoPi * static_cast<double>(k + 1) * shift;
    const double c = std::cos(ws), s = std::sin(ws);
    out.cos_coeffs[k] = a * c - b * s;
    out.sin_coeffs[k] = a * s + b * c;
  }
  return out;
}

bool TrigPoly::is_constant() const noexcept { return max_frequency() == 0; }

TrigPolyMin trig_minimum(const TrigPoly& p, std::size_t grid, double tol) {
  if (p.is_constant()) return {p.constant, 0.0};
  grid = std::max<std::size_t>(grid, 8);
  std::vector<double> vals(grid);
  for (std::size_t i = 0; i < grid; ++i) vals[i] = p(static_cast<double>(i) / static_cast<double>(grid));

  TrigPolyMin best{vals[0], 0.0};
  const double h = 1.0 / static_cast<double>(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double prev = vals[(i + grid - 1) % grid];
    const double next = vals[(i + 1) % grid];
    if (vals[i] > prev || vals[i] > next) continue;
    // Newton on p' from the local grid minimum, kept inside the bracket.
    double x = static_cast<double>(i) * h;
    const double lo = x - h, hi = x + h;
    for (int it = 0; it < 50; ++it) {
      const double d1 = p.derivative(x);
      const double d2 = p.second_derivative(x);
      if (d2 <= 0.0) break;
      double step = d1 / d2;
      double xn = x - step;
      if (xn < lo || xn > hi) xn = std::clamp(xn, lo, hi);
      const bool done = std::fabs(xn - x) < tol;
      x = xn;
      if (done) break;
    }
    double v = p(x);
    if (v > vals[i]) {
      v = vals[i];
      x = static_cast<double>(i) * h;
    }
    if (v < best.value) best = {v, wrap01(x)};
  }
  return best;
}

double trig_grid_min(const TrigPoly& p) {
  const std::size_t n = std::max<std::size_t>(4, 4 * p.max_frequency());
  double m = p(0.0);
  for (std::size_t i = 1; i < n; ++i) m = std::min(m, p(static_cast<double>(i) / static_cast<double>(n)));
  return m;
}

}  // namespace msol
