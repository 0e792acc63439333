#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "msol/smeasure.hpp"
#include "msol/solenoid.hpp"

namespace msol {

inline constexpr int kFrequencyCap = 64;

enum class Phase { Cos, Sin };

/// One trigonometric monomial c * trig(2 pi k.theta) dtheta_I. The frequency
/// vector is canonical (first nonzero entry positive), the index set is a
/// bitmask over 0-based coordinates.
struct FormKey {
  std::vector<int> k;
  std::uint32_t mask = 0;
  Phase phase = Phase::Cos;
  auto operator<=>(const FormKey&) const = default;
};

/// Differential form on the flat unit torus T^n with trigonometric
/// polynomial coefficients, kept symbolically.
class TorusForm {
 public:
  TorusForm(int n, int degree);

  static TorusForm zero(int n, int degree) { return TorusForm(n, degree); }
  static TorusForm constant(int n, double c);
  /// dtheta_i, i 1-based.
  static TorusForm dtheta(int n, int i);

  int dim() const noexcept { return n_; }
  int degree() const noexcept { return degree_; }
  const std::map<FormKey, double>& terms() const noexcept { return terms_; }

  /// Adds c * trig(2 pi k.theta) dtheta_{I[0]} ^ ... with 1-based indices in
  /// any order (sign of the sorting permutation applied, repeats give 0).
  TorusForm& add_term(std::vector<int> k, std::vector<int> indices, Phase phase, double c);

  TorusForm plus(const TorusForm& other) const;
  TorusForm scaled(double c) const;

  /// Coefficient of dtheta_I (mask) at theta.
  double component(std::uint32_t mask, const double* theta) const;
  double component(std::uint32_t mask, const std::vector<double>& theta) const { return component(mask, theta.data()); }
  /// Value of a 0-form.
  double value(const std::vector<double>& theta) const { return component(0u, theta); }

  int max_frequency() const noexcept;
  double max_abs_coefficient() const noexcept;
  bool is_zero(double tol = 0.0) const noexcept;

 private:
  void add_canonical(FormKey key, double c);

  int n_;
  int degree_;
  std::map<FormKey, double> terms_;
};

/// Flattened copy of one or more forms on the same torus for repeated
/// pointwise evaluation: one sincos per axis, then powers of e^{2 pi i theta_j}.
class FormEvaluator {
 public:
  explicit FormEvaluator(const TorusForm& w);
  explicit FormEvaluator(const std::vector<TorusForm>& forms);

  int dim() const noexcept { return n_; }
  /// Number of values evaluate() writes: each form's components in
  /// masks_of_degree order, forms concatenated.
  std::size_t size() const noexcept { return size_; }
  void evaluate(const double* theta, double* out) const;

 private:
  void add(const TorusForm& w);

  int n_ = 0;
  std::size_t size_ = 0;
  std::vector<int> k_;  // n entries per term
  std::vector<std::size_t> out_;
  std::vector<char> sin_;
  std::vector<double> c_;
  std::vector<int> kmax_;
};

/// Exterior derivative. Throws DomainError when degree == n.
TorusForm d(const TorusForm& w);
/// Graded product. Throws DomainError when the degrees overflow n.
TorusForm wedge(const TorusForm& a, const TorusForm& b);
/// Integral of a top-degree form over the unit torus.
double integrate_torus(const TorusForm& w);

/// Bitmask helpers for ordered index sets.
std::vector<int> mask_indices(std::uint32_t mask);
int mask_size(std::uint32_t mask);
std::vector<std::uint32_t> masks_of_degree(int n, int degree);

/// Seeded random form: `terms` monomials, frequencies in [-cap, cap],
/// coefficients uniform in [-1, 1].
TorusForm random_torus_form(int n, int degree, int cap, std::size_t terms, std::uint64_t seed);

/// Form on the leaves of a suspension, a(x, t) or a(x, t) dt.
struct LeafwiseForm {
  int degree = 1;
  std::function<double(const TransversalPoint&, double)> a;
  /// Bound on the t-frequency of a, used to size the quadrature.
  double t_frequency = 8.0;
};

/// Leafwise d of a 0-form given its t-derivative.
LeafwiseForm leafwise_d(std::function<double(const TransversalPoint&, double)> a_t, double t_frequency);

/// Largest |a(x,1) - a(f(x),0)| over sample points.
double gluing_defect(const SuspensionSolenoid& sol, const LeafwiseForm& phi, std::size_t samples = 16);

/// Integral of a leafwise 1-form against the fundamental class:
/// int_X (int_0^1 a(x,t) dt) dmu_T(x). Throws DomainError if the form is
/// not a 1-form or its gluing defect exceeds 1e-9.
double integrate_leafwise(const SuspensionSolenoid& sol, const TransversalMeasureInv& m, const LeafwiseForm& phi);

/// Transversal quadrature for X: weighted points for a raw measure (exact
/// cylinder and point sums, atoms, and two Gauss nodes on each of `bins`
/// circle bins).
struct WeightedPoint {
  TransversalPoint x;
  double w;
};
std::vector<WeightedPoint> transversal_quadrature(const TransversalSpace& space, const RawTransversalMeasure& m,
                                                  std::size_t bins = 1024);

}  // namespace msol
