#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "msol/trigpoly.hpp"

namespace msol {

enum class TransversalKind { Finite, Circle, CantorPAdic };

std::string to_string(TransversalKind kind);

/// A point of a transversal. Which field is meaningful depends on the space:
/// circle points are stored as a 64-bit fraction of a full turn so that
/// rotations form an exact group; finite points by index; p-adic points by
/// their digit string (a_0 first, least significant).
struct TransversalPoint {
  std::uint64_t turns = 0;
  std::size_t index = 0;
  std::vector<int> digits;

  static TransversalPoint on_circle(double x);
  static TransversalPoint from_turns(std::uint64_t turns) { return {turns, 0, {}}; }
  static TransversalPoint finite(std::size_t index) { return {0, index, {}}; }
  static TransversalPoint cantor(std::vector<int> digits) { return {0, 0, std::move(digits)}; }

  /// turns / 2^64, in [0, 1).
  double circle_coordinate() const noexcept;

  bool operator==(const TransversalPoint&) const = default;
};

std::uint64_t turns_from_coordinate(double x) noexcept;
double coordinate_from_turns(std::uint64_t turns) noexcept;

/// The transversal K(U) of a flow-box: a finite set of reals in [0,1), the
/// circle R/Z, or the p-adic integers truncated at a fixed depth.
class TransversalSpace {
 public:
  static TransversalSpace finite(std::vector<double> points);
  static TransversalSpace circle();
  static TransversalSpace cantor(int p, int depth);

  TransversalKind kind() const noexcept { return kind_; }
  const std::vector<double>& points() const noexcept { return points_; }
  int base() const noexcept { return base_; }
  int depth() const noexcept { return depth_; }
  /// p^depth for Cantor spaces, the number of points for finite ones.
  std::size_t cell_count() const noexcept;

  /// Throws DomainError if pt is not a point of this space.
  void check_point(const TransversalPoint& pt) const;

  bool operator==(const TransversalSpace&) const = default;

 private:
  TransversalKind kind_ = TransversalKind::Circle;
  std::vector<double> points_;
  int base_ = 0;
  int depth_ = 0;
};

// Cylinder bookkeeping for p-adic spaces. The cylinder index of a digit
// string is sum a_i p^i, so the lexicographic table order has a_0 fastest.
std::size_t cylinder_index(int p, const std::vector<int>& digits);
std::vector<int> cylinder_digits(int p, int depth, std::size_t index);
std::size_t int_pow(std::size_t base, int exp);

/// Real embedding of a transversal point. Identity on circle and finite
/// coordinates; for p-adic digits x = sum_i a_i * 2 * (2p-1)^-(i+1), which
/// sends distinct cylinders to disjoint intervals inside [0,1].
double embed_point(const TransversalSpace& space, const TransversalPoint& pt);

/// Closed interval [lo, hi] containing the embedded image of a cylinder
/// given by its prefix digits.
struct Interval {
  double lo;
  double hi;
};
Interval embed_cylinder(int p, const std::vector<int>& prefix);

enum class TransversalClass { FiniteSet, UnionOfCircles, CantorSet };
std::string to_string(TransversalClass c);

struct TransversalClassification {
  TransversalClass transversal;
  std::string solenoid_type;
};

/// Trichotomy for minimal 1-solenoids with a
/// 1-dimensional transversal.
TransversalClassification classify_transversal(const TransversalSpace& space);

/// Region of a transversal. Circle: [lo, hi) (hi - lo <= 1, may extend past
/// the ends, read mod 1). Cantor: all points with the given digit prefix.
/// Finite: an explicit set of point indices.
struct TransversalCell {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<int> prefix;
  std::vector<std::size_t> point_indices;

  static TransversalCell interval(double lo, double hi) { return {lo, hi, {}, {}}; }
  static TransversalCell cylinder(std::vector<int> prefix) { return {0.0, 1.0, std::move(prefix), {}}; }
  static TransversalCell points(std::vector<std::size_t> idx) { return {0.0, 1.0, {}, std::move(idx)}; }
};

/// Equal-size partition at the given level: 2^level intervals on the circle,
/// p^level cylinders on a Cantor space, and for finite spaces the points
/// grouped by the 2^level dyadic intervals (empty groups dropped).
std::vector<TransversalCell> uniform_cells(const TransversalSpace& space, int level);

struct CircleAtom {
  double x;
  double mass;
};

/// Nonnegative measure on a transversal, before any invariance check.
/// Finite: weights per point. Circle: trigonometric density, optional
/// piecewise-constant histogram density on uniform bins, and atoms.
/// Cantor: weights per depth-d cylinder in cylinder_index order.
struct RawTransversalMeasure {
  TransversalKind kind = TransversalKind::Circle;
  std::vector<double> weights;
  TrigPoly density;
  std::vector<double> histogram;
  std::vector<CircleAtom> atoms;

  static RawTransversalMeasure finite_weights(std::vector<double> w);
  static RawTransversalMeasure circle(TrigPoly density, std::vector<CircleAtom> atoms = {});
  static RawTransversalMeasure circle_histogram(std::vector<double> bin_masses);
  static RawTransversalMeasure lebesgue() { return circle(TrigPoly::constant_poly(1.0)); }
  static RawTransversalMeasure cylinder_weights(std::vector<double> w);
  /// Uniform p^-d weights on a Cantor space.
  static RawTransversalMeasure haar(const TransversalSpace& space);

  RawTransversalMeasure scaled(double c) const;
  RawTransversalMeasure plus(const RawTransversalMeasure& other) const;
};

/// Checks the measure against the space: sizes, signs, density
/// nonnegativity on a 4K grid, atom positions. Throws DomainError.
void validate_measure(const TransversalSpace& space, const RawTransversalMeasure& m, std::size_t max_frequency = 64);

double total_mass(const RawTransversalMeasure& m);

/// Mass of a circle interval [lo, hi) read mod 1, hi - lo in [0, 1].
double circle_interval_mass(const RawTransversalMeasure& m, double lo, double hi);

double cell_mass(const TransversalSpace& space, const RawTransversalMeasure& m, const TransversalCell& cell);

/// Cylinder weights summed to the given level (level <= depth).
std::vector<double> coarsen_cylinder_weights(const TransversalSpace& space, const RawTransversalMeasure& m, int level);

}  // namespace msol
