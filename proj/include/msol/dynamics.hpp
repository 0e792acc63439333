#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msol/transversal.hpp"
#include "msol/trigpoly.hpp"

namespace msol {

enum class MapKind { Rotation, Odometer, CircleDiffeo, FinitePermutation };
std::string to_string(MapKind kind);

struct Rational {
  std::int64_t num;
  std::int64_t den;
};

/// Poincare return map of the base transversal, one of four built-in
/// families. CircleDiffeo is x -> x + a sin(2 pi m x) mod 1 with |2 pi m a| < 1.
struct ReturnMap {
  MapKind kind = MapKind::Rotation;
  double alpha = 0.0;
  std::uint64_t alpha_turns = 0;
  std::optional<Rational> declared_rational;
  int p = 2;
  double amplitude = 0.0;
  int frequency = 1;
  std::vector<std::size_t> sigma;

  static ReturnMap rotation(double alpha);
  /// Rotation by num/den, flagged as an exact rational.
  static ReturnMap rotation_rational(std::int64_t num, std::int64_t den);
  static ReturnMap odometer(int p);
  static ReturnMap circle_diffeo(double amplitude, int frequency);
  static ReturnMap permutation(std::vector<std::size_t> sigma);

  /// Rotation by -alpha, odometer subtracting one, inverse permutation.
  /// CircleDiffeo has no closed-form inverse in the family and throws.
  ReturnMap inverse() const;
};

/// Throws DomainError unless the map acts on the space.
void check_compatible(const TransversalSpace& space, const ReturnMap& map);

/// Lift of a circle map to R: F(x) with F(x+1) = F(x) + 1.
double circle_lift(const ReturnMap& map, double x);
/// Inverse lift. Rotation exact; CircleDiffeo by Newton seeded at
/// y - a sin(2 pi m y), at most 30 iterations, tolerance 1e-14.
double circle_lift_inverse(const ReturnMap& map, double y);

/// n-fold composition (negative n applies the inverse).
TransversalPoint apply_return_map(const TransversalSpace& space, const ReturnMap& map, const TransversalPoint& pt,
                                  std::int64_t n);

/// Function on a transversal.
struct Observable {
  enum class Kind { Trig, CylinderIndicator, PointIndicator };
  Kind kind = Kind::Trig;
  TrigPoly poly;
  std::vector<int> prefix;
  std::size_t index = 0;

  static Observable trig(TrigPoly p) { return {Kind::Trig, std::move(p), {}, 0}; }
  static Observable cylinder(std::vector<int> prefix) { return {Kind::CylinderIndicator, {}, std::move(prefix), 0}; }
  static Observable point(std::size_t index) { return {Kind::PointIndicator, {}, {}, index}; }
};

double evaluate_observable(const TransversalSpace& space, const Observable& obs, const TransversalPoint& pt);
/// Integral of the observable against a raw measure.
double observable_expectation(const TransversalSpace& space, const RawTransversalMeasure& m, const Observable& obs);

/// (1/N) sum_{n<N} obs(R^n x0), compensated summation.
double birkhoff_average(const TransversalSpace& space, const ReturnMap& map, const Observable& obs,
                        const TransversalPoint& x0, std::size_t n_steps);

struct ContinuedFraction {
  std::vector<std::uint64_t> terms;
  bool terminated = false;
  std::int64_t num = 0;
  std::int64_t den = 1;
};
/// Exact continued fraction of the binary value of alpha in [0,1), stopped
/// after max_terms partial quotients or once a convergent denominator would
/// exceed den_cap.
ContinuedFraction continued_fraction(double alpha, int max_terms = 40, double den_cap = 1e12);

/// The reduced rational a rotation is treated as, if any: the declared
/// rational, or a terminating continued fraction of the real angle.
std::optional<Rational> rotation_rationality(const ReturnMap& map);

struct UlamOptions {
  std::size_t bins = 512;
  double power_iter_tol = 1e-12;
  std::size_t max_iters = 100000;
};

/// One ergodic component of the Ulam chain (a closed communicating class,
/// adjacent classes merged).
struct UlamComponent {
  std::vector<double> bin_masses;  // normalized to total 1, full length
  double center = 0.0;             // mass-weighted circular mean
  bool atom = false;
};

struct UlamResult {
  std::size_t bins = 0;
  std::vector<double> stationary;  // uniform-start stationary vector, total 1
  std::vector<UlamComponent> components;
  double max_row_sum_error = 0.0;
  double eigenvalue = 0.0;          // ||pi P||_1 / ||pi||_1
  double eigen_residual = 0.0;      // ||pi P - pi||_1
  std::size_t iterations = 0;
  std::size_t closed_classes = 0;
};

/// Ulam discretization of the transfer operator of a monotone circle map:
/// uniform bins, transition weights from exact preimage lengths, stationary
/// vectors per closed class by lazy power iteration.
UlamResult ulam_invariant_measure(const ReturnMap& map, const UlamOptions& opts);

struct ErgodicMeasure {
  RawTransversalMeasure measure;
  bool ergodic = true;
  std::string note;
};

struct FixedPoint {
  double x;
  double derivative;
  bool attracting;
};
/// Fixed points j/(2m) of x + a sin(2 pi m x), with multipliers.
std::vector<FixedPoint> circle_diffeo_fixed_points(const ReturnMap& map);

struct InvariantMeasures {
  std::vector<ErgodicMeasure> measures;
  std::vector<std::string> warnings;
  std::optional<UlamResult> ulam;
  /// Atoms promoted from the Ulam chain at two refinements (CircleDiffeo).
  std::vector<double> ulam_atoms;
  bool ulam_cross_check = true;
};

InvariantMeasures invariant_measures(const TransversalSpace& space, const ReturnMap& map, const UlamOptions& opts = {});

struct DynamicsReport {
  bool minimal = false;
  bool uniquely_ergodic = false;
  std::vector<ErgodicMeasure> ergodic_measures;
  std::string method;  // "exact", "ulam" or "birkhoff"
  std::optional<std::int64_t> period;
  std::vector<std::string> warnings;
  UlamOptions tolerances;
};

DynamicsReport classify_dynamics(const TransversalSpace& space, const ReturnMap& map, const UlamOptions& opts = {});

/// Cycle decomposition of a permutation, each cycle starting at its smallest element.
std::vector<std::vector<std::size_t>> permutation_cycles(const std::vector<std::size_t>& sigma);

/// max over observables and sample points of |Birkhoff average - space
/// average|. Without explicit space averages the candidate measure is the
/// equal-weight mixture of the normalized invariant measures.
double unique_ergodicity_deviation(const TransversalSpace& space, const ReturnMap& map,
                                   const std::vector<Observable>& observables,
                                   const std::vector<TransversalPoint>& sample_points, std::size_t n_steps,
                                   const std::optional<std::vector<double>>& space_averages = std::nullopt);

}  // namespace msol
