#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "msol/solenoid.hpp"
#include "msol/transversal.hpp"
#include "msol/trigpoly.hpp"

namespace msol {

inline constexpr double kDefaultInvarianceTol = 1e-9;

struct InvarianceCheck {
  bool invariant = false;
  double residual = 0.0;
};

/// Holonomy invariance of a raw measure under the return map:
/// residual = max_C |m(R^-1 C) - m(C)| over test cells. Cells are the
/// dyadic intervals of levels 0..9 on the circle, all cylinders of levels
/// 1..d on a p-adic space, and single points on a finite one.
InvarianceCheck check_holonomy_invariance(const TransversalSpace& space, const RawTransversalMeasure& m,
                                          const ReturnMap& map, double tol = kDefaultInvarianceTol);

/// A transversal measure that passed the invariance check.
struct TransversalMeasureInv {
  RawTransversalMeasure raw;
  double invariance_residual = 0.0;
  std::optional<bool> ergodic;
};

/// Validates, checks invariance and non-triviality. Throws DomainError.
TransversalMeasureInv make_invariant_measure(const SuspensionSolenoid& sol, RawTransversalMeasure raw,
                                             double tol = kDefaultInvarianceTol);

/// Support as a sub-transversal: circle intervals where the density exceeds
/// the threshold (closure on a 4096 grid) plus atoms, p-adic cylinders of
/// positive mass compressed to maximal full subtrees, or finite points.
struct SupportDescriptor {
  std::vector<std::size_t> points;
  std::vector<Interval> intervals;
  std::vector<std::vector<int>> cylinders;
  std::vector<double> atoms;
  bool whole_space = false;
};
SupportDescriptor support(const TransversalSpace& space, const TransversalMeasureInv& m, double threshold = 1e-12);

/// Leafwise density g(t) dt on the leaf segment {x0} x [0,1).
struct LeafDensity {
  TransversalPoint x0;
  TrigPoly g;
};

struct PointAtom {
  LeafPoint at;
  double mass = 0.0;
};

/// Closed-form measure on a suspension: a daval part (leafwise length
/// against an invariant transversal measure), leafwise densities on single
/// leaf segments, and point atoms.
struct SolenoidMeasure {
  std::optional<TransversalMeasureInv> daval_part;
  std::vector<LeafDensity> leaf_densities;
  std::vector<PointAtom> point_atoms;

  SolenoidMeasure plus(const SolenoidMeasure& other) const;
  SolenoidMeasure scaled(double c) const;
};

/// Product flow-box cell [t0, t1) x C, 0 <= t0 <= t1 <= 1.
struct ProductCell {
  double t0 = 0.0;
  double t1 = 1.0;
  TransversalCell transversal;
};

double measure_of_cell(const SuspensionSolenoid& sol, const SolenoidMeasure& mu, const ProductCell& cell);
double solenoid_total_mass(const SolenoidMeasure& mu);

/// The daval measure mu(A) = int Vol_1(A_y) dmu_T(y) of an invariant
/// transversal measure. Throws DomainError if the residual exceeds tol.
SolenoidMeasure daval_from_transversal(const SuspensionSolenoid& sol, const TransversalMeasureInv& m,
                                       double tol = kDefaultInvarianceTol);

struct DisintegrationOptions {
  /// log2 of the number of circle bins (9 -> 512 bins); ignored elsewhere.
  int circle_level = 9;
  /// Thickening radii 2^-eps_min_exp ... 2^-eps_max_exp.
  int eps_min_exp = 4;
  int eps_max_exp = 8;
};

struct Disintegration {
  RawTransversalMeasure measure;
  /// Mass of the input not recovered as a daval part (leafwise-singular or
  /// non-uniform leaf mass).
  double contamination = 0.0;
  /// Cells whose thickening quotient grew like 1/eps (point-atom detector).
  std::size_t atom_cells = 0;
};

/// Recovers the transversal measure by leaf thickening: per transversal cell
/// C, q(eps) = min_j mu(W_j x C) / (2 eps) over the windows W_j of length
/// 2 eps tiling the leaf, extrapolated to eps -> 0 by Richardson in eps^2.
Disintegration disintegrate(const SuspensionSolenoid& sol, const SolenoidMeasure& mu,
                            const DisintegrationOptions& opts = {});

struct Eq1Check {
  double lhs;  // mu(V)
  double rhs;  // eps0 * mu_T(C)
};

/// Lower bound mu(V) >= eps0 mu_T(C) for the daval measure of m on a product
/// cell whose leaf length is at least eps0. Throws if violated beyond 1e-12.
Eq1Check eq1_lower_bound_check(const SuspensionSolenoid& sol, const TransversalMeasureInv& m,
                               const ProductCell& cell, double eps0);

struct Decomposition {
  SolenoidMeasure regular;
  SolenoidMeasure irregular;
  double residual = 0.0;
};

/// Regular/irregular split by global domination: the regular part is the
/// daval part plus (ess-inf g) dt on each leaf density; the rest (density
/// excess over its minimum, point atoms) is irregular.
Decomposition decompose(const SuspensionSolenoid& sol, const SolenoidMeasure& mu);

double regular_mass(const Decomposition& d);
double irregular_mass(const Decomposition& d);

/// Daval measure of m rescaled to total mass 1.
SolenoidMeasure volume_measure(const SuspensionSolenoid& sol, const TransversalMeasureInv& m);

}  // namespace msol
