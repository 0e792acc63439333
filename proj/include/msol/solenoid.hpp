#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "msol/dynamics.hpp"
#include "msol/transversal.hpp"

namespace msol {

/// Mapping torus ([0,1] x X) / (0, x) ~ (1, f(x)) of a transversal system.
/// Leaves are oriented by increasing t and carry the metric dt^2; the base
/// transversal {0} x X is global.
class SuspensionSolenoid {
 public:
  SuspensionSolenoid(TransversalSpace space, ReturnMap map);

  const TransversalSpace& space() const noexcept { return space_; }
  const ReturnMap& map() const noexcept { return map_; }
  bool oriented() const noexcept { return true; }

 private:
  TransversalSpace space_;
  ReturnMap map_;
};

inline SuspensionSolenoid suspend(TransversalSpace space, ReturnMap map) {
  return SuspensionSolenoid(std::move(space), std::move(map));
}

/// Point (x, t) of a suspension with t in [0, 1).
struct LeafPoint {
  TransversalPoint x;
  double t = 0.0;
};

/// Point at leaf arclength t from (x0, 0): (f^floor(t)(x0), t - floor(t)).
LeafPoint leaf_point_at(const SuspensionSolenoid& sol, const TransversalPoint& x0, double t);

/// Holonomy germ on the base transversal, R^steps.
struct HolonomyGerm {
  std::int64_t steps = 0;
  HolonomyGerm inverse() const noexcept { return {-steps}; }
  bool operator==(const HolonomyGerm&) const = default;
};

inline HolonomyGerm holonomy_compose(HolonomyGerm a, HolonomyGerm b) noexcept { return {a.steps + b.steps}; }
TransversalPoint holonomy_apply(const SuspensionSolenoid& sol, HolonomyGerm g, const TransversalPoint& pt);

/// Deterministic starting points used by the orbit scans.
std::vector<TransversalPoint> sample_points(const TransversalSpace& space, std::size_t count);

/// Smallest eps for which the orbit {R^n x0 : n < N} is eps-dense: maximal
/// circular gap on circle and finite transversals; on p-adic transversals
/// the diameter p^-k of the largest cylinder the orbit misses (0 when every
/// depth-d cylinder is hit).
double leaf_density_radius(const SuspensionSolenoid& sol, const TransversalPoint& x0, std::size_t n_steps);

struct MinimalityVerdict {
  bool minimal = false;
  std::size_t samples = 0;
  std::size_t n_steps = 0;
  double eps = 0.0;
  double worst_radius = 0.0;
};

/// Numerical leaf-density test: every sampled orbit of length N must be
/// eps-dense (finite spaces: must visit every point). Independent of the
/// return-map classification.
MinimalityVerdict minimality_verdict(const SuspensionSolenoid& sol, std::size_t samples, std::size_t n_steps,
                                     double eps);
inline bool is_minimal(const SuspensionSolenoid& sol, std::size_t samples, std::size_t n_steps, double eps) {
  return minimality_verdict(sol, samples, n_steps, eps).minimal;
}

}  // namespace msol
