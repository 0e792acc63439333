#include "msol/solenoid.hpp"

#include <algorithm>
#include <cmath>

#include "msol/common.hpp"

namespace msol {

SuspensionSolenoid::SuspensionSolenoid(TransversalSpace space, ReturnMap map)
    : space_(std::move(space)), map_(std::move(map)) {
  check_compatible(space_, map_);
}

LeafPoint leaf_point_at(const SuspensionSolenoid& sol, const TransversalPoint& x0, double t) {
  if (!std::isfinite(t)) throw DomainError("leaf time must be finite");
  const double n = std::floor(t);
  LeafPoint lp{apply_return_map(sol.space(), sol.map(), x0, static_cast<std::int64_t>(n)), t - n};
  if (lp.t >= 1.0) {
    lp.x = apply_return_map(sol.space(), sol.map(), lp.x, 1);
    lp.t = 0.0;
  }
  return lp;
}

TransversalPoint holonomy_apply(const SuspensionSolenoid& sol, HolonomyGerm g, const TransversalPoint& pt) {
  return apply_return_map(sol.space(), sol.map(), pt, g.steps);
}

std::vector<TransversalPoint> sample_points(const TransversalSpace& space, std::size_t count) {
  std::vector<TransversalPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    switch (space.kind()) {
      case TransversalKind::Circle:
        out.push_back(TransversalPoint::on_circle(static_cast<double>(i) / static_cast<double>(count)));
        break;
      case TransversalKind::Finite: out.push_back(TransversalPoint::finite(i % space.points().size())); break;
      case TransversalKind::CantorPAdic: {
        const std::size_t n = space.cell_count();
        out.push_back(TransversalPoint::cantor(cylinder_digits(space.base(), space.depth(), (i * n) / count % n)));
        break;
      }
    }
  }
  return out;
}

namespace {

double max_circular_gap(std::vector<double> xs) {
  if (xs.empty()) return 1.0;
  std::sort(xs.begin(), xs.end());
  double gap = xs.front() + 1.0 - xs.back();
  for (std::size_t i = 1; i < xs.size(); ++i) gap = std::max(gap, xs[i] - xs[i - 1]);
  return gap;
}

struct OrbitScan {
  double radius;
  bool covers_all_points;
};

OrbitScan scan_orbit(const SuspensionSolenoid& sol, const TransversalPoint& x0, std::size_t n_steps) {
  const auto& space = sol.space();
  switch (space.kind()) {
    case TransversalKind::Circle:
    case TransversalKind::Finite: {
      std::vector<double> xs;
      xs.reserve(n_steps);
      std::vector<bool> hit(space.kind() == TransversalKind::Finite ? space.points().size() : 0, false);
      TransversalPoint x = x0;
      for (std::size_t n = 0; n < n_steps; ++n) {
        xs.push_back(embed_point(space, x));
        if (!hit.empty()) hit[x.index] = true;
        if (n + 1 < n_steps) x = apply_return_map(space, sol.map(), x, 1);
      }
      const bool all = std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
      return {max_circular_gap(std::move(xs)), all};
    }
    case TransversalKind::CantorPAdic: {
      const int p = space.base();
      const int depth = space.depth();
      std::vector<bool> hit(space.cell_count(), false);
      TransversalPoint x = x0;
      for (std::size_t n = 0; n < n_steps; ++n) {
        hit[cylinder_index(p, x.digits)] = true;
        if (n + 1 < n_steps) x = apply_return_map(space, sol.map(), x, 1);
      }
      // Smallest level k with a missed cylinder; coarser cylinders are unions.
      for (int k = 0; k <= depth; ++k) {
        const std::size_t n = int_pow(static_cast<std::size_t>(p), k);
        std::vector<bool> level(n, false);
        for (std::size_t i = 0; i < hit.size(); ++i)
          if (hit[i]) level[i % n] = true;
        if (!std::all_of(level.begin(), level.end(), [](bool b) { return b; }))
          return {std::pow(static_cast<double>(p), -k), false};
      }
      return {0.0, true};
    }
  }
  return {1.0, false};
}

}  // namespace

double leaf_density_radius(const SuspensionSolenoid& sol, const TransversalPoint& x0, std::size_t n_steps) {
  if (n_steps < 1) throw DomainError("leaf density radius needs N >= 1");
  return scan_orbit(sol, x0, n_steps).radius;
}

MinimalityVerdict minimality_verdict(const SuspensionSolenoid& sol, std::size_t samples, std::size_t n_steps,
                                     double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (samples < 1 || n_steps < 1) throw DomainError("need at least one sample and one step");
  MinimalityVerdict v{true, samples, n_steps, eps, 0.0};
  const auto starts = sample_points(sol.space(), samples);
  std::vector<OrbitScan> scans(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) { scans[i] = scan_orbit(sol, starts[i], n_steps); });
  for (const auto& s : scans) {
    v.worst_radius = std::max(v.worst_radius, s.radius);
    bool dense = false;
    switch (sol.space().kind()) {
      case TransversalKind::Finite: dense = s.covers_all_points; break;
      case TransversalKind::Circle: dense = s.radius <= eps; break;
      // Every cylinder of diameter >= eps must be hit.
      case TransversalKind::CantorPAdic: dense = s.radius < eps || s.radius == 0.0; break;
    }
    v.minimal = v.minimal && dense;
  }
  return v;
}

}  // namespace msol
