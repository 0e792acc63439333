#include "msol/smeasure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "msol/common.hpp"

namespace msol {

namespace {

bool point_in_cell(const TransversalSpace& space, const TransversalPoint& x, const TransversalCell& cell) {
  switch (space.kind()) {
    case TransversalKind::Circle: return wrap01(x.circle_coordinate() - cell.lo) < cell.hi - cell.lo || cell.hi - cell.lo >= 1.0;
    case TransversalKind::Finite:
      return std::find(cell.point_indices.begin(), cell.point_indices.end(), x.index) != cell.point_indices.end();
    case TransversalKind::CantorPAdic:
      return cell.prefix.size() <= x.digits.size() && std::equal(cell.prefix.begin(), cell.prefix.end(), x.digits.begin());
  }
  return false;
}

}  // namespace

InvarianceCheck check_holonomy_invariance(const TransversalSpace& space, const RawTransversalMeasure& m,
                                          const ReturnMap& map, double tol) {
  check_compatible(space, map);
  double residual = 0.0;
  switch (space.kind()) {
    case TransversalKind::Circle: {
      for (int level = 0; level <= 9; ++level) {
        const std::size_t n = std::size_t{1} << level;
        for (std::size_t i = 0; i < n; ++i) {
          const double lo = static_cast<double>(i) / static_cast<double>(n);
          const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
          const double plo = circle_lift_inverse(map, lo);
          const double phi = circle_lift_inverse(map, hi);
          const double diff = circle_interval_mass(m, plo, phi) - circle_interval_mass(m, lo, hi);
          residual = std::max(residual, std::fabs(diff));
        }
      }
      break;
    }
    case TransversalKind::CantorPAdic: {
      for (int level = 1; level <= space.depth(); ++level) {
        const auto w = coarsen_cylinder_weights(space, m, level);
        const std::size_t n = w.size();
        // The odometer preimage of cylinder r at level k is cylinder r - 1 mod p^k.
        for (std::size_t r = 0; r < n; ++r) residual = std::max(residual, std::fabs(w[(r + n - 1) % n] - w[r]));
      }
      break;
    }
    case TransversalKind::Finite: {
      const ReturnMap inv = map.inverse();
      for (std::size_t y = 0; y < m.weights.size(); ++y)
        residual = std::max(residual, std::fabs(m.weights[inv.sigma[y]] - m.weights[y]));
      break;
    }
  }
  return {residual <= tol, residual};
}

TransversalMeasureInv make_invariant_measure(const SuspensionSolenoid& sol, RawTransversalMeasure raw, double tol) {
  validate_measure(sol.space(), raw);
  if (!(total_mass(raw) > 0.0)) throw DomainError("transversal measure must be non-trivial (total mass > 0)");
  const auto chk = check_holonomy_invariance(sol.space(), raw, sol.map(), tol);
  if (!chk.invariant)
    throw DomainError("measure is not holonomy invariant (residual " + std::to_string(chk.residual) + ")");
  return {std::move(raw), chk.residual, std::nullopt};
}

SupportDescriptor support(const TransversalSpace& space, const TransversalMeasureInv& inv, double threshold) {
  const auto& m = inv.raw;
  SupportDescriptor out;
  switch (space.kind()) {
    case TransversalKind::Finite:
      for (std::size_t i = 0; i < m.weights.size(); ++i)
        if (m.weights[i] > threshold) out.points.push_back(i);
      out.whole_space = out.points.size() == m.weights.size();
      break;
    case TransversalKind::CantorPAdic: {
      const int p = space.base();
      const int depth = space.depth();
      std::function<bool(const std::vector<int>&)> full = [&](const std::vector<int>& prefix) {
        return cell_mass(space, m, TransversalCell::cylinder(prefix)) > threshold &&
               (static_cast<int>(prefix.size()) == depth || [&] {
                 for (int a = 0; a < p; ++a) {
                   auto child = prefix;
                   child.push_back(a);
                   if (!full(child)) return false;
                 }
                 return true;
               }());
      };
      std::function<void(std::vector<int>)> walk = [&](std::vector<int> prefix) {
        if (!(cell_mass(space, m, TransversalCell::cylinder(prefix)) > threshold)) return;
        if (full(prefix)) {
          out.cylinders.push_back(prefix);
          return;
        }
        for (int a = 0; a < p; ++a) {
          auto child = prefix;
          child.push_back(a);
          walk(child);
        }
      };
      walk({});
      out.whole_space = out.cylinders.size() == 1 && out.cylinders.front().empty();
      break;
    }
    case TransversalKind::Circle: {
      for (const auto& a : m.atoms)
        if (a.mass > threshold) out.atoms.push_back(a.x);
      constexpr std::size_t grid = 4096;
      std::vector<bool> on(grid, false);
      const bool has_density = m.density.max_frequency() > 0 || m.density.constant != 0.0 || !m.histogram.empty();
      if (has_density) {
        for (std::size_t i = 0; i < grid; ++i) {
          const double x = (static_cast<double>(i) + 0.5) / grid;
          double v = m.density(x);
          if (!m.histogram.empty()) {
            const auto b = static_cast<std::size_t>(x * static_cast<double>(m.histogram.size()));
            v += m.histogram[std::min(b, m.histogram.size() - 1)] * static_cast<double>(m.histogram.size());
          }
          on[i] = v > threshold;
        }
      }
      if (std::all_of(on.begin(), on.end(), [](bool b) { return b; })) {
        out.whole_space = true;
        out.intervals.push_back({0.0, 1.0});
        break;
      }
      // Runs of positive cells, closed; a run through 0 is reported wrapped.
      std::size_t start = 0;
      while (start < grid && on[start]) ++start;
      for (std::size_t k = 0; k < grid; ++k) {
        const std::size_t i = (start + k) % grid;
        if (!on[i]) continue;
        std::size_t len = 0;
        while (k + len < grid && on[(start + k + len) % grid]) ++len;
        const double lo = static_cast<double>(i) / grid;
        out.intervals.push_back({lo, lo + static_cast<double>(len) / grid});
        k += len;
      }
      break;
    }
  }
  return out;
}

SolenoidMeasure SolenoidMeasure::plus(const SolenoidMeasure& other) const {
  SolenoidMeasure out = *this;
  if (other.daval_part) {
    if (out.daval_part) {
      out.daval_part->raw = out.daval_part->raw.plus(other.daval_part->raw);
      out.daval_part->invariance_residual += other.daval_part->invariance_residual;
      out.daval_part->ergodic.reset();
    } else {
      out.daval_part = other.daval_part;
    }
  }
  out.leaf_densities.insert(out.leaf_densities.end(), other.leaf_densities.begin(), other.leaf_densities.end());
  out.point_atoms.insert(out.point_atoms.end(), other.point_atoms.begin(), other.point_atoms.end());
  return out;
}

SolenoidMeasure SolenoidMeasure::scaled(double c) const {
  if (!(c >= 0.0)) throw DomainError("measures scale by nonnegative factors");
  SolenoidMeasure out = *this;
  if (out.daval_part) {
    out.daval_part->raw = out.daval_part->raw.scaled(c);
    out.daval_part->invariance_residual *= c;
  }
  for (auto& ld : out.leaf_densities) ld.g = ld.g.scaled(c);
  for (auto& a : out.point_atoms) a.mass *= c;
  return out;
}

double measure_of_cell(const SuspensionSolenoid& sol, const SolenoidMeasure& mu, const ProductCell& cell) {
  if (!(cell.t0 >= 0.0 && cell.t0 <= cell.t1 && cell.t1 <= 1.0)) throw DomainError("product cell needs 0 <= t0 <= t1 <= 1");
  CompensatedSum s;
  if (mu.daval_part) s.add((cell.t1 - cell.t0) * cell_mass(sol.space(), mu.daval_part->raw, cell.transversal));
  for (const auto& ld : mu.leaf_densities)
    if (point_in_cell(sol.space(), ld.x0, cell.transversal)) s.add(ld.g.integrate(cell.t0, cell.t1));
  for (const auto& a : mu.point_atoms)
    if (a.at.t >= cell.t0 && a.at.t < cell.t1 && point_in_cell(sol.space(), a.at.x, cell.transversal)) s.add(a.mass);
  return s.value();
}

double solenoid_total_mass(const SolenoidMeasure& mu) {
  CompensatedSum s;
  if (mu.daval_part) s.add(total_mass(mu.daval_part->raw));
  for (const auto& ld : mu.leaf_densities) s.add(ld.g.mean());
  for (const auto& a : mu.point_atoms) s.add(a.mass);
  return s.value();
}

SolenoidMeasure daval_from_transversal(const SuspensionSolenoid& sol, const TransversalMeasureInv& m, double tol) {
  const auto chk = check_holonomy_invariance(sol.space(), m.raw, sol.map(), tol);
  if (!chk.invariant) throw DomainError("daval construction needs a holonomy-invariant measure");
  SolenoidMeasure mu;
  mu.daval_part = m;
  mu.daval_part->invariance_residual = chk.residual;
  return mu;
}

namespace {

std::vector<TransversalCell> disintegration_cells(const TransversalSpace& space, const DisintegrationOptions& opts) {
  switch (space.kind()) {
    case TransversalKind::Circle: return uniform_cells(space, opts.circle_level);
    case TransversalKind::CantorPAdic: return uniform_cells(space, space.depth());
    case TransversalKind::Finite: {
      std::vector<TransversalCell> cells;
      for (std::size_t i = 0; i < space.points().size(); ++i) cells.push_back(TransversalCell::points({i}));
      return cells;
    }
  }
  return {};
}

// Neville extrapolation of samples (h_i, q_i) to h = 0.
double extrapolate_to_zero(std::vector<double> h, std::vector<double> q) {
  const std::size_t n = q.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = n - 1; i >= level; --i) {
      q[i] = (h[i - level] * q[i] - h[i] * q[i - 1]) / (h[i - level] - h[i]);
      if (i == level) break;
    }
  return q[n - 1];
}

}  // namespace

Disintegration disintegrate(const SuspensionSolenoid& sol, const SolenoidMeasure& mu, const DisintegrationOptions& opts) {
  if (opts.eps_min_exp < 1 || opts.eps_max_exp < opts.eps_min_exp || opts.eps_max_exp > 20)
    throw DomainError("thickening exponents must satisfy 1 <= min <= max <= 20");
  const auto& space = sol.space();
  const auto cells = disintegration_cells(space, opts);
  std::vector<double> recovered(cells.size(), 0.0);
  std::vector<char> atom_flag(cells.size(), 0);

  parallel_for(cells.size(), [&](std::size_t c) {
    std::vector<double> hs, qs;
    double first_peak = 0.0, last_peak = 0.0;
    for (int e = opts.eps_min_exp; e <= opts.eps_max_exp; ++e) {
      const double eps = std::ldexp(1.0, -e);
      const std::size_t windows = std::size_t{1} << (e - 1);  // windows of length 2 eps tile [0,1)
      double qmin = std::numeric_limits<double>::infinity(), qmax = 0.0;
      for (std::size_t j = 0; j < windows; ++j) {
        const double t0 = static_cast<double>(j) * 2.0 * eps;
        const double t1 = std::min(1.0, t0 + 2.0 * eps);
        const double q = measure_of_cell(sol, mu, {t0, t1, cells[c]}) / (2.0 * eps);
        qmin = std::min(qmin, q);
        qmax = std::max(qmax, q);
      }
      hs.push_back(eps * eps);
      qs.push_back(qmin);
      if (e == opts.eps_min_exp) first_peak = qmax - qmin;
      last_peak = qmax - qmin;
    }
    recovered[c] = std::max(0.0, extrapolate_to_zero(hs, qs));
    // A point atom adds mass/(2 eps) to one window at every scale.
    const double growth = std::ldexp(1.0, opts.eps_max_exp - opts.eps_min_exp);
    atom_flag[c] = (first_peak > 0.0 && last_peak > 0.5 * growth * first_peak) ? 1 : 0;
  });

  Disintegration out;
  switch (space.kind()) {
    case TransversalKind::Circle: out.measure = RawTransversalMeasure::circle_histogram(recovered); break;
    case TransversalKind::CantorPAdic: out.measure = RawTransversalMeasure::cylinder_weights(recovered); break;
    case TransversalKind::Finite: out.measure = RawTransversalMeasure::finite_weights(recovered); break;
  }
  out.contamination = std::max(0.0, solenoid_total_mass(mu) - compensated_sum(recovered));
  for (char f : atom_flag) out.atom_cells += static_cast<std::size_t>(f);
  return out;
}

Eq1Check eq1_lower_bound_check(const SuspensionSolenoid& sol, const TransversalMeasureInv& m, const ProductCell& cell,
                               double eps0) {
  if (!(eps0 > 0.0) || cell.t1 - cell.t0 < eps0) throw DomainError("cell leaf length must be at least eps0 > 0");
  const SolenoidMeasure mu = daval_from_transversal(sol, m);
  const Eq1Check out{measure_of_cell(sol, mu, cell), eps0 * cell_mass(sol.space(), m.raw, cell.transversal)};
  if (out.lhs < out.rhs - 1e-12) throw ContractViolation("daval lower bound mu(V) >= eps0 mu_T(C) violated");
  return out;
}

Decomposition decompose(const SuspensionSolenoid& sol, const SolenoidMeasure& mu) {
  Decomposition d;
  d.regular.daval_part = mu.daval_part;
  for (const auto& ld : mu.leaf_densities) {
    const double floor_value = std::max(0.0, trig_minimum(ld.g, 4096, 1e-10).value);
    if (floor_value > 0.0) d.regular.leaf_densities.push_back({ld.x0, TrigPoly::constant_poly(floor_value)});
    TrigPoly excess = ld.g;
    excess.constant -= floor_value;
    if (!(excess.is_constant() && excess.constant == 0.0)) d.irregular.leaf_densities.push_back({ld.x0, excess});
  }
  d.irregular.point_atoms = mu.point_atoms;

  // Check regular + irregular = mu on a product-cell algebra.
  const int level = sol.space().kind() == TransversalKind::CantorPAdic ? std::min(2, sol.space().depth()) : 4;
  double residual = 0.0;
  for (const auto& c : uniform_cells(sol.space(), level))
    for (int k = 0; k < 8; ++k) {
      const ProductCell cell{k / 8.0, (k + 1) / 8.0, c};
      const double diff = measure_of_cell(sol, mu, cell) - measure_of_cell(sol, d.regular, cell) -
                          measure_of_cell(sol, d.irregular, cell);
      residual = std::max(residual, std::fabs(diff));
    }
  d.residual = residual;
  return d;
}

double regular_mass(const Decomposition& d) { return solenoid_total_mass(d.regular); }
double irregular_mass(const Decomposition& d) { return solenoid_total_mass(d.irregular); }

SolenoidMeasure volume_measure(const SuspensionSolenoid& sol, const TransversalMeasureInv& m) {
  const double total = total_mass(m.raw);
  if (!(total > 0.0)) throw DomainError("volume measure needs positive total mass");
  TransversalMeasureInv scaled = m;
  scaled.raw = m.raw.scaled(1.0 / total);
  scaled.invariance_residual = m.invariance_residual / total;
  return daval_from_transversal(sol, scaled);
}

}  // namespace msol
