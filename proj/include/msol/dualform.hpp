#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "msol/currents.hpp"
#include "msol/forms.hpp"

namespace msol {

/// Radial bump rho_r(v) = c_r (1 - |v/r|^2)^2 on the normal fibres, with c_r
/// fixed by unit fibre integral: 15/(16 r) in codimension 1, 3/(pi r^2) in
/// codimension 2.
struct ThomProfile {
  double r = 0.02;
  int codim = 1;

  static ThomProfile make(double r, int codim);
  double peak() const;
  double operator()(double dist) const;
  /// Fibre integral by quadrature (radial for codimension 2).
  double fiber_integral() const;
};

/// Sampled form on the periodic G^n grid with nodes theta = index / G.
/// Node (i, j[, k]) has flat index (i * G + j) [* G + k].
struct GridForm {
  int n = 2;
  int degree = 0;
  int G = 0;
  std::vector<std::uint32_t> masks;
  std::vector<std::vector<double>> comp;

  static GridForm zero(int n, int degree, int G);
  std::size_t nodes() const;
  std::size_t component_index(std::uint32_t mask) const;
  double max_abs() const;
};

GridForm sample_form(const TorusForm& w, int G);
/// Periodic central-difference exterior derivative.
GridForm grid_d(const GridForm& g);
/// Trapezoid integral of a ^ b over the unit torus (degrees must sum to n).
double grid_wedge_integrate(const GridForm& a, const GridForm& b);
double grid_wedge_integrate(const GridForm& a, const TorusForm& b);

/// Tube-disjointness radius r1 of the embedded built-ins: (2/3) eps0 4^-d
/// for DyadicR3, half the closest approach of distinct leaf pieces for
/// compact leaves, 1/4 for linear foliations of T^2.
double tube_radius(const Immersion& imm, const SuspensionSolenoid& sol);

struct DualFormOptions {
  /// Leaf samples per tube radius on circle transversals.
  double samples_per_radius = 64.0;
};

struct DualForm {
  GridForm form;
  double r = 0.0;
  double r1 = 0.0;
  std::size_t segments = 0;
  std::vector<std::string> warnings;
};

/// j_* Phi_r on a G^n grid: at each node, the sum over leaf pieces within r
/// of (-1)^(n-1) rho_r(dist) i_u vol times the piece's transversal weight,
/// u the unit leaf tangent at the foot point. Leaves are traced through
/// the return map so that pieces join end to end.
DualForm pushforward_dual_form(const Immersion& imm, const SuspensionSolenoid& sol, const TransversalMeasureInv& m,
                               const ThomProfile& profile, int G, const DualFormOptions& opts = {});

/// Integral of a codimension-1 dual form along the grid line theta_axis = index / G
/// (n = 2): the transversal mass crossing the line.
double fiber_line_integral(const GridForm& g, int axis, int index);

struct RsEntry {
  std::string name;
  double grid = 0.0;
  double current = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  bool exact_form = false;
};
struct RsReport {
  std::vector<RsEntry> entries;
  double max_rel_error = 0.0;
  double max_abs_exact = 0.0;
  double closedness = 0.0;        // max |grid_d(j_* Phi_r)|
  double closedness_bound = 0.0;  // 5 / G * max |j_* Phi_r|
};

struct NamedForm {
  std::string name;
  TorusForm form;
};

/// Compares int j_*Phi_r ^ beta with the current pairing for closed test
/// 1-forms. Forms whose current pairing vanishes (below 1e-9) are judged by
/// absolute error.
RsReport rsform_check(const Immersion& imm, const SuspensionSolenoid& sol, const TransversalMeasureInv& m, double r,
                      int G, const std::vector<NamedForm>& test_forms, const DualFormOptions& opts = {});

struct SelfIntersection {
  double value = 0.0;
  std::vector<std::string> warnings;
};
/// int j_*Phi_r ^ j_*Phi_r' with r != r' (n = 2 only).
SelfIntersection self_intersection(const Immersion& imm, const SuspensionSolenoid& sol,
                                   const TransversalMeasureInv& m, double r, double r_prime, int G,
                                   bool fail_on_atoms = false, const DualFormOptions& opts = {});

bool has_atoms(const TransversalSpace& space, const RawTransversalMeasure& m);

struct FlowboxBound {
  double c0 = 0.0;
  std::vector<double> bounds;
  double sum = 0.0;
};
/// Per-cell bounds C0 m(cell)^2 over the level-`depth` transversal
/// partition, C0 = rho_r(0) * sup |dF/dt|.
FlowboxBound flowbox_refinement_bound(const Immersion& imm, const SuspensionSolenoid& sol,
                                      const RawTransversalMeasure& m, int depth, double r = 0.02);

}  // namespace msol
