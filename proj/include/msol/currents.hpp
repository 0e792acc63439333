#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <memory>
#include <vector>

#include "msol/forms.hpp"
#include "msol/smeasure.hpp"
#include "msol/solenoid.hpp"

namespace msol {

enum class ImmersionKind { RotationStandard, TorusLinear, DyadicR3, Custom };
std::string to_string(ImmersionKind kind);

using Vec3 = std::array<double, 3>;

/// Leafwise C^1 map F(t, x) of a suspension into the flat torus T^n
/// (n = 2 or 3). Positions are returned lifted to R^n; the torus point is
/// their reduction mod 1.
///   RotationStandard: (t, x + alpha t) in T^2.
///   TorusLinear: v t + w0 + e(x) w1, e the real embedding of x.
///   DyadicR3: (t, 1/2 + sum_k eps_k cos 2 pi tau_k, 1/2 + sum_k eps_k sin 2 pi tau_k)
///     with eps_k = eps0 4^-k and tau_k = (t + sum_{i<k} a_i 2^i) / 2^k.
///   Custom: G(t, x + alpha t) with G(u) = u + P(u), P a pair of
///     trigonometric 0-forms on T^2.
struct Immersion {
  ImmersionKind kind = ImmersionKind::RotationStandard;
  int n = 2;
  double alpha = 0.0;
  std::vector<double> v, w0, w1;
  int depth = 0;
  double eps0 = 0.05;
  std::vector<TorusForm> perturbation;
  std::vector<TorusForm> perturbation_d;
  // P0, P1, dP0, dP1 flattened into one evaluator; built by custom()
  std::shared_ptr<const FormEvaluator> perturbation_eval;

  static Immersion rotation_standard(double alpha);
  static Immersion torus_linear(std::vector<double> v, std::vector<double> w0, std::vector<double> w1);
  static Immersion dyadic_r3(int depth, double eps0 = 0.05);
  static Immersion custom(double alpha, std::vector<TorusForm> perturbation);

  Vec3 position(const TransversalSpace& space, const TransversalPoint& x, double t) const;
  Vec3 velocity(const TransversalSpace& space, const TransversalPoint& x, double t) const;
  /// Both at once (one perturbation evaluation for Custom).
  void position_velocity(const TransversalSpace& space, const TransversalPoint& x, double t, Vec3& pos,
                         Vec3& vel) const;

  /// Bound on |dF_j/dt| per coordinate.
  Vec3 speed_bound() const;
  /// t-frequency of the immersion's own oscillation.
  double own_frequency() const;
};

struct ImmersionCheck {
  double gluing_defect = 0.0;
  double min_speed = 0.0;
};

/// Gluing F(1,x) = F(0,f(x)) mod 1 at sample points (1e-9) and the rank
/// condition |dF/dt| >= 1e-6 on a grid. Throws DomainError.
ImmersionCheck validate_immersion(const Immersion& imm, const SuspensionSolenoid& sol);

struct QuadOptions {
  /// Coarse t-panel count; 0 picks one from the integrand frequency.
  std::size_t t_panels = 0;
  std::size_t circle_bins = 1024;
  /// Integrate t < 1/2 and t >= 1/2 as two flow-box pieces.
  bool split_half = false;
};

struct PairingResult {
  double value = 0.0;
  double quad_error_estimate = 0.0;
  std::size_t nodes_t = 0;
  std::size_t cells_x = 0;
};

/// Generalized Ruelle-Sullivan pairing int_X int_0^1 (F^*omega)(x,t) dt dmu_T(x)
/// for a 1-form omega. The value uses P panels of 16 Gauss nodes, P sized
/// from the integrand frequency; the error estimate is its difference from
/// the value on 2P/3 panels.
PairingResult pair_current(const Immersion& imm, const SuspensionSolenoid& sol, const TransversalMeasureInv& m,
                           const TorusForm& omega, const QuadOptions& quad = {});

struct ClosednessResult {
  double residual = 0.0;
  double bound = 0.0;
  bool ok = false;
};
/// |<current, d eta>| for a 0-form eta against max(1e-8, 10 * quad error).
ClosednessResult closedness_residual(const Immersion& imm, const SuspensionSolenoid& sol,
                                     const TransversalMeasureInv& m, const TorusForm& eta,
                                     const QuadOptions& quad = {});

struct HomologyClass {
  std::vector<double> value;
  std::vector<double> quad_error;
};
/// Components <current, dtheta_i>, i = 1..n.
HomologyClass homology_class(const Immersion& imm, const SuspensionSolenoid& sol, const TransversalMeasureInv& m,
                             const QuadOptions& quad = {});

/// (1/T) times the lifted displacement of t -> F(t, x0) over [0, T], lifted
/// by nearest-integer continuation at steps of 1/64.
std::vector<double> asymptotic_cycle(const Immersion& imm, const SuspensionSolenoid& sol, const TransversalPoint& x0,
                                     double horizon);

/// F^*omega as a leafwise 1-form.
LeafwiseForm pullback_leafwise(const Immersion& imm, const SuspensionSolenoid& sol, const TorusForm& omega);

struct ConsistencyResult {
  double current = 0.0;
  double leafwise = 0.0;
  double difference = 0.0;
  double bound = 0.0;
};
/// Compares pair_current with integrate_leafwise of the pulled-back form.
ConsistencyResult pushforward_consistency(const Immersion& imm, const SuspensionSolenoid& sol,
                                          const TransversalMeasureInv& m, const TorusForm& omega);

/// Transversal point coordinate used by TorusLinear.
double transversal_coordinate(const TransversalSpace& space, const TransversalPoint& x);

}  // namespace msol
