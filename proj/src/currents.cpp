#include "msol/currents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msol/common.hpp"
#include "msol/quadrature.hpp"

namespace msol {

std::string to_string(ImmersionKind kind) {
  switch (kind) {
    case ImmersionKind::RotationStandard: return "rotation_standard";
    case ImmersionKind::TorusLinear: return "torus_linear";
    case ImmersionKind::DyadicR3: return "dyadic_r3";
    case ImmersionKind::Custom: return "custom";
  }
  return "?";
}

Immersion Immersion::rotation_standard(double alpha) {
  if (!std::isfinite(alpha)) throw DomainError("rotation angle must be finite");
  Immersion imm;
  imm.kind = ImmersionKind::RotationStandard;
  imm.n = 2;
  imm.alpha = alpha;
  return imm;
}

Immersion Immersion::torus_linear(std::vector<double> v, std::vector<double> w0, std::vector<double> w1) {
  const std::size_t n = v.size();
  if (n < 2 || n > 3 || w0.size() != n || w1.size() != n)
    throw DomainError("torus_linear needs v, w0, w1 of equal length 2 or 3");
  Immersion imm;
  imm.kind = ImmersionKind::TorusLinear;
  imm.n = static_cast<int>(n);
  imm.v = std::move(v);
  imm.w0 = std::move(w0);
  imm.w1 = std::move(w1);
  return imm;
}

Immersion Immersion::dyadic_r3(int depth, double eps0) {
  if (depth < 1 || depth > 20) throw DomainError("dyadic_r3 depth must be in 1..20");
  if (!(eps0 > 0.0 && eps0 <= 0.1)) throw DomainError("dyadic_r3 base radius must be in (0, 0.1]");
  Immersion imm;
  imm.kind = ImmersionKind::DyadicR3;
  imm.n = 3;
  imm.depth = depth;
  imm.eps0 = eps0;
  return imm;
}

Immersion Immersion::custom(double alpha, std::vector<TorusForm> perturbation) {
  if (perturbation.size() != 2) throw DomainError("custom immersion needs two perturbation components");
  Immersion imm;
  imm.kind = ImmersionKind::Custom;
  imm.n = 2;
  imm.alpha = alpha;
  for (const auto& p : perturbation) {
    if (p.dim() != 2 || p.degree() != 0) throw DomainError("custom perturbations are 0-forms on T^2");
    imm.perturbation_d.push_back(d(p));
  }
  imm.perturbation = std::move(perturbation);
  imm.perturbation_eval = std::make_shared<const FormEvaluator>(std::vector<TorusForm>{
      imm.perturbation[0], imm.perturbation[1], imm.perturbation_d[0], imm.perturbation_d[1]});
  return imm;
}

double transversal_coordinate(const TransversalSpace& space, const TransversalPoint& x) {
  switch (space.kind()) {
    case TransversalKind::Circle: return x.circle_coordinate();
    case TransversalKind::Finite: return space.points()[x.index];
    case TransversalKind::CantorPAdic: return embed_point(space, x);
  }
  return 0.0;
}

namespace {

double dyadic_offset(const std::vector<int>& digits, int k) {
  // sum_{i<k} a_i 2^i
  double s = 0.0;
  for (int i = 0; i < k && i < static_cast<int>(digits.size()); ++i) s += digits[static_cast<std::size_t>(i)] * std::ldexp(1.0, i);
  return s;
}

}  // namespace

Vec3 Immersion::position(const TransversalSpace& space, const TransversalPoint& x, double t) const {
  Vec3 out{0.0, 0.0, 0.0};
  switch (kind) {
    case ImmersionKind::RotationStandard: out = {t, x.circle_coordinate() + alpha * t, 0.0}; break;
    case ImmersionKind::TorusLinear: {
      const double e = transversal_coordinate(space, x);
      for (int j = 0; j < n; ++j) {
        const auto u = static_cast<std::size_t>(j);
        out[u] = v[u] * t + w0[u] + e * w1[u];
      }
      break;
    }
    case ImmersionKind::DyadicR3: {
      out = {t, 0.5, 0.5, };
      for (int k = 1; k <= depth; ++k) {
        const double eps = eps0 * std::ldexp(1.0, -2 * k);
        const double tau = (t + dyadic_offset(x.digits, k)) * std::ldexp(1.0, -k);
        out[1] += eps * std::cos(kTwoPi * tau);
        out[2] += eps * std::sin(kTwoPi * tau);
      }
      break;
    }
    case ImmersionKind::Custom: {
      Vec3 vel;
      position_velocity(space, x, t, out, vel);
      break;
    }
  }
  return out;
}

Vec3 Immersion::velocity(const TransversalSpace& space, const TransversalPoint& x, double t) const {
  Vec3 out{0.0, 0.0, 0.0};
  switch (kind) {
    case ImmersionKind::RotationStandard: out = {1.0, alpha, 0.0}; break;
    case ImmersionKind::TorusLinear:
      for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(j)];
      break;
    case ImmersionKind::DyadicR3: {
      out = {1.0, 0.0, 0.0};
      for (int k = 1; k <= depth; ++k) {
        const double scale = eps0 * std::ldexp(1.0, -2 * k) * kTwoPi * std::ldexp(1.0, -k);
        const double tau = (t + dyadic_offset(x.digits, k)) * std::ldexp(1.0, -k);
        out[1] -= scale * std::sin(kTwoPi * tau);
        out[2] += scale * std::cos(kTwoPi * tau);
      }
      break;
    }
    case ImmersionKind::Custom: {
      Vec3 pos;
      position_velocity(space, x, t, pos, out);
      break;
    }
  }
  return out;
}

void Immersion::position_velocity(const TransversalSpace& space, const TransversalPoint& x, double t, Vec3& pos,
                                  Vec3& vel) const {
  if (kind != ImmersionKind::Custom) {
    pos = position(space, x, t);
    vel = velocity(space, x, t);
    return;
  }
  if (perturbation.size() != 2 || perturbation_d.size() != 2) throw ContractViolation("custom immersion without perturbation");
  const double u[2] = {t, x.circle_coordinate() + alpha * t};
  double e[6];  // P0, P1, dP0 (2), dP1 (2)
  if (perturbation_eval) {
    perturbation_eval->evaluate(u, e);
  } else {
    const std::vector<double> uv(u, u + 2);
    for (std::size_t i = 0; i < 2; ++i) {
      e[i] = perturbation[i].value(uv);
      e[2 + 2 * i] = perturbation_d[i].component(1u, uv);
      e[3 + 2 * i] = perturbation_d[i].component(2u, uv);
    }
  }
  pos = {u[0] + e[0], u[1] + e[1], 0.0};
  vel = {1.0 + e[2] + alpha * e[3], alpha + e[4] + alpha * e[5], 0.0};
}

Vec3 Immersion::speed_bound() const {
  switch (kind) {
    case ImmersionKind::RotationStandard: return {1.0, std::fabs(alpha), 0.0};
    case ImmersionKind::TorusLinear: {
      Vec3 b{0.0, 0.0, 0.0};
      for (int j = 0; j < n; ++j) b[static_cast<std::size_t>(j)] = std::fabs(v[static_cast<std::size_t>(j)]);
      return b;
    }
    case ImmersionKind::DyadicR3: {
      double s = 0.0;
      for (int k = 1; k <= depth; ++k) s += eps0 * std::ldexp(1.0, -2 * k) * kTwoPi * std::ldexp(1.0, -k);
      return {1.0, s, s};
    }
    case ImmersionKind::Custom: {
      Vec3 b{1.0, std::fabs(alpha), 0.0};
      for (std::size_t i = 0; i < 2; ++i)
        for (const auto& [key, c] : perturbation_d[i].terms()) b[i] += std::fabs(c) * (key.mask == 1u ? 1.0 : std::fabs(alpha));
      return b;
    }
  }
  return {0.0, 0.0, 0.0};
}

double Immersion::own_frequency() const {
  switch (kind) {
    case ImmersionKind::DyadicR3: return 1.0;
    case ImmersionKind::Custom: {
      double f = 0.0;
      for (const auto& p : perturbation)
        for (const auto& [key, c] : p.terms()) f = std::max(f, std::fabs(key.k[0] + alpha * key.k[1]));
      return f;
    }
    default: return 0.0;
  }
}

ImmersionCheck validate_immersion(const Immersion& imm, const SuspensionSolenoid& sol) {
  const auto& space = sol.space();
  switch (imm.kind) {
    case ImmersionKind::RotationStandard:
    case ImmersionKind::Custom:
      if (space.kind() != TransversalKind::Circle) throw DomainError("this immersion needs a circle transversal");
      break;
    case ImmersionKind::DyadicR3:
      if (space.kind() != TransversalKind::CantorPAdic || space.base() != 2 || sol.map().kind != MapKind::Odometer)
        throw DomainError("dyadic_r3 needs the dyadic odometer suspension");
      if (space.depth() != imm.depth) throw DomainError("dyadic_r3 depth must match the transversal depth");
      break;
    case ImmersionKind::TorusLinear: break;
  }
  ImmersionCheck chk;
  for (const auto& x : sample_points(space, 32)) {
    const auto fx = apply_return_map(space, sol.map(), x, 1);
    const Vec3 a = imm.position(space, x, 1.0), b = imm.position(space, fx, 0.0);
    for (int j = 0; j < imm.n; ++j)
      chk.gluing_defect = std::max(chk.gluing_defect, std::fabs(wrap_centered(a[static_cast<std::size_t>(j)] - b[static_cast<std::size_t>(j)])));
  }
  if (!(chk.gluing_defect <= 1e-9))
    throw DomainError("immersion does not glue: |F(1,x) - F(0,f(x))| = " + std::to_string(chk.gluing_defect));
  chk.min_speed = std::numeric_limits<double>::infinity();
  for (const auto& x : sample_points(space, 16))
    for (int i = 0; i <= 64; ++i) {
      const Vec3 vel = imm.velocity(space, x, i / 64.0);
      chk.min_speed = std::min(chk.min_speed, std::sqrt(vel[0] * vel[0] + vel[1] * vel[1] + vel[2] * vel[2]));
    }
  if (!(chk.min_speed >= 1e-6)) throw DomainError("immersion fails the leafwise rank condition");
  return chk;
}

namespace {

// omega given through its evaluator; components come back in dtheta_1..n order
double pulled_back(const Immersion& imm, const TransversalSpace& space, const FormEvaluator& omega,
                   const TransversalPoint& x, double t) {
  Vec3 p, v;
  imm.position_velocity(space, x, t, p, v);
  double w[3];
  omega.evaluate(p.data(), w);
  double s = 0.0;
  for (int j = 0; j < imm.n; ++j) s += w[j] * v[static_cast<std::size_t>(j)];
  return s;
}

double integrand_frequency(const Immersion& imm, const TorusForm& omega) {
  const Vec3 b = imm.speed_bound();
  double f = 0.0;
  for (const auto& [key, c] : omega.terms()) {
    double s = 0.0;
    for (int j = 0; j < imm.n; ++j) s += std::abs(key.k[static_cast<std::size_t>(j)]) * b[static_cast<std::size_t>(j)];
    f = std::max(f, s);
  }
  return f + imm.own_frequency();
}

void check_pairing_inputs(const Immersion& imm, const SuspensionSolenoid& sol, const TransversalMeasureInv& m,
                          const TorusForm& omega) {
  if (omega.degree() != 1) throw DomainError("currents of 1-solenoids pair with 1-forms");
  if (omega.dim() != imm.n) throw DomainError("form lives on a torus of the wrong dimension");
  validate_immersion(imm, sol);
  if (!check_holonomy_invariance(sol.space(), m.raw, sol.map()).invariant)
    throw DomainError("transversal measure is not holonomy invariant");
}

}  // namespace

PairingResult pair_current(const Immersion& imm, const SuspensionSolenoid& sol, const TransversalMeasureInv& m,
                           const TorusForm& omega, const QuadOptions& quad) {
  check_pairing_inputs(imm, sol, m, omega);
  const auto& space = sol.space();
  const auto pts = transversal_quadrature(space, m.raw, quad.circle_bins);
  const std::size_t panels = quad.t_panels > 0 ? quad.t_panels : panels_for_frequency(integrand_frequency(imm, omega));
  // Richardson partner on two thirds of the panels; the full panel count
  // already resolves the frequency to rounding, the partner only just
  const std::size_t partner = std::max<std::size_t>(1, 2 * panels / 3);
  const FormEvaluator ev(omega);
  std::vector<double> coarse(pts.size()), fine(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& x = pts[i].x;
    auto h = [&](double t) { return pulled_back(imm, space, ev, x, t); };
    if (quad.split_half) {
      coarse[i] = pts[i].w * (composite_gauss(h, 0.0, 0.5, partner) + composite_gauss(h, 0.5, 1.0, partner));
      fine[i] = pts[i].w * (composite_gauss(h, 0.0, 0.5, panels) + composite_gauss(h, 0.5, 1.0, panels));
    } else {
      coarse[i] = pts[i].w * composite_gauss(h, 0.0, 1.0, partner);
      fine[i] = pts[i].w * composite_gauss(h, 0.0, 1.0, panels);
    }
  });
  PairingResult r;
  r.value = compensated_sum(fine);
  double scale = 0.0;
  for (double f : fine) scale += std::fabs(f);
  r.quad_error_estimate = std::max(std::fabs(r.value - compensated_sum(coarse)),
                                   64.0 * std::numeric_limits<double>::epsilon() * scale);
  r.nodes_t = panels * 16 * (quad.split_half ? 2 : 1);
  r.cells_x = pts.size();
  return r;
}

ClosednessResult closedness_residual(const Immersion& imm, const SuspensionSolenoid& sol,
                                     const TransversalMeasureInv& m, const TorusForm& eta, const QuadOptions& quad) {
  if (eta.degree() != 0) throw DomainError("closedness test takes a 0-form");
  const auto r = pair_current(imm, sol, m, d(eta), quad);
  ClosednessResult c;
  c.residual = std::fabs(r.value);
  c.bound = std::max(1e-8, 10.0 * r.quad_error_estimate);
  c.ok = c.residual <= c.bound;
  return c;
}

HomologyClass homology_class(const Immersion& imm, const SuspensionSolenoid& sol, const TransversalMeasureInv& m,
                             const QuadOptions& quad) {
  HomologyClass h;
  for (int i = 1; i <= imm.n; ++i) {
    const auto r = pair_current(imm, sol, m, TorusForm::dtheta(imm.n, i), quad);
    h.value.push_back(r.value);
    h.quad_error.push_back(r.quad_error_estimate);
  }
  return h;
}

std::vector<double> asymptotic_cycle(const Immersion& imm, const SuspensionSolenoid& sol, const TransversalPoint& x0,
                                     double horizon) {
  if (!(horizon >= 1.0)) throw DomainError("asymptotic cycle horizon must be at least 1");
  validate_immersion(imm, sol);
  const auto& space = sol.space();
  space.check_point(x0);
  constexpr int kSub = 64;
  const auto n = static_cast<std::size_t>(imm.n);
  std::vector<double> lift(n, 0.0), prev(n);
  Vec3 p = imm.position(space, x0, 0.0);
  for (std::size_t j = 0; j < n; ++j) prev[j] = wrap01(p[j]);
  TransversalPoint x = x0;
  const auto whole = static_cast<std::size_t>(std::floor(horizon));
  const double rest = horizon - static_cast<double>(whole);
  auto advance = [&](double t) {
    const Vec3 q = imm.position(space, x, t);
    for (std::size_t j = 0; j < n; ++j) {
      const double w = wrap01(q[j]);
      const double step = wrap_centered(w - prev[j]);
      if (std::fabs(step) >= 0.5 - 1e-9) throw ConvergenceError("lift step too large for continuation");
      lift[j] += step;
      prev[j] = w;
    }
  };
  for (std::size_t s = 0; s < whole; ++s) {
    for (int i = 1; i < kSub; ++i) advance(static_cast<double>(i) / kSub);
    x = apply_return_map(space, sol.map(), x, 1);
    advance(0.0);
  }
  if (rest > 0.0) {
    const int steps = std::max(1, static_cast<int>(std::ceil(rest * kSub)));
    for (int i = 1; i <= steps; ++i) advance(rest * i / steps);
  }
  for (double& v : lift) v /= horizon;
  return lift;
}

LeafwiseForm pullback_leafwise(const Immersion& imm, const SuspensionSolenoid& sol, const TorusForm& omega) {
  if (omega.degree() != 1 || omega.dim() != imm.n) throw DomainError("pullback needs a 1-form on the target torus");
  const TransversalSpace space = sol.space();
  return LeafwiseForm{1,
                      [imm, space, ev = std::make_shared<const FormEvaluator>(omega)](const TransversalPoint& x, double t) {
                        return pulled_back(imm, space, *ev, x, t);
                      },
                      integrand_frequency(imm, omega)};
}

ConsistencyResult pushforward_consistency(const Immersion& imm, const SuspensionSolenoid& sol,
                                          const TransversalMeasureInv& m, const TorusForm& omega) {
  const auto pc = pair_current(imm, sol, m, omega);
  ConsistencyResult r;
  r.current = pc.value;
  r.leafwise = integrate_leafwise(sol, m, pullback_leafwise(imm, sol, omega));
  r.difference = std::fabs(r.current - r.leafwise);
  r.bound = 1e-9 + 2.0 * pc.quad_error_estimate;
  return r;
}

}  // namespace msol
