#include "msol/dualform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "msol/common.hpp"
#include "msol/quadrature.hpp"

namespace msol {

ThomProfile ThomProfile::make(double r, int codim) {
  if (!(r > 0.0 && r < 0.5)) throw DomainError("Thom radius must be in (0, 0.5)");
  if (codim != 1 && codim != 2) throw DomainError("Thom profiles are provided in codimension 1 and 2");
  return ThomProfile{r, codim};
}

double ThomProfile::peak() const {
  return codim == 1 ? 15.0 / (16.0 * r) : 3.0 / (std::numbers::pi * r * r);
}

double ThomProfile::operator()(double dist) const {
  const double s = dist / r;
  if (!(s < 1.0)) return 0.0;
  const double u = 1.0 - s * s;
  return peak() * u * u;
}

double ThomProfile::fiber_integral() const {
  if (codim == 1) return composite_gauss([this](double v) { return (*this)(std::fabs(v)); }, -r, r, 4);
  return composite_gauss([this](double rho) { return 2.0 * std::numbers::pi * rho * (*this)(rho); }, 0.0, r, 4);
}

GridForm GridForm::zero(int n, int degree, int G) {
  if (n < 1 || n > 3) throw DomainError("grid forms live on T^1..T^3");
  if (degree < 0 || degree > n) throw DomainError("grid form degree out of range");
  if (G < 4) throw DomainError("grid resolution must be at least 4");
  GridForm g;
  g.n = n;
  g.degree = degree;
  g.G = G;
  g.masks = masks_of_degree(n, degree);
  g.comp.assign(g.masks.size(), std::vector<double>(g.nodes(), 0.0));
  return g;
}

std::size_t GridForm::nodes() const {
  std::size_t s = 1;
  for (int a = 0; a < n; ++a) s *= static_cast<std::size_t>(G);
  return s;
}

std::size_t GridForm::component_index(std::uint32_t mask) const {
  const auto it = std::find(masks.begin(), masks.end(), mask);
  if (it == masks.end()) throw DomainError("grid form has no such component");
  return static_cast<std::size_t>(it - masks.begin());
}

double GridForm::max_abs() const {
  double m = 0.0;
  for (const auto& c : comp)
    for (double v : c) m = std::max(m, std::fabs(v));
  return m;
}

namespace {

// Node coordinates for a flat index (axis 0 slowest).
void node_coords(int n, int G, std::size_t idx, int* out) {
  for (int a = n - 1; a >= 0; --a) {
    out[a] = static_cast<int>(idx % static_cast<std::size_t>(G));
    idx /= static_cast<std::size_t>(G);
  }
}

std::size_t flat_index(int n, int G, const int* c) {
  std::size_t idx = 0;
  for (int a = 0; a < n; ++a) idx = idx * static_cast<std::size_t>(G) + static_cast<std::size_t>(c[a]);
  return idx;
}

int mod_index(long v, int G) {
  long r = v % G;
  return static_cast<int>(r < 0 ? r + G : r);
}

}  // namespace

GridForm sample_form(const TorusForm& w, int G) {
  GridForm g = GridForm::zero(w.dim(), w.degree(), G);
  const int n = g.n;
  parallel_for(g.nodes(), [&](std::size_t idx) {
    int c[3];
    node_coords(n, G, idx, c);
    double theta[3];
    for (int a = 0; a < n; ++a) theta[a] = static_cast<double>(c[a]) / G;
    for (std::size_t k = 0; k < g.masks.size(); ++k) g.comp[k][idx] = w.component(g.masks[k], theta);
  });
  return g;
}

GridForm grid_d(const GridForm& g) {
  if (g.degree >= g.n) throw DomainError("grid d of a top-degree form");
  GridForm out = GridForm::zero(g.n, g.degree + 1, g.G);
  const int n = g.n, G = g.G;
  const double scale = 0.5 * G;
  for (std::size_t k = 0; k < g.masks.size(); ++k) {
    const std::uint32_t mask = g.masks[k];
    for (int j = 0; j < n; ++j) {
      if (mask & (1u << j)) continue;
      const int below = std::popcount(mask & ((1u << j) - 1u));
      const double sign = below % 2 == 0 ? 1.0 : -1.0;
      auto& dst = out.comp[out.component_index(mask | (1u << j))];
      const auto& src = g.comp[k];
      parallel_for(g.nodes(), [&](std::size_t idx) {
        int c[3];
        node_coords(n, G, idx, c);
        int cp[3] = {c[0], c[1], c[2]}, cm[3] = {c[0], c[1], c[2]};
        cp[j] = mod_index(c[j] + 1, G);
        cm[j] = mod_index(c[j] - 1, G);
        dst[idx] += sign * scale * (src[flat_index(n, G, cp)] - src[flat_index(n, G, cm)]);
      });
    }
  }
  return out;
}

double grid_wedge_integrate(const GridForm& a, const GridForm& b) {
  if (a.n != b.n || a.G != b.G) throw DomainError("grid forms must share dimension and resolution");
  if (a.degree + b.degree != a.n) throw DomainError("wedge must be a top-degree form to integrate");
  const std::uint32_t full = (1u << a.n) - 1u;
  CompensatedSum s;
  for (std::size_t ka = 0; ka < a.masks.size(); ++ka) {
    for (std::size_t kb = 0; kb < b.masks.size(); ++kb) {
      const std::uint32_t ma = a.masks[ka], mb = b.masks[kb];
      if ((ma & mb) || (ma | mb) != full) continue;
      int inversions = 0;
      for (int i : mask_indices(ma))
        for (int j : mask_indices(mb))
          if (i > j) ++inversions;
      const double sign = inversions % 2 == 0 ? 1.0 : -1.0;
      CompensatedSum part;
      const auto& x = a.comp[ka];
      const auto& y = b.comp[kb];
      for (std::size_t i = 0; i < x.size(); ++i) part.add(x[i] * y[i]);
      s.add(sign * part.value());
    }
  }
  return s.value() / static_cast<double>(a.nodes());
}

double grid_wedge_integrate(const GridForm& a, const TorusForm& b) { return grid_wedge_integrate(a, sample_form(b, a.G)); }

bool has_atoms(const TransversalSpace& space, const RawTransversalMeasure& m) {
  switch (space.kind()) {
    case TransversalKind::Finite: return true;
    case TransversalKind::Circle:
      return std::any_of(m.atoms.begin(), m.atoms.end(), [](const CircleAtom& a) { return a.mass > 0.0; });
    case TransversalKind::CantorPAdic: return false;
  }
  return false;
}

double tube_radius(const Immersion& imm, const SuspensionSolenoid& sol) {
  if (imm.kind == ImmersionKind::DyadicR3) return (2.0 / 3.0) * imm.eps0 * std::ldexp(1.0, -2 * imm.depth);
  const auto& space = sol.space();
  if (space.kind() == TransversalKind::Circle) return 0.25;
  // Compact leaves: closest approach of leaf points at least a quarter leaf
  // length apart along the leaves, or on different leaves.
  struct Sample {
    Vec3 p;
    std::size_t leaf;
    double s;
    double len;
  };
  std::vector<Sample> pts;
  const std::size_t pieces = space.cell_count();
  constexpr int kPer = 64;
  std::vector<bool> seen(pieces, false);
  std::size_t leaf = 0;
  for (std::size_t start = 0; start < pieces; ++start) {
    if (seen[start]) continue;
    std::vector<TransversalPoint> cycle;
    TransversalPoint x = space.kind() == TransversalKind::Finite
                             ? TransversalPoint::finite(start)
                             : TransversalPoint::cantor(cylinder_digits(space.base(), space.depth(), start));
    while (true) {
      const std::size_t id = space.kind() == TransversalKind::Finite ? x.index : cylinder_index(space.base(), x.digits);
      if (seen[id]) break;
      seen[id] = true;
      cycle.push_back(x);
      x = apply_return_map(space, sol.map(), x, 1);
    }
    const double len = static_cast<double>(cycle.size());
    for (std::size_t c = 0; c < cycle.size(); ++c)
      for (int i = 0; i < kPer; ++i) {
        const double t = static_cast<double>(i) / kPer;
        pts.push_back({imm.position(space, cycle[c], t), leaf, static_cast<double>(c) + t, len});
      }
    ++leaf;
  }
  double best = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[i].leaf == pts[j].leaf) {
        const double ds = std::fabs(pts[i].s - pts[j].s);
        if (std::min(ds, pts[i].len - ds) < 0.25) continue;
      }
      double d2 = 0.0;
      for (int a = 0; a < imm.n; ++a) {
        const double dd = wrap_centered(pts[i].p[static_cast<std::size_t>(a)] - pts[j].p[static_cast<std::size_t>(a)]);
        d2 += dd * dd;
      }
      best = std::min(best, std::sqrt(d2));
    }
  return 0.5 * best;
}

namespace {

struct Piece {
  TransversalPoint x;
  double w;
};

std::vector<Piece> leaf_pieces(const SuspensionSolenoid& sol, const RawTransversalMeasure& m, double r,
                               const DualFormOptions& opts) {
  const auto& space = sol.space();
  std::vector<Piece> out;
  switch (space.kind()) {
    case TransversalKind::Finite:
      for (std::size_t i = 0; i < m.weights.size(); ++i)
        if (m.weights[i] > 0.0) out.push_back({TransversalPoint::finite(i), m.weights[i]});
      return out;
    case TransversalKind::CantorPAdic:
      for (std::size_t i = 0; i < m.weights.size(); ++i)
        if (m.weights[i] > 0.0)
          out.push_back({TransversalPoint::cantor(cylinder_digits(space.base(), space.depth(), i)), m.weights[i]});
      return out;
    case TransversalKind::Circle: break;
  }
  const auto rational = sol.map().kind == MapKind::Rotation ? rotation_rationality(sol.map()) : std::nullopt;
  const double target = opts.samples_per_radius / r;
  for (const auto& a : m.atoms)
    if (a.mass > 0.0) out.push_back({TransversalPoint::on_circle(a.x), a.mass});
  RawTransversalMeasure diffuse = m;
  diffuse.atoms.clear();
  if (!(total_mass(diffuse) > 0.0)) return out;
  if (rational) {
    // Bins invariant under the rotation: pieces join end to end.
    const auto q = static_cast<std::size_t>(rational->den);
    const std::size_t bins = q * static_cast<std::size_t>(std::ceil(target / static_cast<double>(q)));
    for (std::size_t b = 0; b < bins; ++b) {
      const double lo = static_cast<double>(b) / static_cast<double>(bins);
      const double hi = static_cast<double>(b + 1) / static_cast<double>(bins);
      const double w = circle_interval_mass(diffuse, lo, hi);
      if (w > 0.0) out.push_back({TransversalPoint::on_circle(0.5 * (lo + hi)), w});
    }
    return out;
  }
  // Minimal case: one leaf traced through `len` returns with a sin^2 taper,
  // so the only ends carry no weight.
  const auto len = static_cast<std::size_t>(std::ceil(target));
  std::vector<double> taper(len);
  for (std::size_t j = 0; j < len; ++j) {
    const double s = std::sin(std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(len));
    taper[j] = s * s;
  }
  const double norm = compensated_sum(taper);
  const double mass = total_mass(diffuse);
  TransversalPoint x = TransversalPoint::on_circle(0.0);
  for (std::size_t j = 0; j < len; ++j) {
    out.push_back({x, mass * taper[j] / norm});
    x = apply_return_map(space, sol.map(), x, 1);
  }
  return out;
}


}  // namespace

DualForm pushforward_dual_form(const Immersion& imm, const SuspensionSolenoid& sol, const TransversalMeasureInv& m,
                               const ThomProfile& profile, int G, const DualFormOptions& opts) {
  validate_immersion(imm, sol);
  if (imm.kind == ImmersionKind::Custom) throw DomainError("dual forms are built for the embedded built-ins only");
  if (!check_holonomy_invariance(sol.space(), m.raw, sol.map()).invariant)
    throw DomainError("transversal measure is not holonomy invariant");
  const int n = imm.n;
  if (profile.codim != n - 1) throw DomainError("Thom profile codimension must be n - 1");
  if (G < 8 || G > 4096) throw DomainError("grid resolution must be in 8..4096");
  const double r = profile.r;
  DualForm out;
  out.r = r;
  out.r1 = tube_radius(imm, sol);
  if (!(r < out.r1))
    throw DomainError("Thom radius " + std::to_string(r) + " is not below the tube radius " + std::to_string(out.r1));
  if (has_atoms(sol.space(), m.raw)) out.warnings.push_back("transversal measure has atoms (compact leaves)");
  out.form = GridForm::zero(n, n - 1, G);

  const auto& space = sol.space();
  const auto pieces = leaf_pieces(sol, m.raw, r, opts);
  out.segments = pieces.size();
  const Vec3 sb = imm.speed_bound();
  const double vmax = std::sqrt(sb[0] * sb[0] + sb[1] * sb[1] + sb[2] * sb[2]);
  // Slabs of parameter length dt, at most r long in space. A node belongs to
  // the slab holding its foot point, so each (piece, node) pair is seen once.
  const auto slabs = static_cast<std::size_t>(std::ceil(vmax / r)) + 1;
  const double dt = 1.0 / static_cast<double>(slabs);
  // Straight leaves: the linear foot estimate is exact, so tight margins.
  const bool straight = imm.kind != ImmersionKind::DyadicR3;
  const double reach = straight ? r * (1.0 + 1e-9) : 1.5 * r + 0.5 * vmax * dt;
  const double slack = straight ? 1e-9 : dt;
  const auto span = static_cast<long>(std::ceil(reach * G));

  const int tile_rows = std::max(1, G / 16);
  const std::size_t tiles = static_cast<std::size_t>((G + tile_rows - 1) / tile_rows);
  const double sign = (n - 1) % 2 == 0 ? 1.0 : -1.0;
  parallel_for(tiles, [&](std::size_t tile) {
    const int row0 = static_cast<int>(tile) * tile_rows;
    const int row1 = std::min(G, row0 + tile_rows);
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      const auto& x = pieces[p].x;
      for (std::size_t s = 0; s < slabs; ++s) {
        const double ta = static_cast<double>(s) * dt;
        const double tb = s + 1 == slabs ? 1.0 : ta + dt;
        const double tm = 0.5 * (ta + tb);
        const Vec3 Pm = imm.position(space, x, tm);
        const Vec3 Vm = imm.velocity(space, x, tm);
        double vm2 = 0.0;
        for (int a = 0; a < n; ++a) vm2 += Vm[static_cast<std::size_t>(a)] * Vm[static_cast<std::size_t>(a)];
        long lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
        for (int a = 0; a < n; ++a) {
          const double c = wrap01(Pm[static_cast<std::size_t>(a)]) * G;
          lo[a] = static_cast<long>(std::floor(c)) - span;
          hi[a] = static_cast<long>(std::ceil(c)) + span;
          if (hi[a] - lo[a] + 1 > G) hi[a] = lo[a] + G - 1;
        }
        int c[3] = {0, 0, 0};
        auto visit = [&]() {
          double q[3] = {0.0, 0.0, 0.0};
          double proj = 0.0, off2 = 0.0;
          for (int a = 0; a < n; ++a) {
            const auto u = static_cast<std::size_t>(a);
            q[a] = static_cast<double>(c[a]) / G;
            const double dd = wrap_centered(q[a] - Pm[u]);
            proj += dd * Vm[u];
            off2 += dd * dd;
          }
          const double tl = tm + proj / vm2;
          if (tl < ta - slack || tl > tb + slack) return;
          if (off2 - proj * proj / vm2 > reach * reach) return;
          // Foot point by Gauss-Newton on |F(t) - q|^2.
          double t = std::clamp(tl, ta, tb);
          Vec3 V{};
          bool ok = false;
          for (int iter = 0; iter < 60; ++iter) {
            const Vec3 P = imm.position(space, x, t);
            V = imm.velocity(space, x, t);
            double g = 0.0, h = 0.0;
            for (int a = 0; a < n; ++a) {
              const auto u = static_cast<std::size_t>(a);
              g += wrap_centered(P[u] - q[a]) * V[u];
              h += V[u] * V[u];
            }
            const double step = g / h;
            t -= step;
            if (t < ta - 2.0 * dt || t > tb + 2.0 * dt) break;
            if (std::fabs(step) < 1e-12) {
              ok = true;
              break;
            }
          }
          if (!ok || t < ta || t >= tb) return;
          const Vec3 P = imm.position(space, x, t);
          V = imm.velocity(space, x, t);
          double d2 = 0.0, v2 = 0.0;
          for (int a = 0; a < n; ++a) {
            const auto u = static_cast<std::size_t>(a);
            const double dd = wrap_centered(P[u] - q[a]);
            d2 += dd * dd;
            v2 += V[u] * V[u];
          }
          const double rho = profile(std::sqrt(d2));
          if (rho == 0.0) return;
          const double scale = sign * rho * pieces[p].w / std::sqrt(v2);
          const std::size_t node = flat_index(n, G, c);
          // i_u vol in the grid component order.
          if (n == 2) {
            out.form.comp[0][node] += -scale * V[1];  // dtheta1
            out.form.comp[1][node] += scale * V[0];   // dtheta2
          } else {
            out.form.comp[0][node] += scale * V[2];   // dtheta1^dtheta2
            out.form.comp[1][node] += -scale * V[1];  // dtheta1^dtheta3
            out.form.comp[2][node] += scale * V[0];   // dtheta2^dtheta3
          }
        };
        // Innermost axis: exact index range where the perpendicular offset is
        // within reach and the linear foot estimate lies near the slab.
        const int last = n - 1;
        const auto ul = static_cast<std::size_t>(last);
        auto inner = [&](const double* d0) {
          double p0 = 0.0, n0 = 0.0;
          for (int a = 0; a < last; ++a) {
            p0 += d0[a] * Vm[static_cast<std::size_t>(a)];
            n0 += d0[a] * d0[a];
          }
          const double vl = Vm[ul];
          double zlo = -reach, zhi = reach;
          // perp^2(z) = n0 + z^2 - (p0 + z vl)^2 / vm2 <= reach^2
          const double A = 1.0 - vl * vl / vm2, B = -2.0 * p0 * vl / vm2, C = n0 - p0 * p0 / vm2 - reach * reach;
          if (A > 1e-12) {
            const double disc = B * B - 4.0 * A * C;
            if (disc < 0.0) return;
            const double sq = std::sqrt(disc);
            zlo = std::max(zlo, (-B - sq) / (2.0 * A));
            zhi = std::min(zhi, (-B + sq) / (2.0 * A));
          } else if (C > 0.0) {
            return;
          }
          // (p0 + z vl) / vm2 in [ta - slack - tm, tb + slack - tm]
          if (std::fabs(vl) > 1e-300) {
            double z1 = ((ta - slack - tm) * vm2 - p0) / vl, z2 = ((tb + slack - tm) * vm2 - p0) / vl;
            if (z1 > z2) std::swap(z1, z2);
            zlo = std::max(zlo, z1);
            zhi = std::min(zhi, z2);
          } else {
            const double tl = tm + p0 / vm2;
            if (tl < ta - slack || tl > tb + slack) return;
          }
          if (zlo > zhi) return;
          const double base = Pm[ul] * G;
          long klo = static_cast<long>(std::ceil(base + zlo * G)) - 1;
          long khi = static_cast<long>(std::floor(base + zhi * G)) + 1;
          if (khi - klo + 1 > G) khi = klo + G - 1;
          for (long k = klo; k <= khi; ++k) {
            c[last] = mod_index(k, G);
            visit();
          }
        };
        double d0[3] = {0.0, 0.0, 0.0};
        for (long i = lo[0]; i <= hi[0]; ++i) {
          c[0] = mod_index(i, G);
          if (c[0] < row0 || c[0] >= row1) continue;
          d0[0] = wrap_centered(static_cast<double>(c[0]) / G - Pm[0]);
          if (n == 2) {
            inner(d0);
            continue;
          }
          for (long j = lo[1]; j <= hi[1]; ++j) {
            c[1] = mod_index(j, G);
            d0[1] = wrap_centered(static_cast<double>(c[1]) / G - Pm[1]);
            inner(d0);
          }
        }
      }
    }
  });
  return out;
}

double fiber_line_integral(const GridForm& g, int axis, int index) {
  if (g.n != 2 || g.degree != 1) throw DomainError("line integrals are provided for 1-forms on T^2");
  if (axis < 1 || axis > 2) throw DomainError("axis must be 1 or 2");
  const int G = g.G;
  const int i0 = mod_index(index, G);
  // The line theta_axis = const runs along the other axis.
  const std::size_t along = axis == 1 ? 1 : 0;
  CompensatedSum s;
  for (int j = 0; j < G; ++j) {
    const int c[2] = {axis == 1 ? i0 : j, axis == 1 ? j : i0};
    s.add(g.comp[along][flat_index(2, G, c)]);
  }
  return s.value() / G;
}

RsReport rsform_check(const Immersion& imm, const SuspensionSolenoid& sol, const TransversalMeasureInv& m, double r,
                      int G, const std::vector<NamedForm>& test_forms, const DualFormOptions& opts) {
  const auto dual = pushforward_dual_form(imm, sol, m, ThomProfile::make(r, imm.n - 1), G, opts);
  RsReport rep;
  for (const auto& tf : test_forms) {
    if (tf.form.degree() != 1) throw DomainError("test forms must be 1-forms");
    if (!d(tf.form).is_zero(1e-12)) throw DomainError("test form " + tf.name + " is not closed");
    RsEntry e;
    e.name = tf.name;
    e.grid = grid_wedge_integrate(dual.form, tf.form);
    e.current = pair_current(imm, sol, m, tf.form).value;
    e.abs_error = std::fabs(e.grid - e.current);
    e.exact_form = std::fabs(e.current) < 1e-9;
    if (e.exact_form) {
      rep.max_abs_exact = std::max(rep.max_abs_exact, e.abs_error);
    } else {
      e.rel_error = e.abs_error / std::fabs(e.current);
      rep.max_rel_error = std::max(rep.max_rel_error, e.rel_error);
    }
    rep.entries.push_back(e);
  }
  rep.closedness = grid_d(dual.form).max_abs();
  rep.closedness_bound = 5.0 / G * dual.form.max_abs();
  return rep;
}

SelfIntersection self_intersection(const Immersion& imm, const SuspensionSolenoid& sol,
                                   const TransversalMeasureInv& m, double r, double r_prime, int G, bool fail_on_atoms,
                                   const DualFormOptions& opts) {
  if (imm.n != 2) throw DomainError("the cup square of a codimension-2 dual form overflows the degree");
  if (r == r_prime) throw DomainError("self-intersection needs two distinct radii");
  SelfIntersection out;
  if (has_atoms(sol.space(), m.raw)) {
    if (fail_on_atoms) throw DomainError("transversal measure has atoms (compact leaves)");
    out.warnings.push_back("transversal measure has atoms: compact leaves, vanishing is not guaranteed");
  }
  const auto a = pushforward_dual_form(imm, sol, m, ThomProfile::make(r, 1), G, opts);
  const auto b = pushforward_dual_form(imm, sol, m, ThomProfile::make(r_prime, 1), G, opts);
  out.value = grid_wedge_integrate(a.form, b.form);
  return out;
}

FlowboxBound flowbox_refinement_bound(const Immersion& imm, const SuspensionSolenoid& sol,
                                      const RawTransversalMeasure& m, int depth, double r) {
  if (depth < 0) throw DomainError("cover depth must be nonnegative");
  const auto& space = sol.space();
  validate_measure(space, m);
  const int level = space.kind() == TransversalKind::CantorPAdic ? std::min(depth, space.depth()) : depth;
  const Vec3 sb = imm.speed_bound();
  FlowboxBound fb;
  fb.c0 = ThomProfile::make(r, imm.n - 1).peak() * std::sqrt(sb[0] * sb[0] + sb[1] * sb[1] + sb[2] * sb[2]);
  CompensatedSum s;
  for (const auto& cell : uniform_cells(space, level)) {
    const double mc = cell_mass(space, m, cell);
    fb.bounds.push_back(fb.c0 * mc * mc);
    s.add(fb.bounds.back());
  }
  fb.sum = s.value();
  return fb;
}

}  // namespace msol
