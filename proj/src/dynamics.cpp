#include "msol/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msol/common.hpp"

namespace msol {

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::Rotation: return "rotation";
    case MapKind::Odometer: return "odometer";
    case MapKind::CircleDiffeo: return "circle_diffeo";
    case MapKind::FinitePermutation: return "permutation";
  }
  return "?";
}

ReturnMap ReturnMap::rotation(double alpha) {
  if (!std::isfinite(alpha)) throw DomainError("rotation angle must be finite");
  ReturnMap m;
  m.kind = MapKind::Rotation;
  m.alpha = wrap01(alpha);
  m.alpha_turns = turns_from_coordinate(m.alpha);
  return m;
}

ReturnMap ReturnMap::rotation_rational(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw DomainError("rational rotation needs a positive denominator");
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num /= g;
  den /= g;
  const std::int64_t r = ((num % den) + den) % den;
  ReturnMap m;
  m.kind = MapKind::Rotation;
  m.alpha = static_cast<double>(r) / static_cast<double>(den);
  const unsigned __int128 shifted = static_cast<unsigned __int128>(static_cast<std::uint64_t>(r)) << 64;
  const auto d = static_cast<unsigned __int128>(den);
  m.alpha_turns = static_cast<std::uint64_t>((shifted + d / 2) / d);
  m.declared_rational = Rational{r, den};
  return m;
}

ReturnMap ReturnMap::odometer(int p) {
  if (p < 2) throw DomainError("odometer base must be >= 2");
  ReturnMap m;
  m.kind = MapKind::Odometer;
  m.p = p;
  return m;
}

ReturnMap ReturnMap::circle_diffeo(double amplitude, int frequency) {
  if (frequency < 1) throw DomainError("circle diffeomorphism frequency must be >= 1");
  if (!std::isfinite(amplitude) || amplitude == 0.0) throw DomainError("circle diffeomorphism amplitude must be nonzero");
  if (std::fabs(kTwoPi * frequency * amplitude) >= 1.0) throw DomainError("need |2 pi m a| < 1 for a diffeomorphism");
  ReturnMap m;
  m.kind = MapKind::CircleDiffeo;
  m.amplitude = amplitude;
  m.frequency = frequency;
  return m;
}

ReturnMap ReturnMap::permutation(std::vector<std::size_t> sigma) {
  std::vector<bool> seen(sigma.size(), false);
  for (std::size_t s : sigma) {
    if (s >= sigma.size() || seen[s]) throw DomainError("sigma is not a permutation");
    seen[s] = true;
  }
  ReturnMap m;
  m.kind = MapKind::FinitePermutation;
  m.sigma = std::move(sigma);
  return m;
}

ReturnMap ReturnMap::inverse() const {
  ReturnMap m = *this;
  switch (kind) {
    case MapKind::Rotation:
      m.alpha = wrap01(-alpha);
      m.alpha_turns = ~alpha_turns + 1;
      if (declared_rational) m.declared_rational = Rational{(declared_rational->den - declared_rational->num) % declared_rational->den, declared_rational->den};
      return m;
    case MapKind::FinitePermutation:
      for (std::size_t i = 0; i < sigma.size(); ++i) m.sigma[sigma[i]] = i;
      return m;
    case MapKind::Odometer:
    case MapKind::CircleDiffeo:
      break;
  }
  throw DomainError("inverse map is not in the built-in family");
}

void check_compatible(const TransversalSpace& space, const ReturnMap& map) {
  switch (map.kind) {
    case MapKind::Rotation:
    case MapKind::CircleDiffeo:
      if (space.kind() != TransversalKind::Circle) throw DomainError(to_string(map.kind) + " acts on the circle only");
      return;
    case MapKind::Odometer:
      if (space.kind() != TransversalKind::CantorPAdic) throw DomainError("odometer acts on p-adic transversals only");
      if (space.base() != map.p) throw DomainError("odometer base differs from the transversal base");
      return;
    case MapKind::FinitePermutation:
      if (space.kind() != TransversalKind::Finite) throw DomainError("permutation acts on finite transversals only");
      if (map.sigma.size() != space.points().size()) throw DomainError("permutation size differs from the point count");
      return;
  }
}

double circle_lift(const ReturnMap& map, double x) {
  switch (map.kind) {
    case MapKind::Rotation: return x + map.alpha;
    case MapKind::CircleDiffeo: return x + map.amplitude * std::sin(kTwoPi * map.frequency * x);
    default: throw DomainError("not a circle map");
  }
}

double circle_lift_inverse(const ReturnMap& map, double y) {
  switch (map.kind) {
    case MapKind::Rotation: return y - map.alpha;
    case MapKind::CircleDiffeo: {
      const double w = kTwoPi * map.frequency;
      double x = y - map.amplitude * std::sin(w * y);
      for (int it = 0; it < 30; ++it) {
        const double g = x + map.amplitude * std::sin(w * x) - y;
        const double dg = 1.0 + map.amplitude * w * std::cos(w * x);
        const double step = g / dg;
        x -= step;
        if (std::fabs(step) < 1e-14) break;
      }
      return x;
    }
    default: throw DomainError("not a circle map");
  }
}

namespace {

std::size_t mod_add(std::size_t value, std::int64_t n, std::size_t modulus) {
  const auto m = static_cast<std::int64_t>(modulus);
  std::int64_t r = (static_cast<std::int64_t>(value) + n % m) % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

}  // namespace

TransversalPoint apply_return_map(const TransversalSpace& space, const ReturnMap& map, const TransversalPoint& pt,
                                  std::int64_t n) {
  check_compatible(space, map);
  space.check_point(pt);
  switch (map.kind) {
    case MapKind::Rotation:
      return TransversalPoint::from_turns(pt.turns + static_cast<std::uint64_t>(n) * map.alpha_turns);
    case MapKind::Odometer: {
      const std::size_t size = space.cell_count();
      const std::size_t idx = mod_add(cylinder_index(map.p, pt.digits), n, size);
      return TransversalPoint::cantor(cylinder_digits(map.p, space.depth(), idx));
    }
    case MapKind::FinitePermutation: {
      std::size_t i = pt.index;
      if (n >= 0) {
        for (std::int64_t k = 0; k < n; ++k) i = map.sigma[i];
      } else {
        const ReturnMap inv = map.inverse();
        for (std::int64_t k = 0; k < -n; ++k) i = inv.sigma[i];
      }
      return TransversalPoint::finite(i);
    }
    case MapKind::CircleDiffeo: {
      double x = pt.circle_coordinate();
      if (n >= 0) {
        for (std::int64_t k = 0; k < n; ++k) x = wrap01(circle_lift(map, x));
      } else {
        for (std::int64_t k = 0; k < -n; ++k) x = wrap01(circle_lift_inverse(map, x));
      }
      return TransversalPoint::on_circle(x);
    }
  }
  return pt;
}

double evaluate_observable(const TransversalSpace& space, const Observable& obs, const TransversalPoint& pt) {
  switch (obs.kind) {
    case Observable::Kind::Trig: return obs.poly(embed_point(space, pt));
    case Observable::Kind::CylinderIndicator: {
      if (obs.prefix.size() > pt.digits.size()) throw DomainError("cylinder prefix longer than the point's digits");
      return std::equal(obs.prefix.begin(), obs.prefix.end(), pt.digits.begin()) ? 1.0 : 0.0;
    }
    case Observable::Kind::PointIndicator: return pt.index == obs.index ? 1.0 : 0.0;
  }
  return 0.0;
}

double observable_expectation(const TransversalSpace& space, const RawTransversalMeasure& m, const Observable& obs) {
  CompensatedSum s;
  switch (obs.kind) {
    case Observable::Kind::PointIndicator: return m.weights.at(obs.index);
    case Observable::Kind::CylinderIndicator: return cell_mass(space, m, TransversalCell::cylinder(obs.prefix));
    case Observable::Kind::Trig:
      switch (space.kind()) {
        case TransversalKind::Finite:
          for (std::size_t i = 0; i < m.weights.size(); ++i) s.add(m.weights[i] * obs.poly(space.points()[i]));
          break;
        case TransversalKind::CantorPAdic:
          for (std::size_t i = 0; i < m.weights.size(); ++i)
            s.add(m.weights[i] * obs.poly(embed_cylinder(space.base(), cylinder_digits(space.base(), space.depth(), i)).lo));
          break;
        case TransversalKind::Circle: {
          // Product of trig polynomials: only the matching frequencies survive integration.
          const auto& d = m.density;
          const auto& p = obs.poly;
          s.add(d.constant * p.constant);
          for (std::size_t k = 0; k < std::min(d.cos_coeffs.size(), p.cos_coeffs.size()); ++k)
            s.add(0.5 * d.cos_coeffs[k] * p.cos_coeffs[k]);
          for (std::size_t k = 0; k < std::min(d.sin_coeffs.size(), p.sin_coeffs.size()); ++k)
            s.add(0.5 * d.sin_coeffs[k] * p.sin_coeffs[k]);
          const auto bins = static_cast<double>(m.histogram.size());
          for (std::size_t b = 0; b < m.histogram.size(); ++b) {
            const double lo = static_cast<double>(b) / bins, hi = static_cast<double>(b + 1) / bins;
            s.add(m.histogram[b] * bins * p.integrate(lo, hi));
          }
          for (const auto& a : m.atoms) s.add(a.mass * p(a.x));
          break;
        }
      }
      return s.value();
  }
  return 0.0;
}

double birkhoff_average(const TransversalSpace& space, const ReturnMap& map, const Observable& obs,
                        const TransversalPoint& x0, std::size_t n_steps) {
  if (n_steps < 1) throw DomainError("Birkhoff average needs N >= 1");
  check_compatible(space, map);
  CompensatedSum s;
  TransversalPoint x = x0;
  for (std::size_t n = 0; n < n_steps; ++n) {
    s.add(evaluate_observable(space, obs, x));
    if (n + 1 < n_steps) x = apply_return_map(space, map, x, 1);
  }
  return s.value() / static_cast<double>(n_steps);
}

ContinuedFraction continued_fraction(double alpha, int max_terms, double den_cap) {
  ContinuedFraction cf;
  alpha = wrap01(alpha);
  if (alpha == 0.0) {
    cf.terms = {0};
    cf.terminated = true;
    return cf;
  }
  int exp2 = 0;
  const double mant = std::frexp(alpha, &exp2);  // alpha = mant * 2^exp2
  const auto m53 = static_cast<std::uint64_t>(std::ldexp(mant, 53));
  const int shift = 53 - exp2;  // alpha = m53 / 2^shift
  cf.terms.push_back(0);
  if (shift > 120) {
    // First partial quotient exceeds any usable denominator cap.
    return cf;
  }
  using u128 = unsigned __int128;
  u128 num = m53;
  u128 den = u128{1} << shift;
  // alpha = num/den < 1, so a_0 = 0 and we continue with den/num.
  u128 q_prev = 1, q_prev2 = 0;  // convergent denominators q_{-1}=0, q_0=1
  std::int64_t p_prev = 0, p_prev2 = 1;
  while (static_cast<int>(cf.terms.size()) < max_terms + 1) {
    const u128 a = den / num;
    const u128 r = den % num;
    const u128 q = a * q_prev + q_prev2;
    if (static_cast<double>(q) > den_cap) return cf;
    const std::int64_t pn = static_cast<std::int64_t>(a) * p_prev + p_prev2;
    cf.terms.push_back(static_cast<std::uint64_t>(a));
    q_prev2 = q_prev;
    q_prev = q;
    p_prev2 = p_prev;
    p_prev = pn;
    if (r == 0) {
      cf.terminated = true;
      cf.num = p_prev;
      cf.den = static_cast<std::int64_t>(q_prev);
      return cf;
    }
    den = num;
    num = r;
  }
  return cf;
}

std::optional<Rational> rotation_rationality(const ReturnMap& map) {
  if (map.kind != MapKind::Rotation) return std::nullopt;
  if (map.declared_rational) return map.declared_rational;
  const ContinuedFraction cf = continued_fraction(map.alpha);
  if (!cf.terminated) return std::nullopt;
  if (map.alpha == 0.0) return Rational{0, 1};
  return Rational{cf.num, cf.den};
}

std::vector<std::vector<std::size_t>> permutation_cycles(const std::vector<std::size_t>& sigma) {
  std::vector<std::vector<std::size_t>> cycles;
  std::vector<bool> seen(sigma.size(), false);
  for (std::size_t start = 0; start < sigma.size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> c;
    for (std::size_t i = start; !seen[i]; i = sigma[i]) {
      seen[i] = true;
      c.push_back(i);
    }
    cycles.push_back(std::move(c));
  }
  return cycles;
}

namespace {

struct UlamRow {
  std::size_t first = 0;  // target bin of w[0]; later entries follow cyclically
  std::vector<double> w;
};

std::vector<UlamRow> ulam_rows(const ReturnMap& map, std::size_t bins) {
  const auto B = static_cast<double>(bins);
  std::vector<UlamRow> rows(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    const double a = static_cast<double>(i) / B, b = static_cast<double>(i + 1) / B;
    const double fa = circle_lift(map, a), fb = circle_lift(map, b);
    const auto j0 = static_cast<std::int64_t>(std::floor(fa * B));
    const auto j1 = static_cast<std::int64_t>(std::ceil(fb * B));
    UlamRow row;
    bool have_first = false;
    double s_lo = a;
    for (std::int64_t j = j0; j < j1; ++j) {
      const double d = static_cast<double>(j + 1) / B;
      const double s_hi = (d >= fb) ? b : circle_lift_inverse(map, d);
      const double weight = std::max(0.0, (s_hi - s_lo) * B);
      const std::int64_t jm = ((j % static_cast<std::int64_t>(bins)) + static_cast<std::int64_t>(bins)) % static_cast<std::int64_t>(bins);
      if (!have_first) {
        if (weight <= 1e-14) {
          s_lo = s_hi;
          continue;
        }
        row.first = static_cast<std::size_t>(jm);
        have_first = true;
      }
      row.w.push_back(weight);
      s_lo = s_hi;
      if (d >= fb) break;
    }
    while (!row.w.empty() && row.w.back() <= 1e-14) row.w.pop_back();
    rows[i] = std::move(row);
  }
  return rows;
}

std::vector<double> ulam_step(const std::vector<UlamRow>& rows, const std::vector<double>& v) {
  const std::size_t n = rows.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] == 0.0) continue;
    std::size_t j = rows[i].first;
    for (double w : rows[i].w) {
      out[j] += v[i] * w;
      if (++j == n) j = 0;
    }
  }
  return out;
}

double l1_diff(const std::vector<double>& a, const std::vector<double>& b) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(std::fabs(a[i] - b[i]));
  return s.value();
}

// Lazy power iteration v <- (v + vP)/2, same fixed points as P, aperiodic.
std::vector<double> stationary_from(const std::vector<UlamRow>& rows, std::vector<double> v, const UlamOptions& opts,
                                    std::size_t& iterations) {
  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    std::vector<double> pv = ulam_step(rows, v);
    for (std::size_t i = 0; i < v.size(); ++i) pv[i] = 0.5 * (pv[i] + v[i]);
    const double diff = l1_diff(pv, v);
    v = std::move(pv);
    iterations = std::max(iterations, it + 1);
    if (diff < opts.power_iter_tol) return v;
  }
  throw ConvergenceError("Ulam power iteration did not converge within max_iters");
}

// Strongly connected components that have no outgoing edges.
std::vector<std::vector<std::size_t>> closed_classes(const std::vector<UlamRow>& rows) {
  const std::size_t n = rows.size();
  auto targets = [&](std::size_t i) {
    std::vector<std::size_t> t;
    std::size_t j = rows[i].first;
    for (double w : rows[i].w) {
      if (w > 1e-14) t.push_back(j);
      if (++j == n) j = 0;
    }
    return t;
  };
  std::vector<std::vector<std::size_t>> adj(n), radj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : targets(i)) {
      adj[i].push_back(j);
      radj[j].push_back(i);
    }
  // Kosaraju, iterative.
  std::vector<std::size_t> order;
  std::vector<bool> seen(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    seen[s] = true;
    while (!stack.empty()) {
      auto& [v, k] = stack.back();
      if (k < adj[v].size()) {
        const std::size_t w = adj[v][k++];
        if (!seen[w]) {
          seen[w] = true;
          stack.emplace_back(w, 0);
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<std::size_t> comp(n, n);
  std::size_t ncomp = 0;
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t s = order[k];
    if (comp[s] != n) continue;
    std::vector<std::size_t> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : radj[v])
        if (comp[w] == n) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
    }
    ++ncomp;
  }
  std::vector<bool> closed(ncomp, true);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : adj[i])
      if (comp[j] != comp[i]) closed[comp[i]] = false;
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> index(ncomp, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!closed[comp[i]]) continue;
    if (index[comp[i]] == n) {
      index[comp[i]] = out.size();
      out.emplace_back();
    }
    out[index[comp[i]]].push_back(i);
  }
  return out;
}

double circular_mean(const std::vector<double>& masses) {
  const auto B = static_cast<double>(masses.size());
  double c = 0.0, s = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const double x = (static_cast<double>(i) + 0.5) / B;
    c += masses[i] * std::cos(kTwoPi * x);
    s += masses[i] * std::sin(kTwoPi * x);
  }
  return wrap01(std::atan2(s, c) / kTwoPi);
}

}  // namespace

UlamResult ulam_invariant_measure(const ReturnMap& map, const UlamOptions& opts) {
  if (map.kind != MapKind::Rotation && map.kind != MapKind::CircleDiffeo)
    throw DomainError("Ulam method is implemented for circle maps");
  if (opts.bins < 2) throw DomainError("Ulam method needs at least 2 bins");
  UlamResult res;
  res.bins = opts.bins;
  const auto rows = ulam_rows(map, opts.bins);
  for (const auto& r : rows) res.max_row_sum_error = std::max(res.max_row_sum_error, std::fabs(compensated_sum(r.w) - 1.0));

  std::vector<double> uniform(opts.bins, 1.0 / static_cast<double>(opts.bins));
  res.stationary = stationary_from(rows, uniform, opts, res.iterations);
  const std::vector<double> next = ulam_step(rows, res.stationary);
  const double norm = compensated_sum(res.stationary);
  res.eigenvalue = compensated_sum(next) / norm;
  res.eigen_residual = l1_diff(next, res.stationary);

  auto classes = closed_classes(rows);
  res.closed_classes = classes.size();

  // Merge classes whose supports touch (a fixed point on a bin boundary
  // leaves one absorbing bin on each side).
  const std::size_t n = opts.bins;
  std::vector<std::size_t> owner(n, classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (std::size_t i : classes[c]) owner[i] = c;
  std::vector<std::size_t> parent(classes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  if (classes.size() <= 64) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      if (owner[i] < classes.size() && owner[j] < classes.size()) parent[find(owner[i])] = find(owner[j]);
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> group_of(classes.size(), classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const std::size_t r = find(c);
    if (group_of[r] == classes.size()) {
      group_of[r] = groups.size();
      groups.emplace_back();
    }
    groups[group_of[r]].insert(groups[group_of[r]].end(), classes[c].begin(), classes[c].end());
  }
  if (groups.size() > 64) return res;  // continuum of components: no per-component report
  for (const auto& g : groups) {
    std::vector<double> start(n, 0.0);
    for (std::size_t i : g) start[i] = 1.0 / static_cast<double>(g.size());
    UlamComponent comp;
    comp.bin_masses = stationary_from(rows, start, opts, res.iterations);
    const double total = compensated_sum(comp.bin_masses);
    for (double& v : comp.bin_masses) v /= total;
    comp.center = circular_mean(comp.bin_masses);
    comp.atom = *std::max_element(comp.bin_masses.begin(), comp.bin_masses.end()) > 0.5;
    res.components.push_back(std::move(comp));
  }
  return res;
}

std::vector<FixedPoint> circle_diffeo_fixed_points(const ReturnMap& map) {
  if (map.kind != MapKind::CircleDiffeo) throw DomainError("fixed points are enumerated for circle diffeomorphisms");
  std::vector<FixedPoint> out;
  const int count = 2 * map.frequency;
  for (int j = 0; j < count; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(count);
    const double deriv = 1.0 + kTwoPi * map.frequency * map.amplitude * (j % 2 == 0 ? 1.0 : -1.0);
    out.push_back({x, deriv, deriv < 1.0});
  }
  return out;
}

InvariantMeasures invariant_measures(const TransversalSpace& space, const ReturnMap& map, const UlamOptions& opts) {
  check_compatible(space, map);
  InvariantMeasures res;
  switch (map.kind) {
    case MapKind::Odometer:
      res.measures.push_back({RawTransversalMeasure::haar(space), true, "Haar measure"});
      break;
    case MapKind::FinitePermutation: {
      for (const auto& cycle : permutation_cycles(map.sigma)) {
        std::vector<double> w(space.points().size(), 0.0);
        for (std::size_t i : cycle) w[i] = 1.0 / static_cast<double>(cycle.size());
        res.measures.push_back({RawTransversalMeasure::finite_weights(std::move(w)), true,
                                "uniform on a cycle of length " + std::to_string(cycle.size())});
      }
      break;
    }
    case MapKind::Rotation: {
      res.ulam = ulam_invariant_measure(map, opts);
      if (auto q = rotation_rationality(map)) {
        res.measures.push_back({RawTransversalMeasure::circle_histogram(res.ulam->stationary), false,
                                "Ulam measure of a rational rotation"});
        res.warnings.push_back("rational rotation " + std::to_string(q->num) + "/" + std::to_string(q->den) +
                               ": continuum of invariant measures, no complete ergodic decomposition reported");
      } else {
        res.measures.push_back({RawTransversalMeasure::lebesgue(), true, "Lebesgue measure"});
      }
      break;
    }
    case MapKind::CircleDiffeo: {
      const auto fixed = circle_diffeo_fixed_points(map);
      for (const auto& f : fixed)
        res.measures.push_back({RawTransversalMeasure::circle(TrigPoly{}, {{f.x, 1.0}}), true,
                                std::string(f.attracting ? "attracting" : "repelling") + " fixed point"});
      // Ulam cross-check at two consecutive odd refinements; odd bin counts
      // put x = 1/2 at a bin centre.
      UlamOptions coarse = opts;
      coarse.bins = opts.bins | 1U;
      UlamOptions fine = opts;
      fine.bins = 2 * coarse.bins + 1;
      const UlamResult u1 = ulam_invariant_measure(map, coarse);
      const UlamResult u2 = ulam_invariant_measure(map, fine);
      const double tol = 2.0 / static_cast<double>(coarse.bins);
      for (const auto& c1 : u1.components) {
        if (!c1.atom) continue;
        for (const auto& c2 : u2.components)
          if (c2.atom && std::fabs(wrap_centered(c2.center - c1.center)) < tol) {
            res.ulam_atoms.push_back(c2.center);
            break;
          }
      }
      std::size_t attracting = 0;
      for (const auto& f : fixed) attracting += f.attracting ? 1 : 0;
      bool ok = res.ulam_atoms.size() == attracting;
      for (double a : res.ulam_atoms) {
        bool near = false;
        for (const auto& f : fixed)
          if (f.attracting && std::fabs(wrap_centered(a - f.x)) < tol) near = true;
        ok = ok && near;
      }
      res.ulam_cross_check = ok;
      if (!ok) res.warnings.push_back("Ulam atoms do not match the attracting fixed points");
      res.ulam = u1;
      break;
    }
  }
  return res;
}

DynamicsReport classify_dynamics(const TransversalSpace& space, const ReturnMap& map, const UlamOptions& opts) {
  check_compatible(space, map);
  DynamicsReport rep;
  rep.tolerances = opts;
  InvariantMeasures inv = invariant_measures(space, map, opts);
  rep.ergodic_measures = inv.measures;
  rep.warnings = inv.warnings;
  rep.method = "exact";
  switch (map.kind) {
    case MapKind::Rotation:
      if (auto q = rotation_rationality(map)) {
        rep.minimal = false;
        rep.uniquely_ergodic = false;
        rep.period = q->den;
        rep.method = "ulam";
      } else {
        rep.minimal = true;
        rep.uniquely_ergodic = true;
      }
      break;
    case MapKind::Odometer:
      rep.minimal = true;
      rep.uniquely_ergodic = true;
      break;
    case MapKind::FinitePermutation: {
      const bool single = permutation_cycles(map.sigma).size() == 1;
      rep.minimal = single;
      rep.uniquely_ergodic = single;
      break;
    }
    case MapKind::CircleDiffeo:
      rep.minimal = false;
      rep.uniquely_ergodic = false;
      break;
  }
  return rep;
}

double unique_ergodicity_deviation(const TransversalSpace& space, const ReturnMap& map,
                                   const std::vector<Observable>& observables,
                                   const std::vector<TransversalPoint>& sample_points, std::size_t n_steps,
                                   const std::optional<std::vector<double>>& space_averages) {
  if (n_steps < 1) throw DomainError("deviation needs N >= 1");
  std::vector<double> averages;
  if (space_averages) {
    if (space_averages->size() != observables.size()) throw DomainError("one space average per observable");
    averages = *space_averages;
  } else {
    const auto inv = invariant_measures(space, map);
    for (const auto& obs : observables) {
      CompensatedSum s;
      for (const auto& em : inv.measures)
        s.add(observable_expectation(space, em.measure, obs) / total_mass(em.measure));
      averages.push_back(s.value() / static_cast<double>(inv.measures.size()));
    }
  }
  std::vector<double> worst(sample_points.size(), 0.0);
  parallel_for(sample_points.size(), [&](std::size_t i) {
    for (std::size_t k = 0; k < observables.size(); ++k) {
      const double b = birkhoff_average(space, map, observables[k], sample_points[i], n_steps);
      worst[i] = std::max(worst[i], std::fabs(b - averages[k]));
    }
  });
  double m = 0.0;
  for (double w : worst) m = std::max(m, w);
  return m;
}

}  // namespace msol
