#include "msol/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <type_traits>

#include "msol/common.hpp"
#include "msol/rng.hpp"

namespace msol {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string join(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& need(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(join(path, key), "missing field");
  return *it;
}

double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

long long as_int(const Json& j, const std::string& path) {
  if (j.is_number_integer() || j.is_number_unsigned()) return j.get<long long>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v == std::floor(v) && std::fabs(v) < 9e15) return static_cast<long long>(v);
  }
  throw ConfigError(path, "expected an integer");
}

std::vector<double> as_doubles(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_double(j[i], join(path, i)));
  return out;
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

// Rejects keys outside `keys`, so a misspelt option is not silently ignored.
void allow(const Json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      throw ConfigError(join(path, it.key()), "unknown field");
}

// Runs a library constructor, turning its DomainError into a ConfigError at `path`.
template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

TrigPoly parse_trig(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected {\"const\", \"cos\", \"sin\"}");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "const" && it.key() != "cos" && it.key() != "sin")
      throw ConfigError(join(path, it.key()), "unknown field");
  TrigPoly p;
  if (j.contains("const")) p.constant = as_double(j["const"], join(path, "const"));
  if (j.contains("cos")) p.cos_coeffs = as_doubles(j["cos"], join(path, "cos"));
  if (j.contains("sin")) p.sin_coeffs = as_doubles(j["sin"], join(path, "sin"));
  if (p.max_frequency() > 64) throw ConfigError(path, "density frequency exceeds the cap 64");
  return p;
}

Json doubles_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

TransversalSpace parse_transversal(const Json& j, const std::string& path) {
  const std::string kind = as_string(need(j, "kind", path), join(path, "kind"));
  allow(j, path, {"kind", "points", "p", "depth"});
  if (kind == "circle") return TransversalSpace::circle();
  if (kind == "finite") {
    const auto pts = as_doubles(need(j, "points", path), join(path, "points"));
    return guarded(join(path, "points"), [&] { return TransversalSpace::finite(pts); });
  }
  if (kind == "cantor") {
    const auto p = as_int(need(j, "p", path), join(path, "p"));
    if (p < 2) throw ConfigError(join(path, "p"), "p-adic base must be >= 2");
    const auto depth = as_int(need(j, "depth", path), join(path, "depth"));
    if (depth < 1) throw ConfigError(join(path, "depth"), "depth must be >= 1");
    return guarded(path, [&] { return TransversalSpace::cantor(static_cast<int>(p), static_cast<int>(depth)); });
  }
  throw ConfigError(join(path, "kind"), "unknown transversal kind '" + kind + "'");
}

ReturnMap parse_map(const Json& j, const std::string& path) {
  const std::string kind = as_string(need(j, "kind", path), join(path, "kind"));
  allow(j, path, {"kind", "real", "rational", "p", "a", "m", "sigma"});
  if (kind == "rotation") {
    if (j.contains("rational")) {
      const auto& q = j["rational"];
      const std::string qp = join(path, "rational");
      if (!q.is_array() || q.size() != 2) throw ConfigError(qp, "expected [num, den]");
      const auto num = as_int(q[0], join(qp, 0));
      const auto den = as_int(q[1], join(qp, 1));
      return guarded(qp, [&] { return ReturnMap::rotation_rational(num, den); });
    }
    const double a = as_double(need(j, "real", path), join(path, "real"));
    return guarded(join(path, "real"), [&] { return ReturnMap::rotation(a); });
  }
  if (kind == "odometer") {
    const auto p = as_int(need(j, "p", path), join(path, "p"));
    return guarded(join(path, "p"), [&] { return ReturnMap::odometer(static_cast<int>(p)); });
  }
  if (kind == "circle_diffeo") {
    const double a = as_double(need(j, "a", path), join(path, "a"));
    const auto m = as_int(need(j, "m", path), join(path, "m"));
    return guarded(path, [&] { return ReturnMap::circle_diffeo(a, static_cast<int>(m)); });
  }
  if (kind == "permutation") {
    const auto& s = need(j, "sigma", path);
    const std::string sp = join(path, "sigma");
    if (!s.is_array()) throw ConfigError(sp, "expected an array of indices");
    std::vector<std::size_t> sigma;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto v = as_int(s[i], join(sp, i));
      if (v < 0) throw ConfigError(join(sp, i), "index must be nonnegative");
      sigma.push_back(static_cast<std::size_t>(v));
    }
    return guarded(sp, [&] { return ReturnMap::permutation(sigma); });
  }
  throw ConfigError(join(path, "kind"), "unknown map kind '" + kind + "'");
}

TransversalPoint parse_point(const Json& j, const TransversalSpace& space, const std::string& path) {
  TransversalPoint pt;
  switch (space.kind()) {
    case TransversalKind::Circle: {
      const double x = as_double(j, path);
      pt = TransversalPoint::on_circle(x);
      break;
    }
    case TransversalKind::Finite: {
      const auto i = as_int(j.is_object() ? need(j, "index", path) : j, path);
      if (i < 0) throw ConfigError(path, "point index must be nonnegative");
      pt = TransversalPoint::finite(static_cast<std::size_t>(i));
      break;
    }
    case TransversalKind::CantorPAdic: {
      if (!j.is_array()) throw ConfigError(path, "expected a digit array");
      std::vector<int> digits;
      for (std::size_t i = 0; i < j.size(); ++i) digits.push_back(static_cast<int>(as_int(j[i], join(path, i))));
      pt = TransversalPoint::cantor(digits);
      break;
    }
  }
  guarded(path, [&] {
    space.check_point(pt);
    return 0;
  });
  return pt;
}

RawTransversalMeasure parse_raw_measure(const Json& j, const TransversalSpace& space, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected a measure object");
  allow(j, path, {"kind", "weights", "cylinder_weights", "histogram", "density", "atoms", "scale"});
  RawTransversalMeasure m;
  if (j.contains("kind")) {
    const std::string kind = as_string(j["kind"], join(path, "kind"));
    if (kind == "lebesgue") {
      if (space.kind() != TransversalKind::Circle) throw ConfigError(join(path, "kind"), "lebesgue needs a circle transversal");
      m = RawTransversalMeasure::lebesgue();
    } else if (kind == "haar") {
      m = guarded(join(path, "kind"), [&] { return RawTransversalMeasure::haar(space); });
    } else {
      throw ConfigError(join(path, "kind"), "unknown measure kind '" + kind + "'");
    }
  } else if (j.contains("weights")) {
    m = RawTransversalMeasure::finite_weights(as_doubles(j["weights"], join(path, "weights")));
  } else if (j.contains("cylinder_weights")) {
    m = RawTransversalMeasure::cylinder_weights(as_doubles(j["cylinder_weights"], join(path, "cylinder_weights")));
  } else if (j.contains("histogram")) {
    m = RawTransversalMeasure::circle_histogram(as_doubles(j["histogram"], join(path, "histogram")));
  } else if (j.contains("density") || j.contains("atoms")) {
    TrigPoly density;
    if (j.contains("density")) density = parse_trig(j["density"], join(path, "density"));
    std::vector<CircleAtom> atoms;
    if (j.contains("atoms")) {
      const auto& a = j["atoms"];
      const std::string ap = join(path, "atoms");
      if (!a.is_array()) throw ConfigError(ap, "expected [[x, mass], ...]");
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_array() || a[i].size() != 2) throw ConfigError(join(ap, i), "expected [x, mass]");
        atoms.push_back({as_double(a[i][0], join(join(ap, i), 0)), as_double(a[i][1], join(join(ap, i), 1))});
      }
    }
    m = RawTransversalMeasure::circle(density, atoms);
  } else {
    throw ConfigError(path, "expected one of kind, weights, cylinder_weights, histogram, density, atoms");
  }
  if (j.contains("scale")) m = m.scaled(as_double(j["scale"], join(path, "scale")));
  guarded(path, [&] {
    validate_measure(space, m);
    return 0;
  });
  return m;
}

SolenoidMeasure parse_solenoid_measure(const Json& j, const SuspensionSolenoid& sol, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected a solenoid measure object");
  allow(j, path, {"daval", "leaf_densities", "atoms"});
  SolenoidMeasure mu;
  const auto& space = sol.space();
  if (j.contains("daval")) {
    const std::string dp = join(path, "daval");
    auto raw = parse_raw_measure(j["daval"], space, dp);
    mu.daval_part = guarded(dp, [&] { return make_invariant_measure(sol, raw); });
  }
  if (j.contains("leaf_densities")) {
    const auto& a = j["leaf_densities"];
    const std::string ap = join(path, "leaf_densities");
    if (!a.is_array()) throw ConfigError(ap, "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string ip = join(ap, i);
      allow(a[i], ip, {"x0", "g"});
      LeafDensity ld{parse_point(need(a[i], "x0", ip), space, join(ip, "x0")), parse_trig(need(a[i], "g", ip), join(ip, "g"))};
      if (trig_minimum(ld.g).value < -1e-12) throw ConfigError(join(ip, "g"), "leaf density must be nonnegative");
      mu.leaf_densities.push_back(ld);
    }
  }
  if (j.contains("atoms")) {
    const auto& a = j["atoms"];
    const std::string ap = join(path, "atoms");
    if (!a.is_array()) throw ConfigError(ap, "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string ip = join(ap, i);
      allow(a[i], ip, {"x", "t", "mass"});
      PointAtom pa;
      pa.at.x = parse_point(need(a[i], "x", ip), space, join(ip, "x"));
      pa.at.t = a[i].contains("t") ? as_double(a[i]["t"], join(ip, "t")) : 0.0;
      if (pa.at.t < 0.0 || pa.at.t >= 1.0) throw ConfigError(join(ip, "t"), "t must lie in [0, 1)");
      pa.mass = as_double(need(a[i], "mass", ip), join(ip, "mass"));
      if (!(pa.mass > 0.0)) throw ConfigError(join(ip, "mass"), "atom mass must be positive");
      mu.point_atoms.push_back(pa);
    }
  }
  return mu;
}

Immersion parse_immersion(const Json& j, const SuspensionSolenoid& sol, const std::string& path) {
  const std::string kind = as_string(need(j, "kind", path), join(path, "kind"));
  allow(j, path, {"kind", "alpha", "perturbation", "v", "w0", "w1", "depth", "eps0"});
  const auto& map = sol.map();
  Immersion imm;
  if (kind == "rotation_standard" || kind == "custom") {
    if (map.kind != MapKind::Rotation) throw ConfigError(join(path, "kind"), kind + " needs a rotation map");
    if (kind == "rotation_standard") {
      imm = Immersion::rotation_standard(map.alpha);
    } else {
      const auto& p = need(j, "perturbation", path);
      const std::string pp = join(path, "perturbation");
      if (!p.is_array() || p.size() != 2) throw ConfigError(pp, "expected two 0-form descriptors");
      std::vector<TorusForm> parts;
      for (std::size_t i = 0; i < 2; ++i) {
        parts.push_back(parse_form(p[i], 2, join(pp, i)));
        if (parts.back().degree() != 0) throw ConfigError(join(pp, i), "perturbation components are 0-forms");
      }
      imm = guarded(pp, [&] { return Immersion::custom(map.alpha, parts); });
    }
  } else if (kind == "torus_linear") {
    auto v = as_doubles(need(j, "v", path), join(path, "v"));
    auto w0 = as_doubles(need(j, "w0", path), join(path, "w0"));
    auto w1 = as_doubles(need(j, "w1", path), join(path, "w1"));
    imm = guarded(path, [&] { return Immersion::torus_linear(v, w0, w1); });
  } else if (kind == "dyadic_r3") {
    if (sol.space().kind() != TransversalKind::CantorPAdic) throw ConfigError(join(path, "kind"), "dyadic_r3 needs a Cantor transversal");
    const double eps0 = j.contains("eps0") ? as_double(j["eps0"], join(path, "eps0")) : 0.05;
    imm = guarded(path, [&] { return Immersion::dyadic_r3(sol.space().depth(), eps0); });
  } else {
    throw ConfigError(join(path, "kind"), "unknown immersion kind '" + kind + "'");
  }
  guarded(path, [&] { return validate_immersion(imm, sol); });
  return imm;
}

TorusForm parse_form(const Json& j, int n, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected a form object");
  allow(j, path, {"id", "dtheta", "d", "sum", "degree", "terms"});
  if (j.contains("dtheta")) {
    const auto i = as_int(j["dtheta"], join(path, "dtheta"));
    if (i < 1 || i > n) throw ConfigError(join(path, "dtheta"), "index must be in 1.." + std::to_string(n));
    return TorusForm::dtheta(n, static_cast<int>(i));
  }
  if (j.contains("d")) {
    const auto inner = parse_form(j["d"], n, join(path, "d"));
    return guarded(join(path, "d"), [&] { return d(inner); });
  }
  if (j.contains("sum")) {
    const auto& a = j["sum"];
    const std::string sp = join(path, "sum");
    if (!a.is_array() || a.empty()) throw ConfigError(sp, "expected a nonempty array of forms");
    TorusForm acc = parse_form(a[0], n, join(sp, 0));
    for (std::size_t i = 1; i < a.size(); ++i) {
      auto f = parse_form(a[i], n, join(sp, i));
      if (f.degree() != acc.degree()) throw ConfigError(join(sp, i), "degree differs from the first summand");
      acc = acc.plus(f);
    }
    return acc;
  }
  const auto degree = as_int(need(j, "degree", path), join(path, "degree"));
  if (degree < 0 || degree > n) throw ConfigError(join(path, "degree"), "degree must be in 0.." + std::to_string(n));
  TorusForm w(n, static_cast<int>(degree));
  const auto& terms = need(j, "terms", path);
  const std::string tp = join(path, "terms");
  if (!terms.is_array()) throw ConfigError(tp, "expected an array of terms");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string ip = join(tp, t);
    const auto& term = terms[t];
    allow(term, ip, {"k", "I", "phase", "c"});
    const auto kd = as_doubles(need(term, "k", ip), join(ip, "k"));
    if (static_cast<int>(kd.size()) != n) throw ConfigError(join(ip, "k"), "frequency vector needs " + std::to_string(n) + " entries");
    std::vector<int> k;
    for (std::size_t a = 0; a < kd.size(); ++a) {
      if (kd[a] != std::floor(kd[a]) || std::fabs(kd[a]) > kFrequencyCap)
        throw ConfigError(join(join(ip, "k"), a), "frequencies are integers of size <= 64");
      k.push_back(static_cast<int>(kd[a]));
    }
    std::vector<int> idx;
    if (term.contains("I")) {
      const auto& I = term["I"];
      if (!I.is_array()) throw ConfigError(join(ip, "I"), "expected an index array");
      for (std::size_t a = 0; a < I.size(); ++a) {
        const auto v = as_int(I[a], join(join(ip, "I"), a));
        if (v < 1 || v > n) throw ConfigError(join(join(ip, "I"), a), "index must be in 1.." + std::to_string(n));
        idx.push_back(static_cast<int>(v));
      }
    }
    if (static_cast<long long>(idx.size()) != degree) throw ConfigError(join(ip, "I"), "needs exactly `degree` indices");
    Phase phase = Phase::Cos;
    if (term.contains("phase")) {
      const auto ph = as_string(term["phase"], join(ip, "phase"));
      if (ph == "sin") phase = Phase::Sin;
      else if (ph != "cos") throw ConfigError(join(ip, "phase"), "phase is cos or sin");
    }
    const double c = as_double(need(term, "c", ip), join(ip, "c"));
    w.add_term(k, idx, phase, c);
  }
  return w;
}

Json to_json(const TransversalSpace& space) {
  Json j;
  switch (space.kind()) {
    case TransversalKind::Circle: j["kind"] = "circle"; break;
    case TransversalKind::Finite:
      j["kind"] = "finite";
      j["points"] = doubles_json(space.points());
      break;
    case TransversalKind::CantorPAdic:
      j["kind"] = "cantor";
      j["p"] = space.base();
      j["depth"] = space.depth();
      break;
  }
  return j;
}

Json to_json(const ReturnMap& map) {
  Json j;
  switch (map.kind) {
    case MapKind::Rotation:
      j["kind"] = "rotation";
      if (map.declared_rational) j["rational"] = {map.declared_rational->num, map.declared_rational->den};
      else j["real"] = map.alpha;
      break;
    case MapKind::Odometer:
      j["kind"] = "odometer";
      j["p"] = map.p;
      break;
    case MapKind::CircleDiffeo:
      j["kind"] = "circle_diffeo";
      j["a"] = map.amplitude;
      j["m"] = map.frequency;
      break;
    case MapKind::FinitePermutation:
      j["kind"] = "permutation";
      j["sigma"] = map.sigma;
      break;
  }
  return j;
}

Json to_json(const TransversalSpace& space, const TransversalPoint& pt) {
  switch (space.kind()) {
    case TransversalKind::Circle: return pt.circle_coordinate();
    case TransversalKind::Finite: return pt.index;
    case TransversalKind::CantorPAdic: return pt.digits;
  }
  return nullptr;
}

Json to_json(const TrigPoly& p) {
  Json j;
  j["const"] = p.constant;
  j["cos"] = doubles_json(p.cos_coeffs);
  j["sin"] = doubles_json(p.sin_coeffs);
  return j;
}

Json to_json(const RawTransversalMeasure& m) {
  Json j;
  switch (m.kind) {
    case TransversalKind::Finite: j["weights"] = doubles_json(m.weights); break;
    case TransversalKind::CantorPAdic: j["cylinder_weights"] = doubles_json(m.weights); break;
    case TransversalKind::Circle: {
      if (!m.histogram.empty()) j["histogram"] = doubles_json(m.histogram);
      if (m.histogram.empty() || !m.density.is_constant() || m.density.constant != 0.0) j["density"] = to_json(m.density);
      Json atoms = Json::array();
      for (const auto& a : m.atoms) atoms.push_back({a.x, a.mass});
      j["atoms"] = atoms;
      break;
    }
  }
  return j;
}

Json to_json(const TorusForm& w) {
  Json j;
  j["degree"] = w.degree();
  Json terms = Json::array();
  for (const auto& [key, c] : w.terms()) {
    Json t;
    t["k"] = key.k;
    Json I = Json::array();
    for (int i : mask_indices(key.mask)) I.push_back(i);
    t["I"] = I;
    t["phase"] = key.phase == Phase::Cos ? "cos" : "sin";
    t["c"] = c;
    terms.push_back(t);
  }
  j["terms"] = terms;
  return j;
}

Json to_json(const Immersion& imm) {
  Json j;
  j["kind"] = to_string(imm.kind);
  switch (imm.kind) {
    case ImmersionKind::RotationStandard: j["alpha"] = imm.alpha; break;
    case ImmersionKind::TorusLinear:
      j["v"] = doubles_json(imm.v);
      j["w0"] = doubles_json(imm.w0);
      j["w1"] = doubles_json(imm.w1);
      break;
    case ImmersionKind::DyadicR3:
      j["depth"] = imm.depth;
      j["eps0"] = imm.eps0;
      break;
    case ImmersionKind::Custom:
      j["alpha"] = imm.alpha;
      j["perturbation"] = {to_json(imm.perturbation[0]), to_json(imm.perturbation[1])};
      break;
  }
  return j;
}

namespace {

Json solenoid_measure_json(const SuspensionSolenoid& sol, const SolenoidMeasure& mu) {
  Json j;
  if (mu.daval_part) j["daval"] = to_json(mu.daval_part->raw);
  Json ld = Json::array();
  for (const auto& l : mu.leaf_densities) ld.push_back({{"x0", to_json(sol.space(), l.x0)}, {"g", to_json(l.g)}});
  j["leaf_densities"] = ld;
  Json atoms = Json::array();
  for (const auto& a : mu.point_atoms)
    atoms.push_back({{"x", to_json(sol.space(), a.at.x)}, {"t", a.at.t}, {"mass", a.mass}});
  j["atoms"] = atoms;
  return j;
}

std::optional<Immersion> default_immersion(const SuspensionSolenoid& sol) {
  try {
    if (sol.map().kind == MapKind::Rotation) return Immersion::rotation_standard(sol.map().alpha);
    if (sol.space().kind() == TransversalKind::CantorPAdic && sol.space().base() == 2) {
      auto imm = Immersion::dyadic_r3(sol.space().depth());
      validate_immersion(imm, sol);
      return imm;
    }
  } catch (const DomainError&) {
  }
  return std::nullopt;
}

const char* const kTopKeys[] = {"solenoid", "measure", "solenoid_measure", "immersion", "forms", "options", "seed", "output"};
const char* const kOptionKeys[] = {"quad",         "ulam",        "minimality", "grid",    "r",
                                   "r_prime",      "refinements", "samples_per_radius", "flowbox_depths", "horizon",
                                   "x0",           "random_forms", "fail_on_atoms"};

}  // namespace

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(std::begin(kTopKeys), std::end(kTopKeys), it.key()) == std::end(kTopKeys))
      throw ConfigError(it.key(), "unknown field");
  ExperimentConfig cfg;
  const auto& sj = need(j, "solenoid", "");
  auto space = parse_transversal(need(sj, "transversal", "solenoid"), "solenoid.transversal");
  auto map = parse_map(need(sj, "map", "solenoid"), "solenoid.map");
  cfg.solenoid = guarded("solenoid.map", [&] { return suspend(space, map); });
  const auto& sol = cfg.solenoid;

  if (j.contains("measure")) {
    cfg.measure = parse_raw_measure(j["measure"], sol.space(), "measure");
  } else {
    auto ims = guarded("measure", [&] { return invariant_measures(sol.space(), sol.map()); });
    cfg.measure = ims.measures.front().measure;
  }
  if (j.contains("solenoid_measure")) cfg.solenoid_measure = parse_solenoid_measure(j["solenoid_measure"], sol, "solenoid_measure");
  if (j.contains("immersion") && !j["immersion"].is_null()) cfg.immersion = parse_immersion(j["immersion"], sol, "immersion");
  else cfg.immersion = default_immersion(sol);

  const int n = cfg.immersion ? cfg.immersion->n : 2;
  if (j.contains("forms")) {
    const auto& fs = j["forms"];
    if (!fs.is_array()) throw ConfigError("forms", "expected an array");
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string fp = join("forms", i);
      std::string name = "form_" + std::to_string(i);
      if (fs[i].is_object() && fs[i].contains("id")) name = as_string(fs[i]["id"], join(fp, "id"));
      cfg.forms.push_back({name, parse_form(fs[i], n, fp)});
    }
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) throw ConfigError("seed", "expected an unsigned integer");
    if (j["seed"].is_number_integer() && j["seed"].get<long long>() < 0) throw ConfigError("seed", "expected an unsigned integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
    cfg.seed_given = true;
  }
  if (j.contains("output")) cfg.output = as_string(j["output"], "output");

  if (j.contains("options")) {
    const auto& o = j["options"];
    if (!o.is_object()) throw ConfigError("options", "expected an object");
    for (auto it = o.begin(); it != o.end(); ++it)
      if (std::find(std::begin(kOptionKeys), std::end(kOptionKeys), it.key()) == std::end(kOptionKeys))
        throw ConfigError("options." + it.key(), "unknown option");
    auto positive = [&](const char* key, double& dst) {
      if (!o.contains(key)) return;
      dst = as_double(o[key], std::string("options.") + key);
      if (!(dst > 0.0)) throw ConfigError(std::string("options.") + key, "must be positive");
    };
    auto count = [&](const Json& parent, const char* key, const std::string& pp, auto& dst, long long lo) {
      if (!parent.contains(key)) return;
      const auto v = as_int(parent[key], join(pp, key));
      if (v < lo) throw ConfigError(join(pp, key), "must be >= " + std::to_string(lo));
      dst = static_cast<std::remove_reference_t<decltype(dst)>>(v);
    };
    if (o.contains("quad")) {
      const auto& q = o["quad"];
      allow(q, "options.quad", {"t_panels", "circle_bins", "split_half"});
      count(q, "t_panels", "options.quad", cfg.quad.t_panels, 0);
      count(q, "circle_bins", "options.quad", cfg.quad.circle_bins, 1);
      if (q.contains("split_half")) {
        if (!q["split_half"].is_boolean()) throw ConfigError("options.quad.split_half", "expected a boolean");
        cfg.quad.split_half = q["split_half"].get<bool>();
      }
    }
    if (o.contains("ulam")) {
      const auto& u = o["ulam"];
      allow(u, "options.ulam", {"bins", "power_iter_tol", "max_iters"});
      count(u, "bins", "options.ulam", cfg.ulam.bins, 2);
      count(u, "max_iters", "options.ulam", cfg.ulam.max_iters, 1);
      if (u.contains("power_iter_tol")) {
        cfg.ulam.power_iter_tol = as_double(u["power_iter_tol"], "options.ulam.power_iter_tol");
        if (!(cfg.ulam.power_iter_tol > 0.0)) throw ConfigError("options.ulam.power_iter_tol", "must be positive");
      }
    }
    if (o.contains("minimality")) {
      const auto& mm = o["minimality"];
      allow(mm, "options.minimality", {"samples", "n_steps", "eps"});
      count(mm, "samples", "options.minimality", cfg.minimality.samples, 1);
      count(mm, "n_steps", "options.minimality", cfg.minimality.n_steps, 1);
      if (mm.contains("eps")) {
        cfg.minimality.eps = as_double(mm["eps"], "options.minimality.eps");
        if (!(cfg.minimality.eps > 0.0)) throw ConfigError("options.minimality.eps", "must be positive");
      }
    }
    count(o, "grid", "options", cfg.grid, 8);
    count(o, "refinements", "options", cfg.refinements, 1);
    positive("r", cfg.r);
    positive("r_prime", cfg.r_prime);
    positive("samples_per_radius", cfg.samples_per_radius);
    positive("horizon", cfg.horizon);
    if (o.contains("flowbox_depths")) {
      const auto v = as_doubles(o["flowbox_depths"], "options.flowbox_depths");
      cfg.flowbox_depths.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != std::floor(v[i]) || v[i] < 0 || v[i] > 20)
          throw ConfigError(join("options.flowbox_depths", i), "depths are integers in 0..20");
        cfg.flowbox_depths.push_back(static_cast<int>(v[i]));
      }
    }
    if (o.contains("x0")) cfg.x0 = parse_point(o["x0"], sol.space(), "options.x0");
    if (o.contains("random_forms")) {
      const auto& rf = o["random_forms"];
      allow(rf, "options.random_forms", {"count", "cap", "terms"});
      count(rf, "count", "options.random_forms", cfg.random_forms.count, 0);
      count(rf, "cap", "options.random_forms", cfg.random_forms.cap, 0);
      count(rf, "terms", "options.random_forms", cfg.random_forms.terms, 1);
      if (cfg.random_forms.cap > kFrequencyCap) throw ConfigError("options.random_forms.cap", "exceeds the frequency cap 64");
      if (cfg.random_forms.count > 0 && !cfg.seed_given)
        throw ConfigError("seed", "a seed is required when random_forms.count > 0");
    }
    if (o.contains("fail_on_atoms")) {
      if (!o["fail_on_atoms"].is_boolean()) throw ConfigError("options.fail_on_atoms", "expected a boolean");
      cfg.fail_on_atoms = o["fail_on_atoms"].get<bool>();
    }
  }
  if (!cfg.x0) cfg.x0 = sample_points(sol.space(), 1).front();

  Json echo;
  echo["solenoid"] = {{"transversal", to_json(sol.space())}, {"map", to_json(sol.map())}};
  echo["measure"] = to_json(*cfg.measure);
  if (cfg.solenoid_measure) echo["solenoid_measure"] = solenoid_measure_json(sol, *cfg.solenoid_measure);
  echo["immersion"] = cfg.immersion ? to_json(*cfg.immersion) : Json(nullptr);
  Json forms = Json::array();
  for (const auto& f : cfg.forms) {
    Json fj = to_json(f.form);
    fj["id"] = f.name;
    forms.push_back(fj);
  }
  echo["forms"] = forms;
  Json opt;
  opt["quad"] = {{"t_panels", cfg.quad.t_panels}, {"circle_bins", cfg.quad.circle_bins}, {"split_half", cfg.quad.split_half}};
  opt["ulam"] = {{"bins", cfg.ulam.bins}, {"power_iter_tol", cfg.ulam.power_iter_tol}, {"max_iters", cfg.ulam.max_iters}};
  opt["minimality"] = {{"samples", cfg.minimality.samples}, {"n_steps", cfg.minimality.n_steps}, {"eps", cfg.minimality.eps}};
  opt["grid"] = cfg.grid;
  opt["r"] = cfg.r;
  opt["r_prime"] = cfg.r_prime;
  opt["refinements"] = cfg.refinements;
  opt["samples_per_radius"] = cfg.samples_per_radius;
  opt["flowbox_depths"] = cfg.flowbox_depths;
  opt["horizon"] = cfg.horizon;
  opt["x0"] = to_json(sol.space(), *cfg.x0);
  opt["random_forms"] = {{"count", cfg.random_forms.count}, {"cap", cfg.random_forms.cap}, {"terms", cfg.random_forms.terms}};
  opt["fail_on_atoms"] = cfg.fail_on_atoms;
  echo["options"] = opt;
  echo["seed"] = cfg.seed;
  echo["output"] = cfg.output;
  cfg.echo = echo;
  return cfg;
}

ExperimentConfig load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("--config", "cannot open " + file);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

TransversalMeasureInv resolve_measure(const ExperimentConfig& cfg) {
  return guarded("measure", [&] { return make_invariant_measure(cfg.solenoid, *cfg.measure); });
}

Immersion resolve_immersion(const ExperimentConfig& cfg) {
  if (!cfg.immersion) throw ConfigError("immersion", "no default immersion for this solenoid; give one");
  return *cfg.immersion;
}

std::vector<NamedForm> resolve_forms(const ExperimentConfig& cfg, int n) {
  std::vector<NamedForm> out = cfg.forms;
  for (const auto& f : out)
    if (f.form.dim() != n) throw ConfigError("forms", "form dimension differs from the immersion target");
  for (std::size_t i = 0; i < cfg.random_forms.count; ++i) {
    const auto eta = random_torus_form(n, 0, cfg.random_forms.cap, cfg.random_forms.terms,
                                       CounterRng(cfg.seed, i).next());
    out.push_back({"exact_" + std::to_string(i), d(eta)});
  }
  return out;
}

}  // namespace msol
