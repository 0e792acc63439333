#include "msol/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "msol/common.hpp"
#include "msol/currents.hpp"
#include "msol/dualform.hpp"
#include "msol/dynamics.hpp"
#include "msol/forms.hpp"
#include "msol/rng.hpp"
#include "msol/smeasure.hpp"
#include "msol/solenoid.hpp"

namespace msol {

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "FAILED " << what << "; ";
    }
  }
};

SuspensionSolenoid golden() { return suspend(TransversalSpace::circle(), ReturnMap::rotation(kGolden)); }

SuspensionSolenoid dyadic(int depth) {
  return suspend(TransversalSpace::cantor(2, depth), ReturnMap::odometer(2));
}

// 1. homology class of the golden-mean foliation
void homology_golden(Outcome& o) {
  const auto sol = golden();
  const auto m = make_invariant_measure(sol, RawTransversalMeasure::lebesgue());
  const auto h = homology_class(Immersion::rotation_standard(kGolden), sol, m);
  const double e1 = std::fabs(h.value[0] - 1.0), e2 = std::fabs(h.value[1] - kGolden);
  o.detail << "class=(" << h.value[0] << ", " << h.value[1] << ") err=(" << sci(e1) << ", " << sci(e2) << "); ";
  o.require(e1 <= 1e-9 && e2 <= 1e-9, "per-component error <= 1e-9");
}

struct Setup {
  std::string name;
  Immersion imm;
  SuspensionSolenoid sol;
  TransversalMeasureInv m;
};

std::vector<Setup> builtin_immersions() {
  std::vector<Setup> out;
  {
    auto sol = golden();
    auto m = make_invariant_measure(sol, RawTransversalMeasure::lebesgue());
    out.push_back({"rotation_standard", Immersion::rotation_standard(kGolden), sol, m});
  }
  {
    auto sol = suspend(TransversalSpace::finite({0.0, 0.5}), ReturnMap::permutation({1, 0}));
    auto m = make_invariant_measure(sol, RawTransversalMeasure::finite_weights({0.5, 0.5}));
    out.push_back({"torus_linear", Immersion::torus_linear({1.0, 0.5}, {0.0, 0.25}, {0.0, 1.0}), sol, m});
  }
  {
    auto sol = dyadic(6);
    auto m = make_invariant_measure(sol, RawTransversalMeasure::haar(sol.space()));
    out.push_back({"dyadic_r3", Immersion::dyadic_r3(6), sol, m});
  }
  {
    auto sol = golden();
    auto m = make_invariant_measure(sol, RawTransversalMeasure::lebesgue());
    TorusForm p1(2, 0), p2(2, 0);
    p1.add_term({1, 1}, {}, Phase::Sin, 0.03);
    p2.add_term({0, 1}, {}, Phase::Cos, 0.02);
    p2.add_term({2, -1}, {}, Phase::Sin, 0.01);
    out.push_back({"custom", Immersion::custom(kGolden, {p1, p2}), sol, m});
  }
  return out;
}

// 2. Stokes: seeded exact forms pair to zero
void closedness_suite(Outcome& o) {
  constexpr std::uint64_t kSeed = 20240611;
  for (const auto& s : builtin_immersions()) {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto eta = random_torus_form(s.imm.n, 0, 8, 6, CounterRng(kSeed, i).next());
      worst = std::max(worst, std::fabs(pair_current(s.imm, s.sol, s.m, d(eta)).value));
    }
    o.detail << s.name << " max|<T,d eta>|=" << sci(worst) << "; ";
    o.require(worst <= 1e-7, s.name + " exact pairings <= 1e-7");
  }
}

// 3. solenoid minimality agrees with the return-map classification
void minimality_agreement(Outcome& o) {
  struct Family {
    std::string name;
    TransversalSpace space;
    ReturnMap map;
  };
  const std::vector<Family> fams{
      {"rotation_irrational", TransversalSpace::circle(), ReturnMap::rotation(kGolden)},
      {"rotation_rational", TransversalSpace::circle(), ReturnMap::rotation_rational(1, 3)},
      {"odometer_p2", TransversalSpace::cantor(2, 8), ReturnMap::odometer(2)},
      {"odometer_p3", TransversalSpace::cantor(3, 5), ReturnMap::odometer(3)},
      {"permutation_1cycle", TransversalSpace::finite({0.1, 0.4, 0.8}), ReturnMap::permutation({1, 2, 0})},
      {"permutation_2cycle", TransversalSpace::finite({0.1, 0.3, 0.6, 0.9}), ReturnMap::permutation({1, 0, 3, 2})},
      {"circle_diffeo", TransversalSpace::circle(), ReturnMap::circle_diffeo(0.1, 1)},
  };
  for (const auto& f : fams) {
    const auto sol = suspend(f.space, f.map);
    const bool leafwise = is_minimal(sol, 8, 10000, 0.01);
    const auto rep = classify_dynamics(f.space, f.map);
    o.detail << f.name << ":" << (leafwise ? "M" : "-") << (rep.minimal ? "M" : "-") << (rep.uniquely_ergodic ? "U" : "-")
             << " ";
    o.require(leafwise == rep.minimal, f.name + " leaf-density verdict matches return map");
    o.require(!rep.uniquely_ergodic || rep.minimal, f.name + " uniquely ergodic implies minimal");
  }
  o.detail << "; ";
}

double total_variation(const TransversalSpace& space, const RawTransversalMeasure& a, const RawTransversalMeasure& b,
                        int level) {
  CompensatedSum s;
  for (const auto& c : uniform_cells(space, level)) s.add(std::fabs(cell_mass(space, a, c) - cell_mass(space, b, c)));
  return s.value();
}

// 4. round trip disintegrate(daval(m)) = m
void round_trip(Outcome& o) {
  struct Case {
    std::string name;
    SuspensionSolenoid sol;
    RawTransversalMeasure m;
    int level;
  };
  TrigPoly twofold = TrigPoly::constant_poly(1.0);
  twofold.cos_coeffs = {0.0, 0.5};
  auto s2 = TransversalSpace::cantor(2, 8), s3 = TransversalSpace::cantor(3, 5);
  const std::vector<Case> cases{
      {"lebesgue_golden", golden(), RawTransversalMeasure::lebesgue(), 9},
      {"haar_p2_d8", suspend(s2, ReturnMap::odometer(2)), RawTransversalMeasure::haar(s2), 8},
      {"haar_p3_d5", suspend(s3, ReturnMap::odometer(3)), RawTransversalMeasure::haar(s3), 5},
      {"cycle_weights", suspend(TransversalSpace::finite({0.1, 0.4, 0.8}), ReturnMap::permutation({1, 2, 0})),
       RawTransversalMeasure::finite_weights({0.4, 0.4, 0.4}), 0},
      {"rational_half_density", suspend(TransversalSpace::circle(), ReturnMap::rotation_rational(1, 2)),
       RawTransversalMeasure::circle(twofold), 9},
  };
  for (const auto& c : cases) {
    const auto inv = make_invariant_measure(c.sol, c.m);
    const auto back = disintegrate(c.sol, daval_from_transversal(c.sol, inv));
    double tv = 0.0;
    if (c.sol.space().kind() == TransversalKind::Finite) {
      for (std::size_t i = 0; i < c.m.weights.size(); ++i) tv += std::fabs(back.measure.weights[i] - c.m.weights[i]);
    } else {
      tv = total_variation(c.sol.space(), back.measure, c.m, c.level);
    }
    o.detail << c.name << " TV=" << sci(tv) << "; ";
    o.require(tv <= 1e-6, c.name + " TV <= 1e-6");
  }
}

// 5. regular / irregular decomposition
void decomposition(Outcome& o) {
  const auto sol = golden();
  SolenoidMeasure mix;
  mix.daval_part = make_invariant_measure(sol, RawTransversalMeasure::lebesgue().scaled(0.7));
  mix.point_atoms.push_back({{TransversalPoint::on_circle(0.3), 0.25}, 0.3});
  const auto d1 = decompose(sol, mix);
  SolenoidMeasure leaf;
  TrigPoly g = TrigPoly::constant_poly(2.0);
  g.cos_coeffs = {1.0};
  leaf.leaf_densities.push_back({TransversalPoint::on_circle(0.2), g});
  const auto d2 = decompose(sol, leaf);
  const double e1 = std::max(std::fabs(regular_mass(d1) - 0.7), std::fabs(irregular_mass(d1) - 0.3));
  const double e2 = std::max(std::fabs(regular_mass(d2) - 1.0), std::fabs(irregular_mass(d2) - 1.0));
  const double again = std::max(regular_mass(decompose(sol, d1.irregular)), regular_mass(decompose(sol, d2.irregular)));
  o.detail << "daval+atom err=" << sci(e1) << " leaf 2+cos err=" << sci(e2) << " second-pass regular=" << sci(again) << "; ";
  o.require(e1 <= 1e-6, "mixture masses 0.7/0.3 within 1e-6");
  o.require(e2 <= 1e-6, "leaf density masses 1/1 within 1e-6");
  o.require(again <= 1e-9, "idempotence <= 1e-9");
}

// 6. dual form pairs like the current
void dual_form(Outcome& o) {
  const auto sol = golden();
  const auto m = make_invariant_measure(sol, RawTransversalMeasure::lebesgue());
  const auto imm = Immersion::rotation_standard(kGolden);
  TorusForm eta(2, 0);
  eta.add_term({1, 2}, {}, Phase::Sin, 0.3);
  eta.add_term({0, 1}, {}, Phase::Cos, 0.2);
  const std::vector<NamedForm> forms{{"dtheta1", TorusForm::dtheta(2, 1)},
                                     {"dtheta2", TorusForm::dtheta(2, 2)},
                                     {"dtheta2+d_eta", TorusForm::dtheta(2, 2).plus(d(eta))},
                                     {"d_eta", d(eta)}};
  const auto a = rsform_check(imm, sol, m, 0.02, 256, forms);
  const auto b = rsform_check(imm, sol, m, 0.01, 512, forms);
  // Below this the error is sampling round-off and the refinement ratio is noise.
  constexpr double kFloor = 1e-8;
  o.detail << "rel err G256/r.02=" << sci(a.max_rel_error) << " G512/r.01=" << sci(b.max_rel_error)
           << " exact abs=" << sci(std::max(a.max_abs_exact, b.max_abs_exact)) << " closedness=" << sci(a.closedness) << "/"
           << sci(a.closedness_bound) << ", " << sci(b.closedness) << "/" << sci(b.closedness_bound) << "; ";
  o.require(a.max_rel_error <= 2e-2, "relative error <= 2e-2 at G=256");
  const bool shrinks = b.max_rel_error * 1.5 <= a.max_rel_error;
  const bool floor = std::max(a.max_rel_error, b.max_rel_error) <= kFloor;
  if (!shrinks && floor) o.detail << "both errors below " << sci(kFloor) << ", shrink ratio not resolvable; ";
  o.require(shrinks || floor, "error shrinks >= 1.5x under refinement");
  o.require(std::max(a.max_abs_exact, b.max_abs_exact) <= 1e-3, "exact forms <= 1e-3");
  o.require(a.closedness <= a.closedness_bound && b.closedness <= b.closedness_bound, "discrete closedness <= 5/G sup");
}

// 7. self-intersection and the flow-box bound
void self_intersection_mechanism(Outcome& o) {
  const auto sol = golden();
  const auto m = make_invariant_measure(sol, RawTransversalMeasure::lebesgue());
  const auto imm = Immersion::rotation_standard(kGolden);
  const double s1 = std::fabs(self_intersection(imm, sol, m, 0.02, 0.01, 256).value);
  const double s2 = std::fabs(self_intersection(imm, sol, m, 0.01, 0.005, 512).value);
  o.detail << "|selfint| G256=" << sci(s1) << " G512=" << sci(s2) << "; ";
  o.require(s1 <= 2e-2, "self-intersection <= 2e-2 at G=256");
  o.require(s2 < s1 || s2 <= 5e-3, "self-intersection decreases or <= 5e-3");

  auto halving = [&](const std::string& name, const SuspensionSolenoid& s, const Immersion& im,
                     const RawTransversalMeasure& raw, int lo, int hi) {
    double worst = 0.0;
    double prev = flowbox_refinement_bound(im, s, raw, lo).sum;
    for (int dpt = lo + 1; dpt <= hi; ++dpt) {
      const double cur = flowbox_refinement_bound(im, s, raw, dpt).sum;
      worst = std::max(worst, std::fabs(cur / prev - 0.5));
      prev = cur;
    }
    o.detail << name << " halving dev=" << sci(worst) << "; ";
    o.require(worst <= 1e-9, name + " sums halve per depth");
  };
  halving("lebesgue", sol, imm, RawTransversalMeasure::lebesgue(), 4, 10);
  const auto dy = dyadic(8);
  halving("haar", dy, Immersion::dyadic_r3(8), RawTransversalMeasure::haar(dy.space()), 1, 8);

  const auto atomic = RawTransversalMeasure::circle(TrigPoly::constant_poly(0.7), {{0.3, 0.3}});
  double worst_ratio = 1e300;
  double c0 = 0.0;
  for (int dpt = 4; dpt <= 12; ++dpt) {
    const auto fb = flowbox_refinement_bound(imm, sol, atomic, dpt);
    c0 = fb.c0;
    worst_ratio = std::min(worst_ratio, fb.sum / fb.c0);
  }
  o.detail << "atom 0.3: min sum/C0=" << sci(worst_ratio) << " (C0=" << sci(c0) << "); ";
  o.require(worst_ratio >= 0.09, "atom sums stay >= C0 * 0.09");
}

// 8. asymptotic cycles match the homology class
void asymptotic_cycles(Outcome& o) {
  {
    const auto sol = golden();
    const auto m = make_invariant_measure(sol, RawTransversalMeasure::lebesgue());
    const auto imm = Immersion::rotation_standard(kGolden);
    const auto h = homology_class(imm, sol, m);
    const auto a = asymptotic_cycle(imm, sol, TransversalPoint::on_circle(0.0), 1e4);
    double e = 0.0;
    for (std::size_t i = 0; i < 2; ++i) e = std::max(e, std::fabs(a[i] - h.value[i]));
    o.detail << "golden err=" << sci(e) << "; ";
    o.require(e <= 2e-4, "golden within 2e-4");
  }
  {
    const auto sol = dyadic(6);
    const auto m = make_invariant_measure(sol, RawTransversalMeasure::haar(sol.space()));
    const auto imm = Immersion::dyadic_r3(6);
    const auto h = homology_class(imm, sol, m);
    const auto a = asymptotic_cycle(imm, sol, TransversalPoint::cantor(std::vector<int>(6, 0)), 1e4);
    double e = 0.0;
    for (std::size_t i = 0; i < 3; ++i) e = std::max(e, std::fabs(a[i] - h.value[i]));
    o.detail << "dyadic d=6 err=" << sci(e) << "; ";
    o.require(e <= 1e-3, "dyadic within 1e-3");
  }
}

double max_coefficient_gap(const TorusForm& a, const TorusForm& b) { return a.plus(b.scaled(-1.0)).max_abs_coefficient(); }

// 9. exterior calculus identities
void exactness_kernel(Outcome& o) {
  constexpr std::uint64_t kSeed = 99;
  double dd = 0.0, leib = 0.0, stokes = 0.0;
  std::uint64_t stream = 0;
  for (int n = 2; n <= 3; ++n) {
    for (int p = 0; p < n; ++p) {
      for (int rep = 0; rep < 4; ++rep) {
        const auto w = random_torus_form(n, p, 8, 5, CounterRng(kSeed, stream++).next());
        if (p + 2 <= n) dd = std::max(dd, d(d(w)).max_abs_coefficient());
        if (p == n - 1) stokes = std::max(stokes, std::fabs(integrate_torus(d(w))));
        for (int q = 0; p + q < n; ++q) {
          const auto v = random_torus_form(n, q, 8, 5, CounterRng(kSeed, stream++).next());
          const auto lhs = d(wedge(w, v));
          const auto rhs = wedge(d(w), v).plus(wedge(w, d(v)).scaled(p % 2 == 0 ? 1.0 : -1.0));
          leib = std::max(leib, max_coefficient_gap(lhs, rhs));
        }
      }
    }
  }
  o.detail << "d^2=" << sci(dd) << " leibniz=" << sci(leib) << " int d=" << sci(stokes) << "; ";
  o.require(dd <= 1e-12, "d^2 = 0");
  o.require(leib <= 1e-12, "Leibniz rule");
  o.require(stokes <= 1e-12, "integral of d vanishes");
}

struct CriterionInfo {
  const char* name;
  double limit;
  void (*run)(Outcome&);
};

const CriterionInfo kCriteria[kCriterionCount] = {
    {"homology class of the golden-mean foliation", 1.0, homology_golden},
    {"Stokes: 20 seeded exact forms per built-in immersion", 10.0, closedness_suite},
    {"minimality verdict vs return-map classification", 30.0, minimality_agreement},
    {"disintegration round trip", 30.0, round_trip},
    {"regular/irregular decomposition", 10.0, decomposition},
    {"dual form pairing and closedness", 120.0, dual_form},
    {"self-intersection and flow-box bound", 120.0, self_intersection_mechanism},
    {"asymptotic cycle vs homology class", 30.0, asymptotic_cycles},
    {"exterior calculus kernel", 5.0, exactness_kernel},
};

}  // namespace

CriterionResult run_criterion(int id) {
  if (id < 1 || id > kCriterionCount) throw DomainError("acceptance criteria are numbered 1.." + std::to_string(kCriterionCount));
  const CriterionInfo& s = kCriteria[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = s.name;
  r.time_limit = s.limit;
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    s.run(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > r.time_limit) {
    o.pass = false;
    o.detail << "FAILED runtime limit; ";
  }
  r.pass = o.pass;
  r.detail = o.detail.str();
  while (!r.detail.empty() && (r.detail.back() == ' ' || r.detail.back() == ';')) r.detail.pop_back();
  return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids) {
  std::vector<int> todo = ids;
  if (todo.empty())
    for (int i = 1; i <= kCriterionCount; ++i) todo.push_back(i);
  std::sort(todo.begin(), todo.end());
  std::vector<CriterionResult> out;
  for (int id : todo) out.push_back(run_criterion(id));
  return out;
}

std::string format_criterion(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "%s  %d  %s  (%.2f s / %g s)  ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds, r.time_limit);
  return head + r.detail;
}

}  // namespace msol
