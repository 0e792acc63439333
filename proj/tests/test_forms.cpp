#include <doctest.h>

#include <cmath>
#include <numbers>

#include "msol/common.hpp"
#include "msol/forms.hpp"
#include "msol/rng.hpp"
#include "msol/smeasure.hpp"

using namespace msol;

namespace {
const double kTwoPiD = 2.0 * std::numbers::pi;

bool same(const TorusForm& a, const TorusForm& b, double tol) { return a.plus(b.scaled(-1.0)).is_zero(tol); }

// brute-force evaluation of a single monomial, independent of the form code
double monomial(const std::vector<int>& k, Phase ph, const std::vector<double>& th) {
  double s = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j) s += k[j] * th[j];
  return ph == Phase::Cos ? std::cos(kTwoPiD * s) : std::sin(kTwoPiD * s);
}
}  // namespace

TEST_CASE("exterior derivative") {
  TorusForm s(2, 0);
  s.add_term({1, 0}, {}, Phase::Sin, 1.0);
  TorusForm want(2, 1);
  want.add_term({1, 0}, {1}, Phase::Cos, kTwoPiD);
  CHECK(same(d(s), want, 1e-15));
  CHECK(d(TorusForm::dtheta(2, 1)).is_zero());
  CHECK_THROWS_AS(d(TorusForm(2, 2)), DomainError);
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (int n : {2, 3}) {
      const auto w = random_torus_form(n, 0, 8, 6, seed);
      CHECK(d(d(w)).is_zero(1e-12));
      if (n == 3) CHECK(d(d(random_torus_form(n, 1, 8, 6, seed + 100))).is_zero(1e-12));
    }
}

TEST_CASE("wedge products") {
  const auto a = wedge(TorusForm::dtheta(2, 1), TorusForm::dtheta(2, 2));
  const auto b = wedge(TorusForm::dtheta(2, 2), TorusForm::dtheta(2, 1));
  CHECK(same(a, b.scaled(-1.0), 0.0));
  TorusForm c(2, 1);
  c.add_term({1, 0}, {1}, Phase::Cos, 1.0);
  CHECK(wedge(c, c).is_zero());
  TorusForm f(2, 0);
  f.add_term({1, 0}, {}, Phase::Cos, 1.0);
  TorusForm half(2, 0);
  half.add_term({0, 0}, {}, Phase::Cos, 0.5);
  half.add_term({2, 0}, {}, Phase::Cos, 0.5);
  CHECK(same(wedge(f, f), half, 1e-15));
  CHECK_THROWS_AS(wedge(TorusForm(2, 2), TorusForm::dtheta(2, 1)), DomainError);
}

TEST_CASE("leibniz rule") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto a = random_torus_form(3, 1, 8, 5, seed);
    const auto b = random_torus_form(3, 1, 8, 5, seed + 50);
    const auto lhs = d(wedge(a, b));
    const auto rhs = wedge(d(a), b).plus(wedge(a, d(b)).scaled(-1.0));
    CHECK(same(lhs, rhs, 1e-10));
  }
}

TEST_CASE("torus integrals") {
  CHECK(integrate_torus(wedge(TorusForm::dtheta(2, 1), TorusForm::dtheta(2, 2))) == 1.0);
  TorusForm c(2, 2);
  c.add_term({1, 0}, {1, 2}, Phase::Cos, 1.0);
  CHECK(integrate_torus(c) == 0.0);
  TorusForm e(2, 2);
  e.add_term({0, 0}, {1, 2}, Phase::Cos, 1.0);
  e.add_term({0, 1}, {1, 2}, Phase::Cos, 1.0);
  CHECK(integrate_torus(e) == 1.0);
  CHECK_THROWS_AS(integrate_torus(TorusForm::dtheta(2, 1)), DomainError);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(integrate_torus(d(random_torus_form(2, 1, 8, 6, seed))) == 0.0);
    CHECK(integrate_torus(d(random_torus_form(3, 2, 8, 6, seed))) == 0.0);
  }
}

TEST_CASE("pointwise evaluation matches brute force") {
  CounterRng rng(11, 0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto w = random_torus_form(3, 1, 8, 6, seed);
    const FormEvaluator ev(w);
    REQUIRE(ev.size() == 3);
    for (int trial = 0; trial < 20; ++trial) {
      const std::vector<double> th{rng.uniform(-2.0, 2.0), rng.uniform(), rng.uniform(0.0, 5.0)};
      double brute[3] = {0.0, 0.0, 0.0};
      for (const auto& [key, c] : w.terms()) {
        const int slot = mask_indices(key.mask).front() - 1;
        brute[slot] += c * monomial(key.k, key.phase, th);
      }
      double fast[3];
      ev.evaluate(th.data(), fast);
      for (int j = 0; j < 3; ++j) {
        CHECK(fast[j] == doctest::Approx(brute[j]).epsilon(1e-12).scale(1.0));
        CHECK(w.component(1u << j, th) == doctest::Approx(brute[j]).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("leafwise integration") {
  const auto sol = suspend(TransversalSpace::circle(), ReturnMap::rotation(0.6180339887498949));
  const auto m = make_invariant_measure(sol, RawTransversalMeasure::lebesgue());
  const LeafwiseForm dt{1, [](const TransversalPoint&, double) { return 1.0; }, 0.0};
  CHECK(integrate_leafwise(sol, m, dt) == doctest::Approx(1.0).epsilon(1e-14));
  const LeafwiseForm cosdt{1, [](const TransversalPoint&, double t) { return std::cos(kTwoPiD * t); }, 1.0};
  CHECK(std::fabs(integrate_leafwise(sol, m, cosdt)) <= 1e-14);

  // g(x, t) = sin 2 pi (x + alpha t) is a global function on the suspension
  const double alpha = 0.6180339887498949;
  const auto dg = leafwise_d(
      [alpha](const TransversalPoint& x, double t) {
        return kTwoPiD * alpha * std::cos(kTwoPiD * (x.circle_coordinate() + alpha * t));
      },
      alpha);
  CHECK(gluing_defect(sol, dg) <= 1e-9);
  CHECK(std::fabs(integrate_leafwise(sol, m, dg)) <= 1e-10);

  // linear in phi and in m
  const auto m2 = make_invariant_measure(sol, RawTransversalMeasure::lebesgue().scaled(2.5));
  CHECK(integrate_leafwise(sol, m2, dt) == doctest::Approx(2.5).epsilon(1e-14));
  const LeafwiseForm bad{1, [](const TransversalPoint&, double t) { return t; }, 1.0};
  CHECK_THROWS_AS(integrate_leafwise(sol, m, bad), DomainError);
}
