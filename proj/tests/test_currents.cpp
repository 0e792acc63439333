#include <doctest.h>

#include <cmath>
#include <numbers>

#include "msol/common.hpp"
#include "msol/currents.hpp"
#include "msol/rng.hpp"
#include "msol/smeasure.hpp"

using namespace msol;

namespace {
const double kGolden = 0.6180339887498949;

struct Setup {
  SuspensionSolenoid sol;
  TransversalMeasureInv m;
};

Setup golden() {
  auto sol = suspend(TransversalSpace::circle(), ReturnMap::rotation(kGolden));
  auto m = make_invariant_measure(sol, RawTransversalMeasure::lebesgue());
  return {sol, m};
}

Setup dyadic(int d) {
  auto sol = suspend(TransversalSpace::cantor(2, d), ReturnMap::odometer(2));
  auto m = make_invariant_measure(sol, RawTransversalMeasure::haar(sol.space()));
  return {sol, m};
}

TorusForm zero_form(int n, std::vector<int> k, Phase ph) {
  TorusForm f(n, 0);
  f.add_term(std::move(k), {}, ph, 1.0);
  return f;
}
}  // namespace

TEST_CASE("coordinate pairings") {
  const auto g = golden();
  const auto imm = Immersion::rotation_standard(kGolden);
  CHECK(std::fabs(pair_current(imm, g.sol, g.m, TorusForm::dtheta(2, 2)).value - kGolden) <= 1e-10);
  CHECK(std::fabs(pair_current(imm, g.sol, g.m, TorusForm::dtheta(2, 1)).value - 1.0) <= 1e-10);

  const auto dy = dyadic(6);
  const auto h = homology_class(Immersion::dyadic_r3(6), dy.sol, dy.m);
  CHECK(std::fabs(h.value[0] - 1.0) <= 1e-8);
  CHECK(std::fabs(h.value[1]) <= 1e-6);
  CHECK(std::fabs(h.value[2]) <= 1e-6);

  const auto hg = homology_class(imm, g.sol, g.m);
  CHECK(std::fabs(hg.value[0] - 1.0) <= 1e-9);
  CHECK(std::fabs(hg.value[1] - kGolden) <= 1e-9);
}

TEST_CASE("dyadic winding by brute force") {
  // independent: trapezoid sum of dtheta_2-velocity per cylinder, which
  // must vanish since every tau_k advances by a whole number of turns
  const auto dy = dyadic(6);
  const auto imm = Immersion::dyadic_r3(6);
  double total = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    const auto x = TransversalPoint::cantor(cylinder_digits(2, 6, i));
    const int M = 4096;
    double s = 0.0;
    for (int j = 0; j < M; ++j) s += imm.velocity(dy.sol.space(), x, (j + 0.5) / M)[1];
    total += s / M / 64.0;
  }
  const auto p = pair_current(imm, dy.sol, dy.m, TorusForm::dtheta(3, 2));
  CHECK(std::fabs(p.value - total) <= 1e-8);
}

TEST_CASE("stokes on exact forms") {
  const auto g = golden();
  const auto imm = Immersion::rotation_standard(kGolden);
  CHECK(closedness_residual(imm, g.sol, g.m, zero_form(2, {1, 0}, Phase::Sin)).residual <= 1e-10);
  const auto c11 = zero_form(2, {1, 1}, Phase::Cos);
  CHECK(closedness_residual(imm, g.sol, g.m, c11).residual <= 1e-8);
  const auto fin = suspend(TransversalSpace::finite({0.0, 0.5}), ReturnMap::permutation({1, 0}));
  const auto mf = make_invariant_measure(fin, RawTransversalMeasure::finite_weights({0.5, 0.5}));
  const auto lin = Immersion::torus_linear({1.0, 0.5}, {0.0, 0.25}, {0.0, 1.0});
  CHECK(closedness_residual(lin, fin, mf, c11).residual <= 1e-8);

  const auto dy = dyadic(6);
  const auto r3 = Immersion::dyadic_r3(6);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto eta = random_torus_form(3, 0, 8, 6, s);
    const auto c = closedness_residual(r3, dy.sol, dy.m, eta);
    CHECK(c.residual <= 1e-7);
    CHECK(c.ok);
  }
}

TEST_CASE("bilinearity") {
  const auto g = golden();
  const auto imm = Immersion::rotation_standard(kGolden);
  TorusForm w1(2, 1), w2(2, 1);
  w1.add_term({0, 1}, {2}, Phase::Cos, 0.5);
  w1.add_term({0, 0}, {1}, Phase::Cos, 0.25);
  w2.add_term({1, -1}, {1}, Phase::Sin, 0.75);
  w2.add_term({0, 0}, {2}, Phase::Cos, 1.0);
  const double a = pair_current(imm, g.sol, g.m, w1).value, b = pair_current(imm, g.sol, g.m, w2).value;
  const double ab = pair_current(imm, g.sol, g.m, w1.scaled(3.0).plus(w2.scaled(-0.5))).value;
  CHECK(ab == doctest::Approx(3.0 * a - 0.5 * b).epsilon(1e-12));
  const auto m3 = make_invariant_measure(g.sol, RawTransversalMeasure::lebesgue().scaled(3.0));
  const auto h3 = homology_class(imm, g.sol, m3);
  CHECK(h3.value[1] == doctest::Approx(3.0 * kGolden).epsilon(1e-12));
}

TEST_CASE("quadrature refinement stays within the estimate") {
  const auto g = golden();
  TorusForm p1(2, 0), p2(2, 0);
  p1.add_term({1, 1}, {}, Phase::Sin, 0.03);
  p2.add_term({0, 1}, {}, Phase::Cos, 0.02);
  const auto imm = Immersion::custom(kGolden, {p1, p2});
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto w = random_torus_form(2, 1, 6, 4, s);
    const auto base = pair_current(imm, g.sol, g.m, w);
    QuadOptions q;
    q.t_panels = 2 * base.nodes_t / 16;
    const auto fine = pair_current(imm, g.sol, g.m, w, q);
    CHECK(std::fabs(fine.value - base.value) <= base.quad_error_estimate);
  }
}

TEST_CASE("partition independence and orientation") {
  const auto g = golden();
  const auto imm = Immersion::rotation_standard(kGolden);
  const auto w = random_torus_form(2, 1, 5, 5, 3);
  QuadOptions split;
  split.split_half = true;
  const auto a = pair_current(imm, g.sol, g.m, w), b = pair_current(imm, g.sol, g.m, w, split);
  CHECK(std::fabs(a.value - b.value) <= 1e-12);

  // reversing leaf orientation: t -> -t is the suspension of the inverse rotation
  const auto rev = suspend(TransversalSpace::circle(), ReturnMap::rotation(-kGolden));
  const auto mrev = make_invariant_measure(rev, RawTransversalMeasure::lebesgue());
  const auto lin = Immersion::torus_linear({-1.0, -kGolden}, {0.0, 0.0}, {0.0, 1.0});
  const auto hr = homology_class(lin, rev, mrev);
  CHECK(hr.value[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(hr.value[1] == doctest::Approx(-kGolden).epsilon(1e-12));
}

TEST_CASE("asymptotic cycles") {
  const auto g = golden();
  const auto a = asymptotic_cycle(Immersion::rotation_standard(kGolden), g.sol, TransversalPoint::on_circle(0.3), 1e4);
  CHECK(std::fabs(a[0] - 1.0) <= 2e-4);
  CHECK(std::fabs(a[1] - kGolden) <= 2e-4);

  const auto half = suspend(TransversalSpace::circle(), ReturnMap::rotation_rational(1, 2));
  const auto b = asymptotic_cycle(Immersion::rotation_standard(0.5), half, TransversalPoint::on_circle(0.0), 1e4);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == 0.5);

  const auto dy = dyadic(6);
  const auto c = asymptotic_cycle(Immersion::dyadic_r3(6), dy.sol, TransversalPoint::cantor(std::vector<int>(6, 0)), 640.0);
  CHECK(std::fabs(c[0] - 1.0) <= 1e-3);
  CHECK(std::fabs(c[1]) <= 1e-3);
  CHECK(std::fabs(c[2]) <= 1e-3);

  // agrees with the homology class up to O(1/T)
  const auto x0 = TransversalPoint::on_circle(0.1);
  const auto hr = homology_class(Immersion::rotation_standard(kGolden), g.sol, g.m);
  for (double T : {10.5, 1000.5}) {
    const auto e = asymptotic_cycle(Immersion::rotation_standard(kGolden), g.sol, x0, T);
    CHECK(std::fabs(e[1] - hr.value[1]) <= 1.0 / T);
  }
}

TEST_CASE("two code paths agree") {
  const auto g = golden();
  auto r = pushforward_consistency(Immersion::rotation_standard(kGolden), g.sol, g.m, TorusForm::dtheta(2, 2));
  CHECK(r.difference <= 1e-10);
  const auto dy = dyadic(6);
  r = pushforward_consistency(Immersion::dyadic_r3(6), dy.sol, dy.m, TorusForm::dtheta(3, 1));
  CHECK(r.difference <= 1e-8);
  const auto eta = zero_form(2, {2, 1}, Phase::Cos);
  r = pushforward_consistency(Immersion::rotation_standard(kGolden), g.sol, g.m, d(eta));
  CHECK(std::fabs(r.current) <= 1e-8);
  CHECK(std::fabs(r.leafwise) <= 1e-8);
}

TEST_CASE("immersion validation") {
  const auto g = golden();
  CHECK(validate_immersion(Immersion::rotation_standard(kGolden), g.sol).gluing_defect <= 1e-9);
  CHECK_THROWS_AS(validate_immersion(Immersion::rotation_standard(0.3), g.sol), DomainError);
  const auto dy = dyadic(5);
  CHECK(validate_immersion(Immersion::dyadic_r3(5), dy.sol).gluing_defect <= 1e-9);
  CHECK_THROWS_AS(pair_current(Immersion::rotation_standard(kGolden), g.sol, g.m, TorusForm(2, 0)), DomainError);
}
