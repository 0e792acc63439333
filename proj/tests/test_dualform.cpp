#include <doctest.h>

#include <cmath>
#include <numbers>

#include "msol/common.hpp"
#include "msol/dualform.hpp"
#include "msol/smeasure.hpp"

using namespace msol;

namespace {
const double kGolden = 0.6180339887498949;
const double kTwoPiD = 2.0 * std::numbers::pi;

struct Golden {
  SuspensionSolenoid sol = suspend(TransversalSpace::circle(), ReturnMap::rotation(kGolden));
  TransversalMeasureInv m = make_invariant_measure(sol, RawTransversalMeasure::lebesgue());
  Immersion imm = Immersion::rotation_standard(kGolden);
};
}  // namespace

TEST_CASE("thom profile") {
  for (double r : {0.01, 0.02, 0.3}) {
    const auto p1 = ThomProfile::make(r, 1);
    CHECK(std::fabs(p1.fiber_integral() - 1.0) <= 1e-12);
    CHECK(p1(r) == 0.0);
    CHECK(p1(1.01 * r) == 0.0);
    CHECK(p1(0.0) == p1.peak());
    const auto p2 = ThomProfile::make(r, 2);
    CHECK(std::fabs(p2.fiber_integral() - 1.0) <= 1e-12);
    CHECK(p2(1.5 * r) == 0.0);
  }
  // peak scales like r^-(codim)
  CHECK(ThomProfile::make(0.01, 1).peak() / ThomProfile::make(0.02, 1).peak() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ThomProfile::make(0.01, 2).peak() / ThomProfile::make(0.02, 2).peak() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(ThomProfile::make(-1.0, 1), DomainError);
}

TEST_CASE("grid calculus") {
  TorusForm s(2, 0);
  s.add_term({1, 0}, {}, Phase::Sin, 1.0);
  const int G = 256;
  const auto g = grid_d(sample_form(s, G));
  const auto ex = sample_form(d(s), G);
  double err = 0.0;
  for (std::size_t c = 0; c < g.masks.size(); ++c)
    for (std::size_t i = 0; i < g.nodes(); ++i) err = std::max(err, std::fabs(g.comp[c][i] - ex.comp[c][i]));
  CHECK(err <= 1e-3);
  // second-order: error drops about 4x when G doubles
  const auto g2 = grid_d(sample_form(s, 2 * G));
  const auto ex2 = sample_form(d(s), 2 * G);
  double err2 = 0.0;
  for (std::size_t c = 0; c < g2.masks.size(); ++c)
    for (std::size_t i = 0; i < g2.nodes(); ++i) err2 = std::max(err2, std::fabs(g2.comp[c][i] - ex2.comp[c][i]));
  CHECK(err / err2 == doctest::Approx(4.0).epsilon(0.01));

  CHECK(std::fabs(grid_wedge_integrate(sample_form(TorusForm::dtheta(2, 1), 64), TorusForm::dtheta(2, 2)) - 1.0) <= 1e-12);
  CHECK(std::fabs(grid_wedge_integrate(sample_form(TorusForm::dtheta(2, 2), 64), sample_form(TorusForm::dtheta(2, 1), 64)) + 1.0) <= 1e-12);
  const auto w = random_torus_form(3, 0, 6, 5, 4);
  CHECK(grid_d(grid_d(sample_form(w, 32))).max_abs() <= 1e-10);
  const auto w1 = random_torus_form(2, 1, 6, 5, 9);
  CHECK_THROWS_AS(grid_wedge_integrate(sample_form(w1, 32), sample_form(w1, 64)), DomainError);
}

TEST_CASE("dual form of the golden rotation") {
  const Golden g;
  const auto p = ThomProfile::make(0.02, 1);
  const auto df = pushforward_dual_form(g.imm, g.sol, g.m, p, 256);
  CHECK(df.form.degree == 1);
  // transversal mass through a vertical line is 1, through a horizontal one alpha
  for (int idx : {0, 37, 128, 200}) {
    CHECK(std::fabs(std::fabs(fiber_line_integral(df.form, 1, idx)) - 1.0) <= 2e-3);
    CHECK(std::fabs(std::fabs(fiber_line_integral(df.form, 2, idx)) - kGolden) <= 2e-3);
  }
  CHECK(grid_d(df.form).max_abs() <= 5.0 / 256 * df.form.max_abs());

  CHECK(std::fabs(grid_wedge_integrate(df.form, TorusForm::dtheta(2, 2)) - pair_current(g.imm, g.sol, g.m, TorusForm::dtheta(2, 2)).value) <=
        2e-2 * kGolden);
  TorusForm eta(2, 0);
  eta.add_term({1, 2}, {}, Phase::Cos, 1.0);
  CHECK(std::fabs(grid_wedge_integrate(df.form, d(eta))) <= 1e-3);
}

TEST_CASE("class does not depend on the radius") {
  const Golden g;
  const auto a = pushforward_dual_form(g.imm, g.sol, g.m, ThomProfile::make(0.02, 1), 256);
  const auto b = pushforward_dual_form(g.imm, g.sol, g.m, ThomProfile::make(0.01, 1), 256);
  for (int i : {1, 2}) {
    const double x = grid_wedge_integrate(a.form, TorusForm::dtheta(2, i));
    const double y = grid_wedge_integrate(b.form, TorusForm::dtheta(2, i));
    CHECK(std::fabs(x - y) <= 1e-2 * std::fabs(x));
  }
  // dense leaves: the tubes overlap everywhere and the form is flat
  CHECK(a.form.max_abs() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("compact circle leaf") {
  const auto sol = suspend(TransversalSpace::finite({0.0}), ReturnMap::permutation({0}));
  const auto m = make_invariant_measure(sol, RawTransversalMeasure::finite_weights({1.0}));
  const auto imm = Immersion::torus_linear({1.0, 0.0}, {0.0, 0.5}, {0.0, 1.0});
  const auto rep = rsform_check(imm, sol, m, 0.05, 256,
                                {{"dtheta1", TorusForm::dtheta(2, 1)}, {"dtheta2", TorusForm::dtheta(2, 2)}});
  REQUIRE(rep.entries.size() == 2);
  CHECK(std::fabs(rep.entries[0].current - 1.0) <= 1e-12);
  CHECK(rep.max_rel_error <= 2e-2);
  CHECK(rep.max_abs_exact <= 1e-3);
  CHECK(rep.closedness <= rep.closedness_bound);
  const auto si = self_intersection(imm, sol, m, 0.05, 0.025, 256);
  CHECK(std::fabs(si.value) <= 1e-10);
  CHECK_FALSE(si.warnings.empty());
  CHECK_THROWS_AS(self_intersection(imm, sol, m, 0.05, 0.025, 256, true), DomainError);
  // a single tube: the peak follows the profile, 1/r
  const auto wide = pushforward_dual_form(imm, sol, m, ThomProfile::make(0.05, 1), 256);
  const auto thin = pushforward_dual_form(imm, sol, m, ThomProfile::make(0.025, 1), 256);
  CHECK(wide.form.max_abs() == doctest::Approx(ThomProfile::make(0.05, 1).peak()).epsilon(1e-9));
  CHECK(thin.form.max_abs() / wide.form.max_abs() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::fabs(std::fabs(fiber_line_integral(thin.form, 1, 3)) - 1.0) <= 2e-3);
}

TEST_CASE("tube overlap is rejected") {
  const auto sol = suspend(TransversalSpace::cantor(2, 3), ReturnMap::odometer(2));
  const auto m = make_invariant_measure(sol, RawTransversalMeasure::haar(sol.space()));
  CHECK_THROWS_AS(pushforward_dual_form(Immersion::dyadic_r3(3), sol, m, ThomProfile::make(0.4, 2), 32), DomainError);
}

TEST_CASE("flowbox bounds") {
  const Golden g;
  const auto b4 = flowbox_refinement_bound(g.imm, g.sol, RawTransversalMeasure::lebesgue(), 4);
  const auto b5 = flowbox_refinement_bound(g.imm, g.sol, RawTransversalMeasure::lebesgue(), 5);
  CHECK(b4.bounds.size() == 16);
  CHECK(b4.sum == doctest::Approx(b4.c0 / 16).epsilon(1e-12));
  CHECK(b5.sum == doctest::Approx(b4.sum / 2).epsilon(1e-12));

  const auto dsol = suspend(TransversalSpace::cantor(2, 8), ReturnMap::odometer(2));
  const auto haar = RawTransversalMeasure::haar(dsol.space());
  for (int dpt : {3, 6}) {
    const auto b = flowbox_refinement_bound(Immersion::dyadic_r3(8), dsol, haar, dpt);
    CHECK(b.sum == doctest::Approx(b.c0 * std::ldexp(1.0, -dpt)).epsilon(1e-12));
  }

  const auto mixed = RawTransversalMeasure::circle(TrigPoly::constant_poly(0.7), {{0.3, 0.3}});
  for (int dpt : {2, 6, 10}) {
    const auto b = flowbox_refinement_bound(g.imm, g.sol, mixed, dpt);
    CHECK(b.sum >= 0.09 * b.c0);
  }
}
