#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "msol/common.hpp"
#include "msol/dynamics.hpp"

using namespace msol;

namespace {
const double kGolden = 0.6180339887498949;
}

TEST_CASE("return map iteration") {
  const auto c = TransversalSpace::circle();
  const auto y = apply_return_map(c, ReturnMap::rotation(0.25), TransversalPoint::on_circle(0.9), 2);
  CHECK(y.circle_coordinate() == doctest::Approx(0.4).epsilon(1e-15));

  const auto k = TransversalSpace::cantor(2, 3);
  CHECK(apply_return_map(k, ReturnMap::odometer(2), TransversalPoint::cantor({1, 1, 0}), 1).digits ==
        std::vector<int>{0, 0, 1});
  CHECK(apply_return_map(k, ReturnMap::odometer(2), TransversalPoint::cantor({1, 1, 1}), 1).digits ==
        std::vector<int>{0, 0, 0});
  CHECK_THROWS_AS(check_compatible(k, ReturnMap::rotation(0.1)), DomainError);
  CHECK_THROWS_AS(ReturnMap::circle_diffeo(0.1, 2), DomainError);
}

TEST_CASE("iterates invert") {
  const auto c = TransversalSpace::circle();
  for (double x : {0.0, 0.123, 0.5, 0.987}) {
    const auto p = TransversalPoint::on_circle(x);
    CHECK(apply_return_map(c, ReturnMap::rotation(kGolden), apply_return_map(c, ReturnMap::rotation(kGolden), p, 37), -37) == p);
    const auto f = ReturnMap::circle_diffeo(0.05, 2);
    const auto back = apply_return_map(c, f, apply_return_map(c, f, p, 5), -5);
    CHECK(std::fabs(wrap_centered(back.circle_coordinate() - x)) <= 1e-12);
  }
  const auto k = TransversalSpace::cantor(3, 4);
  for (std::size_t i = 0; i < 81; i += 7) {
    const auto p = TransversalPoint::cantor(cylinder_digits(3, 4, i));
    CHECK(apply_return_map(k, ReturnMap::odometer(3), apply_return_map(k, ReturnMap::odometer(3), p, -100), 100) == p);
  }
  const auto fs = TransversalSpace::finite({0.1, 0.4, 0.8});
  const auto sigma = ReturnMap::permutation({2, 0, 1});
  CHECK(apply_return_map(fs, sigma, apply_return_map(fs, sigma, TransversalPoint::finite(1), 4), -4).index == 1);
}

TEST_CASE("birkhoff averages") {
  const auto c = TransversalSpace::circle();
  const std::size_t N = 100000;
  const double v = birkhoff_average(c, ReturnMap::rotation(kGolden), Observable::trig(TrigPoly{0.0, {1.0}, {}}),
                                    TransversalPoint::on_circle(0.0), N);
  // |sum_{n<N} e^{2 pi i n alpha}| = |sin(pi N alpha) / sin(pi alpha)|
  const double pi = std::numbers::pi;
  const double bound = std::fabs(std::sin(pi * N * kGolden) / std::sin(pi * kGolden)) / N;
  CHECK(std::fabs(v) <= bound + 1e-12);
  CHECK(std::fabs(v) <= 2e-5);

  const auto two = TransversalSpace::finite({0.2, 0.6});
  CHECK(birkhoff_average(two, ReturnMap::permutation({1, 0}), Observable::point(1), TransversalPoint::finite(0), 10) ==
        0.5);

  const auto k = TransversalSpace::cantor(2, 3);
  for (std::size_t i = 0; i < 8; ++i)
    CHECK(birkhoff_average(k, ReturnMap::odometer(2), Observable::cylinder({0}),
                           TransversalPoint::cantor(cylinder_digits(2, 3, i)), 8) == 0.5);
}

TEST_CASE("invariant measures of the families") {
  const auto k = TransversalSpace::cantor(2, 4);
  const auto odo = invariant_measures(k, ReturnMap::odometer(2));
  REQUIRE(odo.measures.size() == 1);
  for (double w : odo.measures[0].measure.weights) CHECK(w == 1.0 / 16);

  const auto c = TransversalSpace::circle();
  const auto dif = invariant_measures(c, ReturnMap::circle_diffeo(0.1, 1));
  REQUIRE(dif.measures.size() == 2);
  std::set<double> where;
  for (const auto& e : dif.measures) {
    REQUIRE(e.measure.atoms.size() == 1);
    where.insert(e.measure.atoms[0].x);
    CHECK(e.ergodic);
  }
  CHECK(where == std::set<double>{0.0, 0.5});
  const auto fp = circle_diffeo_fixed_points(ReturnMap::circle_diffeo(0.1, 1));
  REQUIRE(fp.size() == 2);
  for (const auto& p : fp) {
    const double slope = 1.0 + 0.2 * std::numbers::pi * std::cos(2 * std::numbers::pi * p.x);
    CHECK(p.derivative == doctest::Approx(slope).epsilon(1e-12));
    CHECK(p.attracting == (slope < 1.0));
  }

  const auto rot = invariant_measures(c, ReturnMap::rotation(kGolden));
  REQUIRE(rot.measures.size() == 1);
  CHECK(rot.measures[0].measure.density.is_constant());

  const auto perm = invariant_measures(TransversalSpace::finite({0.1, 0.3, 0.6, 0.9}), ReturnMap::permutation({1, 0, 3, 2}));
  CHECK(perm.measures.size() == 2);
}

TEST_CASE("ulam on the golden rotation") {
  UlamOptions o;
  o.bins = 512;
  const auto u = ulam_invariant_measure(ReturnMap::rotation(kGolden), o);
  double dev = 0.0;
  for (double s : u.stationary) dev = std::max(dev, std::fabs(s * 512 - 1.0));
  CHECK(dev <= 1e-6 * 512);
  CHECK(u.max_row_sum_error <= 1e-12);
  CHECK(std::fabs(u.eigenvalue - 1.0) <= 1e-9);
  double tv = 0.0;
  for (double s : u.stationary) tv += std::fabs(s - 1.0 / 512);
  CHECK(tv <= 1e-4);
}

TEST_CASE("classification flags") {
  const auto c = TransversalSpace::circle();
  auto r = classify_dynamics(c, ReturnMap::rotation(kGolden));
  CHECK(r.minimal);
  CHECK(r.uniquely_ergodic);
  r = classify_dynamics(c, ReturnMap::rotation_rational(1, 2));
  CHECK_FALSE(r.minimal);
  CHECK_FALSE(r.uniquely_ergodic);
  REQUIRE(r.period);
  CHECK(*r.period == 2);
  CHECK_FALSE(r.warnings.empty());
  r = classify_dynamics(c, ReturnMap::circle_diffeo(0.1, 1));
  CHECK_FALSE(r.minimal);
  CHECK(r.ergodic_measures.size() == 2);

  // odometer p=3 d=5: the orbit of 0 enumerated by hand visits all 243 points
  const auto k = TransversalSpace::cantor(3, 5);
  std::set<std::vector<int>> seen;
  std::vector<int> a(5, 0);
  for (int s = 0; s < 243; ++s) {
    seen.insert(a);
    for (int i = 0; i < 5; ++i) {
      if (++a[static_cast<std::size_t>(i)] < 3) break;
      a[static_cast<std::size_t>(i)] = 0;
    }
  }
  const bool single_orbit = seen.size() == 243;
  r = classify_dynamics(k, ReturnMap::odometer(3));
  CHECK(r.minimal == single_orbit);
  CHECK(r.uniquely_ergodic == single_orbit);

  r = classify_dynamics(TransversalSpace::finite({0.1, 0.4, 0.8}), ReturnMap::permutation({1, 2, 0}));
  CHECK(r.minimal);
  CHECK(r.uniquely_ergodic);
  r = classify_dynamics(TransversalSpace::finite({0.1, 0.3, 0.6, 0.9}), ReturnMap::permutation({1, 0, 3, 2}));
  CHECK_FALSE(r.minimal);
  CHECK_FALSE(r.uniquely_ergodic);
}

TEST_CASE("unique ergodicity deviation") {
  const auto c = TransversalSpace::circle();
  std::vector<TransversalPoint> pts;
  for (int i = 0; i < 16; ++i) pts.push_back(TransversalPoint::on_circle(i / 16.0));
  const std::vector<Observable> obs{Observable::trig(TrigPoly{0.0, {1.0}, {}}), Observable::trig(TrigPoly{0.0, {}, {0.0, 1.0}})};
  CHECK(unique_ergodicity_deviation(c, ReturnMap::rotation(kGolden), obs, pts, 100000) <= 5e-5);

  const std::vector<TransversalPoint> near{TransversalPoint::on_circle(0.01), TransversalPoint::on_circle(0.45)};
  CHECK(unique_ergodicity_deviation(c, ReturnMap::circle_diffeo(0.1, 1), {obs[0]}, near, 10000) >= 0.5);

  const auto two = TransversalSpace::finite({0.2, 0.6});
  CHECK(unique_ergodicity_deviation(two, ReturnMap::permutation({0, 1}), {Observable::point(0)},
                                    {TransversalPoint::finite(0), TransversalPoint::finite(1)}, 10) ==
        doctest::Approx(0.5));
}

TEST_CASE("continued fractions") {
  CHECK(rotation_rationality(ReturnMap::rotation_rational(3, 7)).has_value());
  CHECK_FALSE(rotation_rationality(ReturnMap::rotation(kGolden)).has_value());
  const auto cf = continued_fraction(kGolden, 20);
  for (auto t : cf.terms) CHECK(t <= 1);
}

TEST_CASE("invariance of returned measures") {
  const auto k = TransversalSpace::cantor(2, 6);
  const auto m = invariant_measures(k, ReturnMap::odometer(2)).measures[0].measure;
  // push-forward of a cylinder weight table under +1
  for (std::size_t i = 0; i < 64; ++i) {
    const auto img = apply_return_map(k, ReturnMap::odometer(2), TransversalPoint::cantor(cylinder_digits(2, 6, i)), 1);
    CHECK(m.weights[cylinder_index(2, img.digits)] == m.weights[i]);
  }
}
