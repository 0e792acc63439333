#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "msol/common.hpp"
#include "msol/solenoid.hpp"

using namespace msol;

namespace {
const double kGolden = 0.6180339887498949;

// largest circular gap of {x0 + n alpha}, n < N, by sorting
double brute_gap(double x0, double alpha, int N) {
  std::vector<double> pts;
  for (int n = 0; n < N; ++n) pts.push_back(wrap01(x0 + n * alpha));
  std::sort(pts.begin(), pts.end());
  double g = pts.front() + 1.0 - pts.back();
  for (std::size_t i = 1; i < pts.size(); ++i) g = std::max(g, pts[i] - pts[i - 1]);
  return g;
}
}  // namespace

TEST_CASE("suspension kinds") {
  CHECK_NOTHROW(suspend(TransversalSpace::cantor(2, 5), ReturnMap::odometer(2)));
  CHECK_NOTHROW(suspend(TransversalSpace::circle(), ReturnMap::rotation(kGolden)));
  CHECK_THROWS_AS(suspend(TransversalSpace::circle(), ReturnMap::odometer(2)), DomainError);
  CHECK(suspend(TransversalSpace::circle(), ReturnMap::rotation(0.1)).oriented());
}

TEST_CASE("leaf points") {
  const auto rot = suspend(TransversalSpace::circle(), ReturnMap::rotation(kGolden));
  const auto lp = leaf_point_at(rot, TransversalPoint::on_circle(0.1), 2.5);
  CHECK(lp.t == 0.5);
  CHECK(lp.x.circle_coordinate() == doctest::Approx(wrap01(0.1 + 2 * kGolden)).epsilon(1e-15));

  const auto dy = suspend(TransversalSpace::cantor(2, 3), ReturnMap::odometer(2));
  const auto q = leaf_point_at(dy, TransversalPoint::cantor({0, 0, 0}), 3.0);
  CHECK(q.t == 0.0);
  CHECK(q.x.digits == std::vector<int>{1, 1, 0});

  const auto x0 = TransversalPoint::on_circle(0.37);
  const auto z = leaf_point_at(rot, x0, 0.0);
  CHECK(z.x == x0);
  CHECK(z.t == 0.0);

  // flow property for integer s
  for (int s = -3; s <= 3; ++s)
    for (double t : {0.25, 1.75, -2.5}) {
      const auto a = leaf_point_at(rot, x0, s + t);
      const auto b = leaf_point_at(rot, leaf_point_at(rot, x0, s).x, t);
      CHECK(a.x == b.x);
      CHECK(a.t == doctest::Approx(b.t).epsilon(1e-15));
    }
}

TEST_CASE("holonomy group") {
  const auto dy = suspend(TransversalSpace::cantor(2, 3), ReturnMap::odometer(2));
  CHECK(holonomy_compose({2}, {-2}) == HolonomyGerm{0});
  const auto p = TransversalPoint::cantor({0, 1, 1});
  CHECK(holonomy_apply(dy, {0}, p) == p);
  CHECK(holonomy_apply(dy, {4}, TransversalPoint::cantor({0, 0, 0})).digits == std::vector<int>{0, 0, 1});
  const auto rot = suspend(TransversalSpace::circle(), ReturnMap::rotation(kGolden));
  CHECK(holonomy_apply(rot, {1}, TransversalPoint::on_circle(0.9)).circle_coordinate() ==
        doctest::Approx(wrap01(0.9 + kGolden)).epsilon(1e-15));

  for (int a = -10; a <= 10; ++a)
    for (int b = -10; b <= 10; ++b) {
      const HolonomyGerm ga{a}, gb{b};
      CHECK(holonomy_apply(dy, holonomy_compose(ga, gb), p) == holonomy_apply(dy, ga, holonomy_apply(dy, gb, p)));
      CHECK(holonomy_compose(holonomy_compose(ga, gb), {3}) == holonomy_compose(ga, holonomy_compose(gb, {3})));
    }
}

TEST_CASE("minimality by leaf density") {
  const auto rot = suspend(TransversalSpace::circle(), ReturnMap::rotation(kGolden));
  CHECK(is_minimal(rot, 8, 10000, 0.01));
  CHECK_FALSE(is_minimal(suspend(TransversalSpace::circle(), ReturnMap::rotation_rational(1, 2)), 8, 10000, 0.1));
  CHECK(is_minimal(suspend(TransversalSpace::cantor(2, 6), ReturnMap::odometer(2)), 4, 64, 1.0 / 64));
  CHECK_FALSE(is_minimal(suspend(TransversalSpace::finite({0.1, 0.3, 0.6, 0.9}), ReturnMap::permutation({1, 0, 3, 2})), 4,
                         100, 0.01));
}

TEST_CASE("density radius") {
  const auto rot = suspend(TransversalSpace::circle(), ReturnMap::rotation(kGolden));
  const double r100 = leaf_density_radius(rot, TransversalPoint::on_circle(0.0), 100);
  CHECK(r100 == doctest::Approx(brute_gap(0.0, kGolden, 100)).epsilon(1e-12));
  // frozen from a 50-digit evaluation of the sorted orbit; equals alpha^9
  CHECK(r100 == doctest::Approx(0.013155617496424838).epsilon(1e-12));
  double prev = 1.0;
  for (int N : {1, 2, 5, 13, 34, 100, 500, 2000}) {
    const double r = leaf_density_radius(rot, TransversalPoint::on_circle(0.2), static_cast<std::size_t>(N));
    CHECK(r <= prev + 1e-15);
    prev = r;
  }
  const auto cyc = suspend(TransversalSpace::finite({0.1, 0.4, 0.8}), ReturnMap::permutation({1, 2, 0}));
  CHECK(leaf_density_radius(cyc, TransversalPoint::finite(0), 3) == doctest::Approx(0.4).epsilon(1e-12));
  const auto dy = suspend(TransversalSpace::cantor(2, 3), ReturnMap::odometer(2));
  CHECK(leaf_density_radius(dy, TransversalPoint::cantor({0, 0, 0}), 8) == 0.0);
}
