#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "msol/common.hpp"
#include "msol/transversal.hpp"

using namespace msol;

TEST_CASE("construction and validation") {
  const auto f = TransversalSpace::finite({0.2, 0.7});
  CHECK(f.cell_count() == 2);
  CHECK(TransversalSpace::cantor(2, 3).cell_count() == 8);
  CHECK_THROWS_AS(TransversalSpace::cantor(1, 3), DomainError);
  CHECK_THROWS_AS(TransversalSpace::cantor(2, 0), DomainError);
  CHECK_THROWS_AS(TransversalSpace::finite({0.2, 0.2}), DomainError);
  CHECK_THROWS_AS(TransversalSpace::finite({0.2, 1.0}), DomainError);
}

TEST_CASE("embedding values") {
  const auto c = TransversalSpace::circle();
  CHECK(embed_point(c, TransversalPoint::on_circle(0.25)) == 0.25);
  const auto k1 = TransversalSpace::cantor(2, 1);
  CHECK(embed_point(k1, TransversalPoint::cantor({0})) == 0.0);
  CHECK(embed_point(k1, TransversalPoint::cantor({1})) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const auto k2 = TransversalSpace::cantor(2, 2);
  CHECK(embed_point(k2, TransversalPoint::cantor({1, 1})) == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK_THROWS_AS(embed_point(k2, TransversalPoint::cantor({2, 0})), DomainError);
}

TEST_CASE("cylinder images are disjoint") {
  for (auto [p, d] : {std::pair{2, 10}, std::pair{3, 7}, std::pair{5, 5}, std::pair{7, 4}}) {
    const auto space = TransversalSpace::cantor(p, d);
    std::vector<Interval> iv;
    for (std::size_t i = 0; i < space.cell_count(); ++i) iv.push_back(embed_cylinder(p, cylinder_digits(p, d, i)));
    std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    CHECK(iv.front().lo >= 0.0);
    CHECK(iv.back().hi <= 1.0);
    bool disjoint = true;
    for (std::size_t i = 1; i < iv.size(); ++i) disjoint = disjoint && iv[i - 1].hi < iv[i].lo;
    CHECK(disjoint);
  }
}

TEST_CASE("cylinder index round trip") {
  for (std::size_t i = 0; i < 243; ++i) CHECK(cylinder_index(3, cylinder_digits(3, 5, i)) == i);
  // a_0 varies fastest
  CHECK(cylinder_digits(2, 3, 1) == std::vector<int>{1, 0, 0});
}

TEST_CASE("classification") {
  CHECK(classify_transversal(TransversalSpace::circle()).transversal == TransversalClass::UnionOfCircles);
  CHECK(classify_transversal(TransversalSpace::circle()).solenoid_type == "foliation of a (k+1)-manifold");
  CHECK(classify_transversal(TransversalSpace::finite({0.1, 0.5, 0.9})).transversal == TransversalClass::FiniteSet);
  CHECK(classify_transversal(TransversalSpace::cantor(2, 4)).transversal == TransversalClass::CantorSet);
  // relabelling finite points does not matter
  CHECK(classify_transversal(TransversalSpace::finite({0.3, 0.6})).transversal ==
        classify_transversal(TransversalSpace::finite({0.05, 0.95})).transversal);
}

TEST_CASE("total mass") {
  const auto k = TransversalSpace::cantor(2, 3);
  CHECK(total_mass(RawTransversalMeasure::haar(k)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(total_mass(RawTransversalMeasure::lebesgue()) == 1.0);
  CHECK(total_mass(RawTransversalMeasure::finite_weights({0.2, 0.5})) == doctest::Approx(0.7).epsilon(1e-15));
  const auto m = RawTransversalMeasure::circle(TrigPoly{1.0, {0.5}, {}}, {{0.3, 0.25}});
  CHECK(total_mass(m) == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("mass is additive over cells") {
  const auto circle = TransversalSpace::circle();
  const auto m = RawTransversalMeasure::circle(TrigPoly{1.0, {0.3, 0.0, 0.1}, {0.2}}, {{0.4, 0.5}});
  for (int level : {0, 3, 6}) {
    double s = 0.0;
    for (const auto& c : uniform_cells(circle, level)) s += cell_mass(circle, m, c);
    CHECK(s == doctest::Approx(total_mass(m)).epsilon(1e-13));
  }
  const auto k = TransversalSpace::cantor(3, 4);
  std::vector<double> w(81);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(i % 7 + 1);
  const auto cw = RawTransversalMeasure::cylinder_weights(w);
  for (int level = 0; level <= 4; ++level) {
    double s = 0.0;
    for (double x : coarsen_cylinder_weights(k, cw, level)) s += x;
    CHECK(s == doctest::Approx(total_mass(cw)).epsilon(1e-14));
  }
}

TEST_CASE("measure validation") {
  CHECK_THROWS_AS(validate_measure(TransversalSpace::circle(), RawTransversalMeasure::circle(TrigPoly{0.5, {1.0}, {}})),
                  DomainError);
  CHECK_THROWS_AS(validate_measure(TransversalSpace::finite({0.1, 0.2}), RawTransversalMeasure::finite_weights({1.0})),
                  DomainError);
  CHECK_THROWS_AS(validate_measure(TransversalSpace::finite({0.1}), RawTransversalMeasure::finite_weights({-1.0})),
                  DomainError);
  CHECK_NOTHROW(validate_measure(TransversalSpace::cantor(2, 3), RawTransversalMeasure::haar(TransversalSpace::cantor(2, 3))));
}

TEST_CASE("circle points are exact turns") {
  const auto x = TransversalPoint::on_circle(0.75);
  CHECK(x.circle_coordinate() == 0.75);
  CHECK(turns_from_coordinate(0.5) == (std::uint64_t{1} << 63));
  CHECK(coordinate_from_turns(std::uint64_t{1} << 62) == 0.25);
}
