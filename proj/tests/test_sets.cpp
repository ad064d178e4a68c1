#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "thinlab/sets.hpp"

using namespace thinlab;

TEST_CASE("ball measures") {
  CHECK(ball_measure(1, 1.0) == doctest::Approx(2.0));
  CHECK(ball_measure(2, 1.0) == doctest::Approx(M_PI));
  CHECK(ball_measure(1, 0.0) == 0.0);
  CHECK(ball_measure(2, 1.5, BallNorm::Sup) == doctest::Approx(9.0));
}

TEST_CASE("interval clipping against balls") {
  const auto E = MeasurableSet::intervals({{-1.0, 1.0}});
  CHECK(intersect_ball_measure(E, {0.0, 0.0}, 0.5) == doctest::Approx(1.0));

  const auto F = MeasurableSet::intervals({{0.0, 1.0}});
  CHECK(intersect_ball_measure(F, {-1.0, 0.0}, 0.5) == doctest::Approx(0.0));

  const auto G = MeasurableSet::intervals({{0.0, 1.0}, {2.0, 3.0}});
  CHECK(intersect_ball_measure(G, {1.5, 0.0}, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("interval construction rejects overlap, keeps sorted") {
  CHECK_THROWS(MeasurableSet::intervals({{0.0, 1.0}, {0.5, 2.0}}));
  const auto s = MeasurableSet::intervals({{2.0, 3.0}, {0.0, 1.0}});
  CHECK(s.interval_list().front().lo == 0.0);
  CHECK(s.measure() == doctest::Approx(2.0));
  CHECK(s.contains({2.5, 0.0}));
  CHECK_FALSE(s.contains({1.5, 0.0}));
}

TEST_CASE("measure additivity for disjoint unions") {
  const auto a = MeasurableSet::intervals({{0.0, 1.0}, {4.0, 4.5}});
  const auto b = MeasurableSet::intervals({{2.0, 3.0}});
  const auto both = MeasurableSet::intervals({{0.0, 1.0}, {4.0, 4.5}, {2.0, 3.0}});
  CHECK(both.measure() == doctest::Approx(a.measure() + b.measure()).epsilon(1e-12));
}

TEST_CASE("boxes: area, disc intersection") {
  const auto box = MeasurableSet::boxes({Box{{-1.0, -1.0}, {1.0, 1.0}}});
  CHECK(box.measure() == doctest::Approx(4.0));
  // unit disc sits inside the box
  CHECK(intersect_ball_measure(box, {0.0, 0.0}, 1.0) == doctest::Approx(M_PI).epsilon(1e-6));
  // sup-norm ball of radius 1 is the box itself
  CHECK(intersect_ball_measure(box, {0.0, 0.0}, 1.0, BallNorm::Sup) == doctest::Approx(4.0));
  CHECK_THROWS(MeasurableSet::boxes({Box{{0, 0}, {2, 2}}, Box{{1, 1}, {3, 3}}}));
}

TEST_CASE("periodic thin sets") {
  const auto single = periodic_thin_set(1, 1, 0.2);
  CHECK(single.interval_list().size() == 1);
  CHECK(single.measure() == doctest::Approx(0.4));

  const auto five = periodic_thin_set(1, 3, 0.1);
  CHECK(five.interval_list().size() == 5);
  CHECK(five.measure() == doctest::Approx(1.0));

  const auto box = periodic_thin_set(2, 4, 0.05);
  CHECK(box.measure() == doctest::Approx(0.4));
  CHECK(box.box_list().size() == 1);
  CHECK(box.box_list()[0].lo[0] == doctest::Approx(-2.0));
  CHECK(box.box_list()[0].hi[1] == doctest::Approx(0.05));

  CHECK_THROWS(periodic_thin_set(1, 3, 0.6));  // half_width >= spacing/2
}

TEST_CASE("thinness certification basics") {
  const auto rho = RadiusFunction::power_law(1.0);

  const auto none = MeasurableSet::empty(1);
  CenterSpec cs;
  cs.lo = {-4.0, 0.0};
  cs.hi = {4.0, 0.0};
  CHECK(certify_thinness(none, rho, cs).epsilon_measured == 0.0);

  const auto whole = MeasurableSet::intervals({{-8.0, 8.0}});
  const auto cert = certify_thinness(whole, RadiusFunction::constant(1.0), cs);
  CHECK(cert.epsilon_measured == doctest::Approx(1.0));
}

TEST_CASE("thinness of the periodic construction") {
  // intervals at |j| <= 7 with half-width 0.1 * rho1(8) = 0.0125
  const auto rho = RadiusFunction::power_law(1.0);
  const auto E = periodic_thin_set(1, 8, 0.1 * rho(8.0));
  CenterSpec cs;
  cs.lo = {-8.5, 0.0};
  cs.hi = {8.5, 0.0};
  // worst ball grazes the outermost spike from outside: the center c solves
  // c - rho(c) = 7 - h, where the ratio h/rho(c) = h*c beats h/rho(7)
  const double h = 0.0125;
  const double graze = 0.5 * ((7.0 - h) + std::sqrt((7.0 - h) * (7.0 - h) + 4.0));
  cs.extra = {{graze, 0.0}};
  const auto cert = certify_thinness(E, rho, cs);
  CHECK(cert.epsilon_measured <= 0.1 * (1.0 + 1e-9));
  CHECK(cert.epsilon_measured == doctest::Approx(h * graze).epsilon(1e-9));
  CHECK(std::abs(cert.worst_center[0]) == doctest::Approx(graze).epsilon(1e-9));
}

TEST_CASE("certification refuses coarse center grids") {
  const auto E = periodic_thin_set(1, 4, 0.1);
  CenterSpec cs;
  cs.lo = {-4.0, 0.0};
  cs.hi = {4.0, 0.0};
  cs.spacing = 1.0;  // required is rho/2 = 1/8 at the domain edge
  CHECK_THROWS(certify_thinness(E, RadiusFunction::power_law(1.0), cs));
}

TEST_CASE("thinness is monotone under subsets") {
  const auto rho = RadiusFunction::constant(0.5);
  const auto super = periodic_thin_set(1, 6, 0.05);
  std::vector<Interval> half(super.interval_list().begin(),
                             super.interval_list().begin() + 5);
  const auto sub = MeasurableSet::intervals(half);
  CenterSpec cs;
  cs.lo = {-6.0, 0.0};
  cs.hi = {6.0, 0.0};
  const auto cs_sub = certify_thinness(sub, rho, cs).epsilon_measured;
  const auto cs_sup = certify_thinness(super, rho, cs).epsilon_measured;
  CHECK(cs_sub <= cs_sup + 1e-12);
}

TEST_CASE("grid masks track exact sets within a cell") {
  const auto exact = periodic_thin_set(1, 4, 0.1);
  const double cell = 1.0 / 512.0;
  const auto mask = exact.to_mask(cell);
  CHECK(mask.is_mask());
  // one cell of slack per interval boundary (two boundaries each)
  const double slack = 2.0 * 7.0 * cell;
  CHECK(std::abs(mask.measure() - exact.measure()) <= slack);
  const double mi = intersect_ball_measure(mask, {0.0, 0.0}, 2.0);
  const double ei = intersect_ball_measure(exact, {0.0, 0.0}, 2.0);
  CHECK(std::abs(mi - ei) <= slack);
}

TEST_CASE("csv round trip") {
  const auto s = MeasurableSet::intervals({{-1.25, -0.5}, {0.75, 2.0}});
  const std::string path = "/tmp/thinlab_test_set.csv";
  {
    std::ofstream os(path);
    s.write_csv(os);
  }
  const auto rt = MeasurableSet::read_csv(path);
  REQUIRE(rt.interval_list().size() == 2);
  CHECK(rt.interval_list()[0].lo == doctest::Approx(-1.25));
  CHECK(rt.interval_list()[1].hi == doctest::Approx(2.0));
  std::remove(path.c_str());
}
