#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "thinlab/corpus.hpp"
#include "thinlab/mollifier.hpp"
#include "thinlab/spectral.hpp"

using namespace thinlab;
using cplx = std::complex<double>;

namespace {

double rel_err(const GridFunction& a, const GridFunction& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("grid spec and dual involution") {
  const GridSpec g{1, 32.0, 1 << 10};
  CHECK(g.spacing() == doctest::Approx(32.0 / 1024.0));
  CHECK(g.dual().extent == doctest::Approx(1024.0 / 32.0));
  CHECK(g.dual().dual() == g);
}

TEST_CASE("gaussian is the transform fixed point (d=1)") {
  const GridSpec g{1, 32.0, 1 << 12};
  const auto f = GridFunction::sample(
      g, [](Point p) { return cplx(std::exp(-M_PI * p[0] * p[0]), 0.0); });
  const auto fh = forward_transform(f);
  double worst = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const double y = fh.point(i)[0];
    worst = std::max(worst, std::abs(fh[i].real() - std::exp(-M_PI * y * y)) +
                                std::abs(fh[i].imag()));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("shift becomes modulation") {
  const GridSpec g{1, 32.0, 1 << 11};
  const double a = 2.0;
  const auto f = GridFunction::sample(
      g, [](Point p) { return cplx(std::exp(-M_PI * p[0] * p[0]), 0.0); });
  const auto fa = GridFunction::sample(g, [a](Point p) {
    const double u = p[0] - a;
    return cplx(std::exp(-M_PI * u * u), 0.0);
  });
  const auto fh = forward_transform(f);
  const auto fah = forward_transform(fa);
  double worst = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const double y = fh.point(i)[0];
    const cplx expect = std::polar(1.0, -2.0 * M_PI * a * y) * fh[i];
    worst = std::max(worst, std::abs(fah[i] - expect));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("parseval and round trip on the corpus") {
  const GridSpec g{1, 32.0, 1 << 10};
  for (const auto& f : make_corpus(g, 6, 11)) {
    const auto fh = forward_transform(f);
    CHECK(energy(fh) == doctest::Approx(energy(f)).epsilon(1e-10));
    CHECK(rel_err(inverse_transform(fh), f) <= 1e-10);
  }
}

TEST_CASE("gaussian fixed point (d=2)") {
  const GridSpec g{2, 16.0, 1 << 7};
  const auto f = GridFunction::sample(g, [](Point p) {
    return cplx(std::exp(-M_PI * (p[0] * p[0] + p[1] * p[1])), 0.0);
  });
  const auto fh = forward_transform(f);
  double worst = 0.0;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const Point y = fh.point(i);
    const double expect = std::exp(-M_PI * (y[0] * y[0] + y[1] * y[1]));
    worst = std::max(worst, std::abs(fh[i] - cplx(expect, 0.0)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("d=2 transform separates over axes") {
  const GridSpec g2{2, 16.0, 1 << 7};
  const GridSpec g1{1, 16.0, 1 << 7};
  auto gx = [](double x) { return std::exp(-M_PI * x * x); };
  auto gy = [](double y) { return window_profile(std::fabs(y) / 0.5); };

  const auto f = GridFunction::sample(
      g2, [&](Point p) { return cplx(gx(p[0]) * gy(p[1]), 0.0); });
  const auto fx = GridFunction::sample(g1, [&](Point p) { return cplx(gx(p[0]), 0.0); });
  const auto fy = GridFunction::sample(g1, [&](Point p) { return cplx(gy(p[0]), 0.0); });

  const auto fh = forward_transform(f);
  const auto fxh = forward_transform(fx);
  const auto fyh = forward_transform(fy);

  const int n = g2.samples;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx prod = fxh[i] * fyh[j];
      const cplx got = fh[static_cast<std::size_t>(i) * n + j];
      num += std::norm(got - prod);
      den += std::norm(prod);
    }
  CHECK(std::sqrt(num / den) <= 1e-8);
}

TEST_CASE("energy split bookkeeping") {
  const GridSpec g{1, 32.0, 1 << 10};
  const auto f = GridFunction::sample(g, [](Point p) {
    // smoothed indicator of [0,1]
    const double d = std::min(p[0], 1.0 - p[0]);
    return cplx(window_profile(1.0 - 20.0 * d), 0.0);
  });

  const auto full = energy_split(f, MeasurableSet::intervals({{-16.0, 16.0}}));
  CHECK(full.off_set == doctest::Approx(0.0).epsilon(1e-10));

  const auto none = energy_split(f, MeasurableSet::empty(1));
  CHECK(none.on_set == 0.0);

  // the smoothing skirt (width 0.05 per side) holds a few percent of ||f||^2
  const auto unit = energy_split(f, MeasurableSet::intervals({{0.0, 1.0}}));
  CHECK(unit.on_set / unit.total >= 0.95);
  CHECK(unit.on_set / unit.total < 1.0);
  CHECK(unit.on_set + unit.off_set == doctest::Approx(unit.total).epsilon(1e-10));
}

TEST_CASE("energy split refuses sets outside the domain") {
  const GridSpec g{1, 8.0, 1 << 8};
  const auto f = GridFunction::sample(
      g, [](Point p) { return cplx(std::exp(-p[0] * p[0]), 0.0); });
  CHECK_THROWS(energy_split(f, MeasurableSet::intervals({{3.0, 5.0}})));
}

TEST_CASE("uncertainty defect sentinels") {
  const GridSpec g{1, 32.0, 1 << 10};
  const auto f = GridFunction::sample(
      g, [](Point p) { return cplx(std::exp(-M_PI * p[0] * p[0]), 0.0); });
  const auto none = MeasurableSet::empty(1);
  CHECK(uncertainty_defect(f, none, none) == doctest::Approx(0.5).epsilon(1e-12));

  const auto whole = MeasurableSet::intervals({{-16.0, 16.0}});
  CHECK(uncertainty_defect(f, whole, none) == doctest::Approx(1.0).epsilon(1e-9));

  GridFunction zero(g);
  CHECK_THROWS(uncertainty_defect(zero, none, none));
}

TEST_CASE("corpus is deterministic and prefix-stable") {
  const GridSpec g{1, 32.0, 1 << 9};
  const auto a = make_corpus(g, 8, 42);
  const auto b = make_corpus(g, 12, 42);
  REQUIRE(a.size() == 8);
  for (int k = 0; k < 8; ++k)
    for (std::size_t i = 0; i < a[k].size(); ++i)
      CHECK(a[k][i] == b[k][i]);
  CHECK(corpus_label(0) == "gaussian-0");
  CHECK(corpus_label(5) == "noise-5");
}
