#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <memory>

#include "doctest.h"
#include "thinlab/corpus.hpp"
#include "thinlab/operators.hpp"

using namespace thinlab;
using cplx = std::complex<double>;

namespace {

struct Lab {
  GridSpec grid{1, 64.0, 1 << 12};
  CompatiblePair pair = parse_pair("wolff");
  std::shared_ptr<const MollifierSystem> sys;
  std::shared_ptr<OperatorPair> op;
  std::vector<GridFunction> corpus;

  Lab() {
    MollifierSystem::Options opt;
    opt.c1 = pair.c1;
    opt.rho1 = pair.rho1;
    opt.domain_extent = grid.extent;
    sys = MollifierSystem::build(opt);
    op = std::make_shared<OperatorPair>(sys, pair, grid);
    corpus = make_corpus(grid, 10, 17);
  }
};

Lab& lab() {
  static Lab l;
  return l;
}

double rel_err(const GridFunction& a, const GridFunction& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

double l2(const GridFunction& f) { return std::sqrt(energy(f)); }

}  // namespace

TEST_CASE("splitting reproduces the identity on the corpus") {
  auto& L = lab();
  for (const auto& f : L.corpus) {
    auto s = L.op->apply_S(f);
    const auto t = L.op->apply_T(f);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += t[i];
    CHECK(rel_err(s, f) <= 1e-8);
  }
}

TEST_CASE("band-limited functions pass through S untouched") {
  auto& L = lab();
  // fhat supported in |y| <= 0.9 < C1/rho1(1/2) = 1: every multiplier is 1
  GridFunction fh(L.grid.dual());
  for (std::size_t i = 0; i < fh.size(); ++i) {
    const double y = fh.point(i)[0];
    fh[i] = window_profile(std::fabs(y) / 0.45);
  }
  const auto f = inverse_transform(fh);
  const auto sf = L.op->apply_S(f);
  const auto tf = L.op->apply_T(f);
  CHECK(rel_err(sf, f) <= 1e-8);
  CHECK(l2(tf) <= 1e-8 * l2(f));

  GridFunction zero(L.grid);
  CHECK(l2(L.op->apply_S(zero)) == 0.0);
}

TEST_CASE("oscillatory functions pass through T") {
  // modulation at y=50 with all multipliers supported in |y| <= 16
  const GridSpec grid{1, 32.0, 1 << 12};
  MollifierSystem::Options opt;
  opt.domain_extent = grid.extent;
  const auto sys = MollifierSystem::build(opt);
  const OperatorPair op(sys, parse_pair("wolff"), grid);

  const auto f = GridFunction::sample(grid, [](Point p) {
    return std::polar(std::exp(-M_PI * p[0] * p[0] / 4.0), 2.0 * M_PI * 50.0 * p[0]);
  });
  const auto tf = op.apply_T(f);
  auto masked = f;
  for (std::size_t i = 0; i < masked.size(); ++i) {
    const double r = std::fabs(masked.point(i)[0]);
    double sum = 0.0;
    for (int j = 0; j <= sys->j_max(); ++j) sum += sys->partition_term(j, r);
    masked[i] *= sum;
  }
  CHECK(rel_err(tf, masked) <= 1e-8);
  CHECK(l2(op.apply_S(f)) <= 1e-8 * l2(f));
}

TEST_CASE("spatial kernel: support structure and row integral") {
  auto& L = lab();
  // |x| <= 1: only the j=0 term survives
  const double x = 0.7, y = 0.9;
  CHECK(L.op->kernel_K(x, y) ==
        doctest::Approx(L.sys->partition_term(0, x) *
                        L.sys->phi_family(-1, std::fabs(x - y)))
            .epsilon(1e-12));

  // row integral == sum of psi_j(x) * (integral of phi) == 1 inside the domain
  const double half = L.sys->tail_radius(1e-12) + 1.0;
  for (double xr : {0.0, 1.7, 6.3, 21.0}) {
    const int n = 1 << 15;
    const double h = 2.0 * half / n;
    double row = 0.0;
    for (int i = 0; i < n; ++i) {
      const double yy = xr - half + (i + 0.5) * h;
      row += L.op->kernel_K(xr, yy) * h;
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("kernel sups obey the Schur caps") {
  auto& L = lab();
  const auto sups = L.op->kernel_sups(128);
  const double cap = 3.0 * L.sys->l1_norm() * (1.0 + 1e-6);
  CHECK(sups.k_row <= cap);
  CHECK(sups.k_row >= L.sys->l1_norm() * 0.9);
  CHECK(sups.k_col > 0.0);
  CHECK(sups.l_row > 0.0);
  CHECK(sups.l_col > 0.0);
  CHECK(std::isfinite(sups.l_row));
  CHECK(std::isfinite(sups.l_col));
}

TEST_CASE("frequency kernel: zero at origin, non-negative factors") {
  auto& L = lab();
  CHECK(L.op->kernel_L(0.3, 0.0) == 0.0);
  for (double y : {0.6, 1.2, 2.5, 7.0, 19.0})
    for (int j = 0; j <= L.sys->j_max(); ++j)
      CHECK(L.sys->hat_phi_j(j, y) - L.sys->hat_phi_j(j - 1, y) >= -1e-15);
}

TEST_CASE("two-path check: S via kernel quadrature") {
  auto& L = lab();
  const auto& f = L.corpus[0];
  const auto sf = L.op->apply_S(f);
  const double h = L.grid.spacing();
  double ref = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) ref = std::max(ref, std::abs(sf[i]));
  for (int probe : {1100, 1700, 2048, 2600, 3100}) {
    const double x = f.point(probe)[0];
    cplx acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      acc += L.op->kernel_K(x, f.point(i)[0]) * f[i] * h;
    CHECK(std::abs(acc - sf[probe]) <= 1e-4 * ref);
  }
}

TEST_CASE("two-path check: transform of T via the frequency kernel") {
  auto& L = lab();
  const auto& f = L.corpus[1];
  const auto fh = forward_transform(f);
  const auto th = forward_transform(L.op->apply_T(f));
  const double eta = fh.spacing();
  double ref = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i) ref = std::max(ref, std::abs(th[i]));
  for (int probe : {1498, 2048, 2048 + 351, 2048 + 700}) {
    const double x = th.point(probe)[0];
    cplx acc = 0.0;
    for (std::size_t i = 0; i < fh.size(); ++i)
      acc += L.op->kernel_L(x, fh.point(i)[0]) * fh[i] * eta;
    CHECK(std::abs(acc - th[probe]) <= 1e-4 * ref);
  }
}

TEST_CASE("schur bounds on empty sets degenerate cleanly") {
  auto& L = lab();
  const auto none = MeasurableSet::empty(1);
  const auto rep = L.op->schur_bounds(none, none, 0.1, L.corpus, 64);
  CHECK(rep.thin_row_sup == 0.0);
  CHECK(rep.thin_col_sup == 0.0);
  CHECK(rep.leakage_alpha == 0.0);
  CHECK(rep.leakage_beta == 0.0);
  CHECK(rep.sup_row <= 3.0 * L.sys->l1_norm() * (1.0 + 1e-6));
}

TEST_CASE("S is bounded by the Schur product") {
  auto& L = lab();
  const auto sups = L.op->kernel_sups(64);
  const double bound = std::sqrt(sups.k_row * sups.k_col);
  for (const auto& f : L.corpus) CHECK(l2(L.op->apply_S(f)) <= bound * l2(f) * (1.0 + 1e-9));
}

TEST_CASE("empirical inequality constant: sentinels and warnings") {
  auto& L = lab();
  const auto none = MeasurableSet::empty(1);
  const auto up = L.op->verify_up_inequality(none, none, L.corpus);
  CHECK(up.c_emp == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(up.compatible);
  CHECK(up.warning.empty());

  // an incompatible pair still computes, but warns
  CompatiblePair bad = parse_pair("incompat");
  MollifierSystem::Options opt;
  opt.rho1 = bad.rho1;
  opt.domain_extent = L.grid.extent;
  const OperatorPair op_bad(MollifierSystem::build(opt), bad, L.grid);
  const auto up_bad = op_bad.verify_up_inequality(none, none, L.corpus);
  CHECK_FALSE(up_bad.compatible);
  CHECK_FALSE(up_bad.warning.empty());
}
