// Acceptance gate: each criterion prints exactly one [PASS]/[FAIL] line with
// its headline metrics and elapsed time, and the process exits non-zero iff
// any requested criterion failed.  Run all, or a single one with
// --criterion N.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "thinlab/contraction.hpp"
#include "thinlab/corpus.hpp"
#include "thinlab/counterexamples.hpp"
#include "thinlab/experiments.hpp"
#include "thinlab/mollifier.hpp"
#include "thinlab/operators.hpp"
#include "thinlab/spectral.hpp"

using namespace thinlab;
using cplx = std::complex<double>;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.str().empty()) detail << "; ";
      detail << "FAILED " << what;
    }
  }
  void metric(const std::string& name, double v) {
    if (!detail.str().empty()) detail << ", ";
    detail << name << "=" << fmt_double(v);
  }
};

double rel_l2(const GridFunction& a, const GridFunction& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

std::shared_ptr<OperatorPair> wolff_operator(const GridSpec& grid) {
  const auto pair = parse_pair("wolff");
  MollifierSystem::Options opt;
  opt.c1 = pair.c1;
  opt.rho1 = pair.rho1;
  opt.domain_extent = grid.extent;
  return std::make_shared<OperatorPair>(MollifierSystem::build(opt), pair, grid);
}

struct ThinSets {
  MeasurableSet E = MeasurableSet::empty(1);
  MeasurableSet Sigma = MeasurableSet::empty(1);
};

ThinSets seeded_sets(const CompatiblePair& pair, const GridSpec& grid, double eps,
                     std::uint64_t seed) {
  const double half = grid.extent / 2.0 - 1.0;
  const double dual_half = grid.dual_extent() / 2.0 - 1.0;
  ThinSets s;
  s.E = thin_profile_set(pair.rho1, eps, -half, half, seed);
  s.Sigma = thin_profile_set(pair.rho2, eps, -dual_half, dual_half, seed + 1);
  return s;
}

// ---- criterion bodies -------------------------------------------------------

// 1: forward/inverse fidelity on the reference grid
Outcome crit1() {
  Outcome out;
  const GridSpec grid{1, 64.0, 1 << 12};
  const auto gauss = GridFunction::sample(
      grid, [](Point p) { return cplx(std::exp(-M_PI * p[0] * p[0]), 0.0); });
  const auto ghat = forward_transform(gauss);
  const double fixed = rel_l2(ghat, gauss);
  out.metric("gaussian_fixed_point", fixed);
  out.require(fixed <= 1e-8, "gaussian fixed point <= 1e-8");

  double worst_pars = 0.0, worst_round = 0.0;
  for (const auto& f : make_corpus(grid, 10, 23)) {
    const auto fh = forward_transform(f);
    worst_pars = std::max(worst_pars,
                          std::fabs(energy(fh) - energy(f)) / energy(f));
    worst_round = std::max(worst_round, rel_l2(inverse_transform(fh), f));
  }
  out.metric("parseval", worst_pars);
  out.metric("roundtrip", worst_round);
  out.require(worst_pars <= 1e-8, "parseval <= 1e-8");
  out.require(worst_round <= 1e-8, "roundtrip <= 1e-8");
  return out;
}

// 2: partition of unity and the splitting identity S + T = I
Outcome crit2() {
  Outcome out;
  const GridSpec grid{1, 64.0, 1 << 12};
  const auto op = wolff_operator(grid);
  const auto& sys = op->sys();

  double worst_part = 0.0;
  const double lim = std::pow(2.0, sys.j_max());
  for (int i = 0; i <= 4096; ++i) {
    const double r = lim * i / 4096.0;
    double sum = 0.0;
    for (int j = 0; j <= sys.j_max(); ++j) sum += sys.partition_term(j, r);
    worst_part = std::max(worst_part, std::fabs(sum - 1.0));
  }
  out.metric("partition_defect", worst_part);
  out.require(worst_part <= 1e-13, "sum psi_j = 1 to machine precision");

  double worst_split = 0.0;
  for (const auto& f : make_corpus(grid, 50, 31)) {
    auto s = op->apply_S(f);
    const auto t = op->apply_T(f);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += t[i];
    worst_split = std::max(worst_split, rel_l2(s, f));
  }
  out.metric("splitting_defect", worst_split);
  out.require(worst_split <= 1e-8, "||(S+T)f - f|| / ||f|| <= 1e-8");
  return out;
}

// 3: kernel sups capped by 3 ||phi||_1 and stable across radius families
Outcome crit3() {
  Outcome out;
  const GridSpec grid{1, 64.0, 1 << 12};
  const char* families[] = {"powerlaw:a=1", "powerlaw:a=2", "powerlaw:a=0.5", "ls:n=8"};
  std::vector<KernelSups> sups;
  for (const char* name : families) {
    const auto pair = parse_pair(name);
    MollifierSystem::Options opt;
    opt.c1 = pair.c1;
    opt.rho1 = pair.rho1;
    opt.domain_extent = grid.extent;
    const auto sys = MollifierSystem::build(opt);
    const OperatorPair op(sys, pair, grid);
    const auto s = op.kernel_sups(128);
    out.require(s.k_row <= 3.0 * sys->l1_norm() * (1.0 + 1e-6),
                std::string(name) + ": k_row <= 3||phi||_1");
    sups.push_back(s);
  }
  const auto spread = [&](double KernelSups::*m) {
    double lo = sups[0].*m, hi = sups[0].*m;
    for (const auto& s : sups) {
      lo = std::min(lo, s.*m);
      hi = std::max(hi, s.*m);
    }
    return hi / lo;
  };
  const double sk_row = spread(&KernelSups::k_row), sk_col = spread(&KernelSups::k_col);
  const double sl_row = spread(&KernelSups::l_row), sl_col = spread(&KernelSups::l_col);
  out.metric("k_row_spread", sk_row);
  out.metric("k_col_spread", sk_col);
  out.metric("l_row_spread", sl_row);
  out.metric("l_col_spread", sl_col);
  for (double s : {sk_row, sk_col, sl_row, sl_col})
    out.require(s < 10.0, "sup spread across families < 10");
  return out;
}

// 4: thin restricted sups scale with eps; leakage smallness at eps = 0.01
Outcome crit4() {
  Outcome out;
  const GridSpec grid{1, 64.0, 1 << 12};
  const auto op = wolff_operator(grid);
  const auto pair = parse_pair("wolff");
  const auto corpus = make_corpus(grid, 50, 41);

  std::vector<double> row_ratio, col_ratio;
  const double eps_list[] = {0.02, 0.05, 0.1, 0.2};
  for (int i = 0; i < 4; ++i) {
    const auto sets = seeded_sets(pair, grid, eps_list[i], 7 + 101 * i);
    const auto rep = op->schur_bounds(sets.E, sets.Sigma, eps_list[i], corpus, 128);
    row_ratio.push_back(rep.thin_row_sup / eps_list[i]);
    col_ratio.push_back(rep.thin_col_sup / eps_list[i]);
  }
  const auto band = [](const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) /
           *std::min_element(v.begin(), v.end());
  };
  out.metric("row_band", band(row_ratio));
  out.metric("col_band", band(col_ratio));
  out.require(band(row_ratio) <= 3.0, "thin_row_sup/eps within factor-3 band");
  out.require(band(col_ratio) <= 3.0, "thin_col_sup/eps within factor-3 band");

  const auto sets = seeded_sets(pair, grid, 0.01, 977);
  const auto rep = op->schur_bounds(sets.E, sets.Sigma, 0.01, corpus, 128);
  const double small = 4.0 * (rep.leakage_alpha + rep.leakage_beta);
  out.metric("smallness_at_0.01", small);
  out.require(small <= 0.5, "4(alpha+beta) <= 1/2 at eps = 0.01");
  return out;
}

// 5: randomized adapted covers stay disjoint, complete, and bounded
Outcome crit5() {
  Outcome out;
  const auto line = run_cover(1, 100, 19);
  out.require(line.ok, "d=1 batch: " + line.message);
  const auto plane = run_cover(2, 100, 19);
  out.require(plane.ok, "d=2 batch: " + plane.message);
  out.metric("instances", 200);
  return out;
}

// 6: every corpus defect below the chain constant; C_emp stable under doubling
Outcome crit6() {
  Outcome out;
  const auto pair = parse_pair("wolff");
  const double eps = 0.01;

  const auto measure = [&](const GridSpec& grid, int corpus_size, double* chain_out) {
    const auto op = wolff_operator(grid);
    const auto corpus = make_corpus(grid, corpus_size, 53);
    const auto sets = seeded_sets(pair, grid, eps, 607);
    const auto rep = op->schur_bounds(sets.E, sets.Sigma, eps, corpus, 128);
    const double chain =
        chain_constant(rep.sup_row, rep.sup_col, rep.leakage_alpha, rep.leakage_beta);
    double c_emp = 0.0;
    for (const auto& f : corpus) {
      const double d = uncertainty_defect(f, sets.E, sets.Sigma);
      c_emp = std::max(c_emp, d);
      out.require(d <= chain * (1.0 + 1e-12), "defect <= chain constant");
    }
    if (chain_out) *chain_out = chain;
    return c_emp;
  };

  const GridSpec base{1, 64.0, 1 << 12};
  double chain = 0.0;
  const double c0 = measure(base, 50, &chain);
  out.metric("C_emp", c0);
  out.metric("C_chain", chain);
  out.require(std::isfinite(chain), "chain constant finite");

  const double c_corpus = measure(base, 100, nullptr);
  const double c_grid = measure(GridSpec{1, 64.0, 1 << 13}, 50, nullptr);
  out.metric("corpus_doubling_shift", std::fabs(c_corpus - c0) / c0);
  out.metric("grid_doubling_shift", std::fabs(c_grid - c0) / c0);
  out.require(std::fabs(c_corpus - c0) <= 0.10 * c0, "C_emp stable under corpus doubling");
  out.require(std::fabs(c_grid - c0) <= 0.10 * c0, "C_emp stable under grid doubling");
  return out;
}

// 7: incompatible ladders collapse in d=1 and d=2 with certified thinness
Outcome crit7() {
  Outcome out;
  for (int dim : {1, 2}) {
    const auto ladder =
        counterexample_ladder(parse_pair("incompat"), 0.1, {2.0, 4.0, 8.0, 16.0}, dim);
    const std::string tag = "d=" + std::to_string(dim) + " ";
    for (std::size_t i = 1; i < ladder.size(); ++i)
      out.require(ladder[i].ratio < ladder[i - 1].ratio, tag + "ratios strictly decreasing");
    out.require(ladder.back().ratio / ladder.front().ratio <= 0.1,
                tag + "ratio(16)/ratio(2) <= 0.1");
    for (const auto& inst : ladder) {
      out.require(inst.thinness_E <= 0.1 * (1.0 + 1e-9), tag + "E certified 0.1-thin");
      out.require(inst.thinness_Sigma <= 0.1 * (1.0 + 1e-9), tag + "Sigma certified 0.1-thin");
    }
    out.metric(dim == 1 ? "line_collapse" : "plane_collapse",
               ladder.back().ratio / ladder.front().ratio);
  }
  return out;
}

// 8: transform-side envelope of |phi| decays fast with consistent mass
Outcome crit8() {
  Outcome out;
  MollifierSystem::Options opt;
  opt.domain_extent = 64.0;
  const auto sys = MollifierSystem::build(opt);
  const auto prof = sys->radial_profile_decay();
  out.metric("slope", prof.dp_fit.slope);
  out.require(prof.dp_fit.slope <= -1.8, "log-log slope of |p'| <= -1.8 on [4,64]");
  const double i64 = prof.partial_integral(64.0);
  const double i128 = prof.partial_integral(128.0);
  out.metric("tail_shift", std::fabs(i128 - i64) / i128);
  out.require(std::fabs(i128 - i64) <= 0.05 * i128, "partial integrals within 5%");
  return out;
}

// 9: Bernoulli composition contracts, stably in N, with an exact control
Outcome crit9() {
  Outcome out;
  const SymbolPair sym(AtomicMeasure::bernoulli(), AtomicMeasure::bernoulli(), 2.0, 0.05);
  const auto r1 = composition_norm(sym, GridSpec{1, 64.0, 1 << 13});
  const auto r2 = composition_norm(sym, GridSpec{1, 64.0, 1 << 14});
  out.metric("beta_8192", r1.beta);
  out.metric("beta_16384", r2.beta);
  out.require(r1.beta <= 1.0 - 1e-3, "beta <= 1 - 1e-3 at N = 8192");
  out.require(r2.beta <= 1.0 - 1e-3, "beta <= 1 - 1e-3 at N = 16384");
  out.require(std::fabs(r1.beta - r2.beta) <= 1e-3, "beta stable under grid doubling");

  const auto one = [](double) { return 1.0; };
  const auto control = composition_norm_symbols(one, one, GridSpec{1, 64.0, 1 << 12});
  out.metric("control", control.beta);
  out.require(std::fabs(control.beta - 1.0) <= 1e-9, "unit-symbol control = 1");
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> body;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "transform fidelity", 1.0, crit1},
      {2, "partition and splitting identity", 10.0, crit2},
      {3, "kernel sups across radius families", 60.0, crit3},
      {4, "thin restricted sups and leakage smallness", 120.0, crit4},
      {5, "randomized adapted covers", 30.0, crit5},
      {6, "chain constant dominates corpus defects", 120.0, crit6},
      {7, "necessity ladders", 180.0, crit7},
      {8, "envelope decay of the profile transform", 30.0, crit8},
      {9, "bernoulli contraction", 60.0, crit9},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--help") == 0) {
      std::printf("usage: %s [--criterion N]\n", argv[0]);
      return 0;
    }
  }

  int failures = 0, ran = 0;
  for (const auto& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out = c.body();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      out.pass = false;
      out.detail << "; FAILED time budget " << fmt_double(c.budget_s) << "s";
    }
    if (!out.pass) ++failures;
    std::printf("[%s] criterion %d: %s (%s) [%.2fs]\n", out.pass ? "PASS" : "FAIL",
                c.id, c.name, out.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no such criterion: %d\n", only);
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
