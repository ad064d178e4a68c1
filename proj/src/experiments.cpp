#include "thinlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "thinlab/contraction.hpp"
#include "thinlab/corpus.hpp"
#include "thinlab/counterexamples.hpp"
#include "thinlab/covering.hpp"
#include "thinlab/mollifier.hpp"
#include "thinlab/operators.hpp"

namespace thinlab {
namespace {

std::string b2s(bool b) { return b ? "true" : "false"; }

std::vector<std::pair<std::string, std::string>> split_kv(const std::string& text,
                                                          const std::string& what) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string tok = text.substr(pos, comma - pos);
    const std::size_t eq = tok.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument(what + ": expected key=value, got '" + tok + "'");
    kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    pos = comma + 1;
  }
  return kv;
}

std::string join_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += fmt_double(v[i]);
  }
  return s;
}

// sets a failure message once, keeping the first offender
void fail(ExperimentResult* res, const std::string& msg) {
  if (res->ok) {
    res->ok = false;
    res->message = msg;
  }
}

double norm_of(int dim, const Point& x) {
  return dim == 2 ? std::hypot(x[0], x[1]) : std::abs(x[0]);
}

}  // namespace

GridSpec parse_grid(const std::string& text, int dim) {
  GridSpec g{dim, 64.0, 4096};
  if (text.empty()) return g;
  for (const auto& [key, val] : split_kv(text, "grid")) {
    if (key == "N")
      g.samples = std::stoi(val);
    else if (key == "R")
      g.extent = std::stod(val);
    else
      throw std::invalid_argument("grid: unknown key '" + key + "' (expected N, R)");
  }
  return g;
}

MeasurableSet parse_set(const std::string& text, int dim) {
  if (text.empty() || text == "empty") return MeasurableSet::empty(dim);
  if (text.rfind("periodic:", 0) == 0) {
    long long n = 8;
    double h = 0.1, s = 1.0;
    for (const auto& [key, val] : split_kv(text.substr(9), "set")) {
      if (key == "n")
        n = std::stoll(val);
      else if (key == "h")
        h = std::stod(val);
      else if (key == "s")
        s = std::stod(val);
      else
        throw std::invalid_argument("set: unknown key '" + key + "' (expected n, h, s)");
    }
    return periodic_thin_set(dim, n, h, s);
  }
  MeasurableSet set = MeasurableSet::read_csv(text);
  if (set.dim() != dim)
    throw std::invalid_argument("set: file '" + text + "' is " + std::to_string(set.dim()) +
                                "-dimensional, expected " + std::to_string(dim));
  return set;
}

MeasurableSet thin_profile_set(const RadiusFunction& rho, double eps, double lo,
                               double hi, std::uint64_t seed) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("thin_profile_set: eps must be positive");
  const long long clo = static_cast<long long>(std::ceil(lo));
  const long long chi = static_cast<long long>(std::floor(hi));
  if (chi < clo) throw std::invalid_argument("thin_profile_set: no integer centers in range");

  Rng rng(seed);
  std::vector<double> centers;
  centers.reserve(static_cast<std::size_t>(chi - clo + 1));
  for (long long c = clo; c <= chi; ++c)
    centers.push_back(static_cast<double>(c) + rng.uniform(-0.2, 0.2));

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Interval> iv;
  iv.reserve(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double gap_l = i > 0 ? centers[i] - centers[i - 1] : inf;
    const double gap_r = i + 1 < centers.size() ? centers[i + 1] - centers[i] : inf;
    const double w =
        std::min(eps * rho(std::abs(centers[i])), 0.499 * std::min(gap_l, gap_r));
    iv.push_back({centers[i] - w, centers[i] + w});
  }
  return MeasurableSet::intervals(std::move(iv));
}

double chain_constant(double sup_row, double sup_col, double alpha, double beta) {
  const double small = 4.0 * (alpha + beta);
  if (!(small < 1.0)) return std::numeric_limits<double>::infinity();
  return std::max(1.0, 4.0 * sup_row * sup_col) / (1.0 - small);
}

ExperimentResult run_verify_condition(const std::string& pair_spec, double t_max,
                                      int probes) {
  const CompatiblePair pair = parse_pair(pair_spec);
  const CompatibilityReport rep = check_compatibility(pair, t_max, probes);
  const std::string cfg = config_hash({{"experiment", "verify-condition"},
                                       {"pair", pair_spec},
                                       {"t_max", fmt_double(t_max)},
                                       {"probes", std::to_string(probes)}});
  ExperimentResult res;
  res.table.columns = {"config", "pair",  "c1",    "c2",          "t_max",
                       "probes", "holds", "worst_margin", "worst_t"};
  res.table.add_row({cfg, pair.describe(), fmt_double(pair.c1), fmt_double(pair.c2),
                     fmt_double(t_max), std::to_string(probes), b2s(rep.holds),
                     fmt_double(rep.worst_margin), fmt_double(rep.worst_t)});
  return res;
}

ExperimentResult run_thinness(const std::string& set_spec, const std::string& rho_spec,
                              double eps, int dim) {
  const MeasurableSet set = parse_set(set_spec, dim);
  const RadiusFunction rho = RadiusFunction::parse(rho_spec);
  const std::string cfg = config_hash({{"experiment", "thinness"},
                                       {"set", set_spec},
                                       {"rho", rho_spec},
                                       {"eps", fmt_double(eps)},
                                       {"dim", std::to_string(dim)}});
  ExperimentResult res;
  res.table.columns = {"config",           "set",  "rho",     "dim",
                       "eps",              "epsilon_measured", "pass",
                       "worst_center_x",   "worst_center_y",   "worst_radius",
                       "centers"};
  if (set.empty_set()) {
    res.table.add_row({cfg, set_spec, rho.describe(), std::to_string(dim),
                       fmt_double(eps), "0", "true", "0", "0", "0", "0"});
    return res;
  }
  CenterSpec centers;
  const Point lo = set.bounding_lo(), hi = set.bounding_hi();
  for (int a = 0; a < dim; ++a) {
    centers.lo[a] = lo[a] - 1.0;
    centers.hi[a] = hi[a] + 1.0;
  }
  const ThinnessCertificate cert = certify_thinness(set, rho, centers);
  const bool pass = cert.epsilon_measured <= eps * (1.0 + 1e-9);
  res.table.add_row({cfg, set_spec, rho.describe(), std::to_string(dim), fmt_double(eps),
                     fmt_double(cert.epsilon_measured), b2s(pass),
                     fmt_double(cert.worst_center[0]), fmt_double(cert.worst_center[1]),
                     fmt_double(cert.worst_radius), std::to_string(cert.center_count)});
  return res;
}

namespace {

struct OperatorSetup {
  CompatiblePair pair;
  std::shared_ptr<const OperatorPair> op;
  std::vector<GridFunction> corpus;
};

OperatorSetup make_operator_setup(const std::string& pair_spec, const GridSpec& grid,
                                  std::uint64_t seed, int corpus_size, int j_max,
                                  int phi_resolution) {
  if (grid.dim != 1)
    throw std::invalid_argument("schur/up experiments are 1-D (kernel sups use the radial profile)");
  OperatorSetup s{parse_pair(pair_spec), nullptr, {}};
  s.pair.certified = check_compatibility(s.pair).holds;
  MollifierSystem::Options opt;
  opt.dim = 1;
  opt.c1 = s.pair.c1;
  opt.rho1 = s.pair.rho1;
  opt.domain_extent = grid.extent;
  opt.j_max = j_max;
  opt.build_samples = phi_resolution;
  auto sys = MollifierSystem::build(opt);
  s.op = std::make_shared<OperatorPair>(sys, s.pair, grid);
  s.corpus = make_corpus(grid, corpus_size, seed);
  return s;
}

// seeded thin sets for one eps: E on the primal domain against rho1, Sigma on
// the dual domain against rho2
std::pair<MeasurableSet, MeasurableSet> thin_pair_sets(const CompatiblePair& pair,
                                                       const GridSpec& grid, double eps,
                                                       std::uint64_t seed) {
  const double half = grid.extent / 2.0 - 1.0;
  const double dual_half = grid.dual_extent() / 2.0 - 1.0;
  MeasurableSet E = thin_profile_set(pair.rho1, eps, -half, half, seed);
  MeasurableSet Sigma = thin_profile_set(pair.rho2, eps, -dual_half, dual_half, seed + 1);
  return {std::move(E), std::move(Sigma)};
}

}  // namespace

ExperimentResult run_schur(const std::string& pair_spec, const GridSpec& grid,
                           const std::vector<double>& eps_list, std::uint64_t seed,
                           int corpus_size, int probes, int j_max, int phi_resolution) {
  if (eps_list.empty()) throw std::invalid_argument("schur: eps list is empty");
  const OperatorSetup s =
      make_operator_setup(pair_spec, grid, seed, corpus_size, j_max, phi_resolution);
  const std::string cfg = config_hash({{"experiment", "schur"},
                                       {"pair", pair_spec},
                                       {"N", std::to_string(grid.samples)},
                                       {"R", fmt_double(grid.extent)},
                                       {"eps", join_list(eps_list)},
                                       {"seed", std::to_string(seed)},
                                       {"corpus", std::to_string(corpus_size)},
                                       {"probes", std::to_string(probes)},
                                       {"jmax", std::to_string(j_max)},
                                       {"phi_resolution", std::to_string(phi_resolution)}});
  ExperimentResult res;
  res.table.columns = {"config", "rho1",    "rho2",    "C1",           "C2",
                       "eps",    "sup_row", "sup_col", "thin_row_sup", "thin_col_sup",
                       "alpha",  "beta",    "C_emp"};
  const double row_cap = 3.0 * s.op->sys().l1_norm() * (1.0 + 1e-6);
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const double eps = eps_list[i];
    auto [E, Sigma] = thin_pair_sets(s.pair, grid, eps, seed + 101 * i);
    const SchurReport rep = s.op->schur_bounds(E, Sigma, eps, s.corpus, probes);
    const UpReport up = s.op->verify_up_inequality(E, Sigma, s.corpus);
    if (!(rep.sup_row <= row_cap))
      fail(&res, "sup_row " + fmt_double(rep.sup_row) + " exceeds 3*l1(phi) cap " +
                     fmt_double(row_cap) + " at eps=" + fmt_double(eps));
    if (!std::isfinite(rep.thin_row_sup) || !std::isfinite(rep.thin_col_sup))
      fail(&res, "non-finite thin kernel sup at eps=" + fmt_double(eps));
    res.table.add_row({cfg, s.pair.rho1.describe(), s.pair.rho2.describe(),
                       fmt_double(s.pair.c1), fmt_double(s.pair.c2), fmt_double(eps),
                       fmt_double(rep.sup_row), fmt_double(rep.sup_col),
                       fmt_double(rep.thin_row_sup), fmt_double(rep.thin_col_sup),
                       fmt_double(rep.leakage_alpha), fmt_double(rep.leakage_beta),
                       fmt_double(up.c_emp)});
  }
  return res;
}

ExperimentResult run_cover(int dim, int count, std::uint64_t seed) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("cover: dim must be 1 or 2");
  if (count < 1) throw std::invalid_argument("cover: count must be positive");
  const std::string cfg = config_hash({{"experiment", "cover"},
                                       {"dim", std::to_string(dim)},
                                       {"count", std::to_string(count)},
                                       {"seed", std::to_string(seed)}});

  struct Instance {
    RadiusFunction rho = RadiusFunction::constant(1.0);
    Point x{};
    double r = 0.0;
    BallNorm norm = BallNorm::Euclidean;
  };
  Rng rng(seed);
  std::vector<Instance> inst(static_cast<std::size_t>(count));
  for (auto& in : inst) {
    switch (rng.raw() % 3) {
      case 0: in.rho = RadiusFunction::power_law(rng.uniform(0.5, 2.0)); break;
      case 1: in.rho = RadiusFunction::constant(rng.uniform(0.1, 1.0)); break;
      default: in.rho = RadiusFunction::compact_cutoff(rng.uniform(4.0, 12.0)); break;
    }
    in.x[0] = rng.uniform(-8.0, 8.0);
    if (dim == 2) in.x[1] = rng.uniform(-8.0, 8.0);
    in.norm = (dim == 2 && rng.raw() % 2) ? BallNorm::Sup : BallNorm::Euclidean;
    const double rho_x = in.rho(norm_of(dim, in.x));
    in.r = rho_x * std::pow(4.0 / rho_x, rng.uniform());
    // keep the candidate grid small: shrink r until the pitch formula used by
    // the cover stays under ~1e4 points
    for (int guard = 0; guard < 200; ++guard) {
      const double rho_min = in.rho(norm_of(dim, in.x) + in.r);
      const double pitch = std::min(rho_min, 3.0 * in.r) / 6.0;
      const double per_axis = std::ceil(2.0 * in.r / pitch) + 1.0;
      if (std::pow(per_axis, dim) <= 1e4) break;
      in.r *= 0.6;
    }
  }

  std::vector<CoverResult> out(inst.size());
  std::vector<std::string> err(inst.size());
  parallel_for(inst.size(), [&](std::size_t i) {
    try {
      out[i] = greedy_cover(dim, inst[i].x, inst[i].r, inst[i].rho, inst[i].norm);
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  });

  ExperimentResult res;
  res.table.columns = {"config",   "dim",      "instance", "norm",    "rho1",
                       "center_x", "center_y", "radius",   "selected", "constant",
                       "covered",  "disjoint"};
  const double cap = std::pow(6.0, dim);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (!err[i].empty()) {
      fail(&res, "instance " + std::to_string(i) + ": " + err[i]);
      continue;
    }
    const CoverResult& cr = out[i];
    // third-radius balls must be exactly disjoint (strict inequality, no slack)
    bool disjoint = true;
    std::vector<std::size_t> sel;
    for (std::size_t a = 0; a < cr.candidates.size(); ++a)
      if (cr.selected[a]) sel.push_back(a);
    for (std::size_t a = 0; a < sel.size() && disjoint; ++a)
      for (std::size_t b = a + 1; b < sel.size(); ++b) {
        const Point& pa = cr.candidates[sel[a]];
        const Point& pb = cr.candidates[sel[b]];
        const double dx = pa[0] - pb[0], dy = pa[1] - pb[1];
        const double dist = cr.norm == BallNorm::Sup
                                ? std::max(std::abs(dx), std::abs(dy))
                                : (dim == 2 ? std::hypot(dx, dy) : std::abs(dx));
        if (!(dist > (cr.cand_radii[sel[a]] + cr.cand_radii[sel[b]]) / 3.0)) {
          disjoint = false;
          break;
        }
      }
    if (!disjoint) fail(&res, "instance " + std::to_string(i) + ": third-radius overlap");
    if (!cr.covered) fail(&res, "instance " + std::to_string(i) + ": probe escaped the cover");
    if (!(cr.constant <= cap))
      fail(&res, "instance " + std::to_string(i) + ": constant " +
                     fmt_double(cr.constant) + " exceeds 6^d");
    res.table.add_row({cfg, std::to_string(dim), std::to_string(i),
                       cr.norm == BallNorm::Sup ? "sup" : "euclidean",
                       inst[i].rho.describe(), fmt_double(inst[i].x[0]),
                       fmt_double(inst[i].x[1]), fmt_double(inst[i].r),
                       std::to_string(cr.selected_count()), fmt_double(cr.constant),
                       b2s(cr.covered), b2s(disjoint)});
  }
  return res;
}

ExperimentResult run_up(const std::string& pair_spec, const GridSpec& grid, double eps,
                        std::uint64_t seed, int corpus_size, int probes, int j_max,
                        int phi_resolution) {
  const OperatorSetup s =
      make_operator_setup(pair_spec, grid, seed, corpus_size, j_max, phi_resolution);
  auto [E, Sigma] = thin_pair_sets(s.pair, grid, eps, seed);
  const SchurReport rep = s.op->schur_bounds(E, Sigma, eps, s.corpus, probes);
  const UpReport up = s.op->verify_up_inequality(E, Sigma, s.corpus);
  const double c_theory = chain_constant(rep.sup_row, rep.sup_col, up.alpha, up.beta);
  const bool holds = up.smallness && up.c_emp <= c_theory;

  const std::string cfg = config_hash({{"experiment", "up"},
                                       {"pair", pair_spec},
                                       {"N", std::to_string(grid.samples)},
                                       {"R", fmt_double(grid.extent)},
                                       {"eps", fmt_double(eps)},
                                       {"seed", std::to_string(seed)},
                                       {"corpus", std::to_string(corpus_size)},
                                       {"probes", std::to_string(probes)},
                                       {"jmax", std::to_string(j_max)},
                                       {"phi_resolution", std::to_string(phi_resolution)}});
  ExperimentResult res;
  res.table.columns = {"config", "pair",  "eps",   "N",         "R",
                       "corpus", "c_emp", "worst_function", "alpha", "beta",
                       "smallness", "c_theory", "holds"};
  if (!std::isfinite(up.c_emp))
    fail(&res, "empirical constant diverged (denominator underflow in the defect)");
  res.table.add_row({cfg, s.pair.describe(), fmt_double(eps), std::to_string(grid.samples),
                     fmt_double(grid.extent), std::to_string(corpus_size),
                     fmt_double(up.c_emp), corpus_label(up.worst_function),
                     fmt_double(up.alpha), fmt_double(up.beta), b2s(up.smallness),
                     fmt_double(c_theory), b2s(holds)});
  return res;
}

ExperimentResult run_counterexample(const std::string& pair_spec, double eps,
                                    const std::vector<double>& k_list, int dim) {
  if (k_list.empty()) throw std::invalid_argument("counterexample: k list is empty");
  const CompatiblePair pair = parse_pair(pair_spec);
  const std::vector<CounterexampleInstance> ladder =
      counterexample_ladder(pair, eps, k_list, dim);
  const std::string cfg = config_hash({{"experiment", "counterexample"},
                                       {"pair", pair_spec},
                                       {"eps", fmt_double(eps)},
                                       {"k", join_list(k_list)},
                                       {"dim", std::to_string(dim)}});
  ExperimentResult res;
  res.table.columns = {"config",     "k",          "n",
                       "a_n",        "ratio",      "thinness_E",
                       "thinness_Sigma", "defect"};
  for (const auto& inst : ladder) {
    if (!(inst.thinness_E <= eps * (1.0 + 1e-9)))
      fail(&res, "E not eps-thin at k=" + fmt_double(inst.k) + ": measured " +
                     fmt_double(inst.thinness_E));
    if (!(inst.thinness_Sigma <= eps * (1.0 + 1e-9)))
      fail(&res, "Sigma not eps-thin at k=" + fmt_double(inst.k) + ": measured " +
                     fmt_double(inst.thinness_Sigma));
    res.table.add_row({cfg, fmt_double(inst.k), fmt_double(inst.n), fmt_double(inst.a_n),
                       fmt_double(inst.ratio), fmt_double(inst.thinness_E),
                       fmt_double(inst.thinness_Sigma), fmt_double(inst.defect)});
  }
  return res;
}

ExperimentResult run_contraction(const std::string& mu1_spec, const std::string& mu2_spec,
                                 double p, double delta, const GridSpec& grid,
                                 std::uint64_t seed) {
  const AtomicMeasure mu1 = AtomicMeasure::parse(mu1_spec);
  const AtomicMeasure mu2 = AtomicMeasure::parse(mu2_spec);
  const SymbolPair sym(mu1, mu2, p, delta);
  const ContractionReport rep = composition_norm(sym, grid, 600, 1e-6, seed);
  const std::string cfg = config_hash({{"experiment", "contraction"},
                                       {"mu1", mu1_spec},
                                       {"mu2", mu2_spec},
                                       {"p", fmt_double(p)},
                                       {"delta", fmt_double(delta)},
                                       {"N", std::to_string(grid.samples)},
                                       {"R", fmt_double(grid.extent)},
                                       {"seed", std::to_string(seed)}});
  ExperimentResult res;
  res.table.columns = {"config", "p", "delta", "eps_E", "eps_Sigma", "beta",
                       "bound_chain_value"};
  if (!(rep.beta <= 1.0 + 1e-9))
    fail(&res, "beta " + fmt_double(rep.beta) + " exceeds the structural cap 1");
  if (!rep.converged && res.message.empty())
    res.message = "power iteration not converged: beta in [" + fmt_double(rep.beta_lo) +
                  ", " + fmt_double(rep.beta_hi) + "]";
  res.table.add_row({cfg, fmt_double(p), fmt_double(delta), fmt_double(rep.eps_E),
                     fmt_double(rep.eps_Sigma), fmt_double(rep.beta),
                     fmt_double(rep.bound_chain_value)});
  return res;
}

}  // namespace thinlab
