#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "thinlab/experiments.hpp"
#include "thinlab/mollifier.hpp"

namespace {

struct Opts {
  std::string grid = "N=4096,R=64";
  std::string pair = "wolff";
  std::string set = "periodic:n=8,h=0.1";
  std::string rho = "powerlaw:a=1";
  std::string mu1 = "bernoulli";
  std::string mu2 = "bernoulli";
  std::vector<double> eps_list{0.02, 0.05, 0.1, 0.2};
  std::vector<double> ks{2, 4, 8, 16};
  double eps = 0.1;
  double p = 2.0;
  double delta = 0.05;
  double t_max = 1e8;
  int dim = 1;
  int count = 100;
  int corpus = 50;
  int probes = 256;
  int cond_probes = 10000;
  int jmax = -1;
  int phi_resolution = 1 << 17;
  std::uint64_t seed = 7;
  std::string out;
  std::string dump_phi;
};

void add_grid(CLI::App* cmd, Opts& o) {
  cmd->add_option("--grid", o.grid, "grid as N=<samples>,R=<extent>")
      ->capture_default_str();
}

void add_seed(CLI::App* cmd, Opts& o) {
  cmd->add_option("--seed", o.seed, "seed fixing corpus and probe jitter")
      ->capture_default_str();
}

void add_mollifier(CLI::App* cmd, Opts& o) {
  cmd->add_option("--jmax", o.jmax, "dyadic levels (-1: from grid extent)")
      ->capture_default_str();
  cmd->add_option("--phi-resolution", o.phi_resolution,
                  "samples for the smoothing-profile build grid")
      ->capture_default_str();
  cmd->add_option("--dump-phi", o.dump_phi,
                  "also write the cached radial profile to this CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for uncertainty estimates on thin sets"};
  app.set_config("--config", "", "read options from an INI file (sections per subcommand)");
  app.require_subcommand(1);

  Opts o;
  std::string mode;

  auto* vc = app.add_subcommand("verify-condition",
                                "probe the radius compatibility condition");
  vc->add_option("--pair", o.pair, "pair preset (wolff|powerlaw:a=A|ls:n=N|cutoff:n=N|incompat)")
      ->capture_default_str();
  vc->add_option("--t-max", o.t_max, "largest probed scale")->capture_default_str();
  vc->add_option("--probes", o.cond_probes, "log-spaced probe count")->capture_default_str();
  vc->callback([&] { mode = "verify-condition"; });

  auto* th = app.add_subcommand("thinness", "measure relative density against adapted balls");
  th->add_option("--set", o.set, "periodic:n=..,h=..[,s=..] | empty | CSV path")
      ->capture_default_str();
  th->add_option("--rho1", o.rho, "radius function")->capture_default_str();
  th->add_option("--eps", o.eps, "claimed thinness level")->capture_default_str();
  th->add_option("--dim", o.dim, "1 or 2")->capture_default_str();
  th->callback([&] { mode = "thinness"; });

  auto* sc = app.add_subcommand("schur", "kernel row/column bounds and leakages over an eps sweep");
  sc->add_option("--pair", o.pair)->capture_default_str();
  add_grid(sc, o);
  sc->add_option("--eps", o.eps_list, "eps sweep values")
      ->delimiter(',')
      ->capture_default_str();
  sc->add_option("--corpus", o.corpus, "corpus size")->capture_default_str();
  sc->add_option("--probes", o.probes, "kernel probe count")->capture_default_str();
  add_mollifier(sc, o);
  add_seed(sc, o);
  sc->callback([&] { mode = "schur"; });

  auto* cv = app.add_subcommand("cover", "randomized adapted Vitali covers");
  cv->add_option("--dim", o.dim, "1 or 2")->capture_default_str();
  cv->add_option("--count", o.count, "instances")->capture_default_str();
  add_seed(cv, o);
  cv->callback([&] { mode = "cover"; });

  auto* up = app.add_subcommand("up", "empirical uncertainty constant vs the chain bound");
  up->add_option("--pair", o.pair)->capture_default_str();
  add_grid(up, o);
  up->add_option("--eps", o.eps, "thinness level for the seeded sets")->capture_default_str();
  up->add_option("--corpus", o.corpus)->capture_default_str();
  up->add_option("--probes", o.probes)->capture_default_str();
  add_mollifier(up, o);
  add_seed(up, o);
  up->callback([&] { mode = "up"; });

  auto* cx = app.add_subcommand("counterexample", "necessity ladder for an incompatible pair");
  cx->add_option("--pair", o.pair, "radius pair (schedule scales it per k)")
      ->default_val("incompat");
  cx->add_option("--eps", o.eps)->capture_default_str();
  cx->add_option("--k", o.ks, "schedule values")->delimiter(',')->capture_default_str();
  cx->add_option("--dim", o.dim, "1 or 2")->capture_default_str();
  cx->callback([&] { mode = "counterexample"; });

  auto* ct = app.add_subcommand("contraction", "composition norm of two multiplier transforms");
  ct->add_option("--mu1", o.mu1, "bernoulli | atoms:x:w,x:w,...")->capture_default_str();
  ct->add_option("--mu2", o.mu2)->capture_default_str();
  ct->add_option("--p", o.p, "exponent, 1 < p < inf")->capture_default_str();
  ct->add_option("--delta", o.delta, "level-set height 1-delta")->capture_default_str();
  add_grid(ct, o);
  add_seed(ct, o);
  ct->callback([&] { mode = "contraction"; });

  for (auto* cmd : {vc, th, sc, cv, up, cx, ct})
    cmd->add_option("--out", o.out, "write the CSV here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    thinlab::ExperimentResult res;
    if (mode == "verify-condition") {
      res = thinlab::run_verify_condition(o.pair, o.t_max, o.cond_probes);
    } else if (mode == "thinness") {
      res = thinlab::run_thinness(o.set, o.rho, o.eps, o.dim);
    } else if (mode == "schur") {
      res = thinlab::run_schur(o.pair, thinlab::parse_grid(o.grid), o.eps_list, o.seed,
                               o.corpus, o.probes, o.jmax, o.phi_resolution);
    } else if (mode == "cover") {
      res = thinlab::run_cover(o.dim, o.count, o.seed);
    } else if (mode == "up") {
      res = thinlab::run_up(o.pair, thinlab::parse_grid(o.grid), o.eps, o.seed, o.corpus,
                            o.probes, o.jmax, o.phi_resolution);
    } else if (mode == "counterexample") {
      res = thinlab::run_counterexample(o.pair, o.eps, o.ks, o.dim);
    } else if (mode == "contraction") {
      res = thinlab::run_contraction(o.mu1, o.mu2, o.p, o.delta,
                                     thinlab::parse_grid(o.grid), o.seed);
    }

    if (!o.dump_phi.empty()) {
      const thinlab::CompatiblePair pair = thinlab::parse_pair(o.pair);
      thinlab::MollifierSystem::Options mopt;
      mopt.c1 = pair.c1;
      mopt.rho1 = pair.rho1;
      mopt.domain_extent = thinlab::parse_grid(o.grid).extent;
      mopt.j_max = o.jmax;
      mopt.build_samples = o.phi_resolution;
      thinlab::MollifierSystem::build(mopt)->write_profile_csv(o.dump_phi);
    }

    if (!o.out.empty())
      res.table.write(o.out);
    else
      std::cout << res.table.to_string();

    if (!res.ok) {
      std::cerr << "invariant failed: " << res.message << "\n";
      return 1;
    }
    if (!res.message.empty()) std::cerr << "note: " << res.message << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
