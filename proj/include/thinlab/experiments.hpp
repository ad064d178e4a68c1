#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thinlab/radius.hpp"
#include "thinlab/sets.hpp"
#include "thinlab/spectral.hpp"
#include "thinlab/util.hpp"

namespace thinlab {

// Outcome of one named experiment: a CSV table whose rows all start with a
// hash of the exact configuration, plus a verdict on the internal invariants
// (construction postconditions, not the scientific quantities being measured).
struct ExperimentResult {
  CsvTable table;
  bool ok = true;
  std::string message;  // first violated invariant; empty when ok
};

// "N=4096,R=64" (either order, either key optional)
GridSpec parse_grid(const std::string& text, int dim = 1);

// "periodic:n=8,h=0.1[,s=1]" | "empty" | path of a CSV interval/box list
MeasurableSet parse_set(const std::string& text, int dim = 1);

// Intervals at jittered integer centers c in [lo, hi] with half-width
// eps * rho(|c|), clamped against neighbor gaps so the union stays disjoint.
// Measured thinness w.r.t. rho tracks eps up to a small constant factor
// (balls wider than the unit spacing see a few spikes at once).
MeasurableSet thin_profile_set(const RadiusFunction& rho, double eps, double lo,
                               double hi, std::uint64_t seed);

// max(1, 4 sup_row sup_col) / (1 - 4(alpha + beta)); +inf once the smallness
// condition fails. This is the constant the low/high splitting argument
// produces from the Schur bounds and the measured leakages.
double chain_constant(double sup_row, double sup_col, double alpha, double beta);

ExperimentResult run_verify_condition(const std::string& pair_spec,
                                      double t_max = 1e8, int probes = 10000);

ExperimentResult run_thinness(const std::string& set_spec,
                              const std::string& rho_spec, double eps,
                              int dim = 1);

ExperimentResult run_schur(const std::string& pair_spec, const GridSpec& grid,
                           const std::vector<double>& eps_list,
                           std::uint64_t seed, int corpus_size = 50,
                           int probes = 256, int j_max = -1,
                           int phi_resolution = 1 << 17);

ExperimentResult run_cover(int dim, int count, std::uint64_t seed);

ExperimentResult run_up(const std::string& pair_spec, const GridSpec& grid,
                        double eps, std::uint64_t seed, int corpus_size = 50,
                        int probes = 256, int j_max = -1,
                        int phi_resolution = 1 << 17);

ExperimentResult run_counterexample(const std::string& pair_spec, double eps,
                                    const std::vector<double>& k_list,
                                    int dim = 1);

ExperimentResult run_contraction(const std::string& mu1_spec,
                                 const std::string& mu2_spec, double p,
                                 double delta, const GridSpec& grid,
                                 std::uint64_t seed = 7);

}  // namespace thinlab
