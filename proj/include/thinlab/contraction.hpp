#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "thinlab/radius.hpp"
#include "thinlab/sets.hpp"
#include "thinlab/spectral.hpp"

namespace thinlab {

// Finite atomic probability measure on the line.  Atomic keeps the
// characteristic function in closed form; a single atom is rejected because
// |muhat| would be identically 1 and nothing contracts.
struct AtomicMeasure {
  struct Atom {
    double x = 0.0;
    double w = 0.0;
  };
  std::vector<Atom> atoms;

  static AtomicMeasure bernoulli();  // atoms (0, 1/2), (1, 1/2)
  static AtomicMeasure from_atoms(std::vector<Atom> atoms);
  // "atoms:x1:w1,x2:w2,..." or "bernoulli"
  static AtomicMeasure parse(const std::string& text);

  void validate() const;  // weights positive and sum to 1; >= 2 distinct sites
  std::string describe() const;
};

// muhat(xi) = sum w_j e^{-2 pi i xi x_j}
std::complex<double> char_function(const AtomicMeasure& mu, double xi);

// max over unit windows [j, j+1), j < window_count, of |{xi: |muhat| > 1-delta}|;
// boundaries are refined by bisection so the resolution is not sample-limited
double level_set_density(const AtomicMeasure& mu, double delta, int window_count = 64,
                         int samples_per_window = 4096);

// Symbols G(x) = |mu1hat(Q1(x))|, H(x) = |mu2hat(Q2(x))| with
// Q1(x) = sum_i a_i |x_i|^p and Q2(x) = sum_i b_i |x_i|^{p'}, where
// 1/p + 1/p' = 1 so (p-1)(p'-1) = 1.  The induced radius profiles are
// rho1 = min(t^{-(p-1)}, 1) and rho2 = min(t^{-(p'-1)}, 1).
struct SymbolPair {
  int dim = 1;
  double p = 2.0;
  double p_conj = 2.0;
  AtomicMeasure mu1, mu2;
  double delta = 0.05;
  std::vector<double> a_coeff, b_coeff;
  RadiusFunction rho1, rho2;

  SymbolPair(AtomicMeasure m1, AtomicMeasure m2, double p_, double delta_, int dim_ = 1,
             std::vector<double> a = {}, std::vector<double> b = {});

  double Q1(const Point& x) const;
  double Q2(const Point& x) const;
  double G(const Point& x) const;
  double H(const Point& x) const;
  double G1(double x) const { return G({x, 0.0}); }
  double H1(double x) const { return H({x, 0.0}); }
};

// {x >= 0: |muhat(Q(x))| > 1 - delta} pulled back through the monotone map
// x -> a x^p and mirrored to negative x; scan in Q-space with bisected
// boundaries.  Used for both E (via Q1) and Sigma (via Q2) in d=1.
MeasurableSet symbol_level_set(const AtomicMeasure& mu, double delta, double coeff, double expo,
                               double domain);

struct PullbackReport {
  double delta = 0.0;
  double eps_target = 0.0;
  double density1 = 0.0, density2 = 0.0;  // unit-window densities of F1, F2
  MeasurableSet E = MeasurableSet::empty(1);
  MeasurableSet Sigma = MeasurableSet::empty(1);
  ThinnessCertificate cert_E, cert_Sigma;
  // max over probed discs, |x| >= 2, of max |grad Q| / min |grad Q|
  double grad_ratio_E = 0.0, grad_ratio_Sigma = 0.0;
  bool pass = false;  // both measured thinness values <= eps_target
  std::string note;
};

// Certifies the level sets E = {G > 1-delta}, Sigma = {H > 1-delta} thin with
// respect to the induced radius profiles by direct measurement over
// [-domain, domain] (d=1).  The gradient ratio is reported as a diagnostic
// for why the pullback stays thin but does not enter the certificates.
PullbackReport pullback_thinness(const SymbolPair& sym, double eps_target, double domain = 24.0);

// Midpoint-offset grid x_m = (m - N/2 + 1/2) h with the matching offset dual
// grid.  Both grids avoid the exact lattice points 0 that let a perfectly
// aligned discretization carry a unit-norm resonance through T_H T_G; the
// transform stays exactly unitary (times h) via pre/post twiddle phases.
class OffsetGrid {
 public:
  explicit OffsetGrid(GridSpec spec);  // d=1, power-of-two samples

  const GridSpec& spec() const { return spec_; }
  double coord(int m) const { return (m - shift_) * spec_.spacing(); }
  double dual_coord(int k) const { return (k - shift_) / spec_.extent; }

  std::vector<std::complex<double>> forward(std::vector<std::complex<double>> f) const;
  std::vector<std::complex<double>> inverse(std::vector<std::complex<double>> g) const;

 private:
  GridSpec spec_;
  double shift_ = 0.0;  // (N-1)/2
};

struct ContractionReport {
  double beta = 0.0;  // power-iteration estimate of ||T_H T_G||_2
  double beta_lo = 0.0, beta_hi = 0.0;  // Rayleigh bracket ([beta,beta] when converged)
  bool converged = false;
  int iterations = 0;
  std::vector<double> rayleigh;  // quotient history (non-decreasing)

  double eps_E = 0.0, eps_Sigma = 0.0;  // measured thinness of the level sets
  double c_emp = 0.0;                   // empirical inequality constant on the corpus
  double bound_chain_value = 0.0;       // 1 - (1 - (1-delta)^2)/C_emp, bounds beta^2
  std::string note;
};

// ||T_H T_G|| with T_G f = transform(G . f), via power iteration on the
// self-adjoint composition G . F^{-1}(H^2 . F(G .)) over the offset grid;
// stops when the Rayleigh quotient moves less than tol relatively.
ContractionReport composition_norm_symbols(const std::function<double(double)>& G,
                                           const std::function<double(double)>& H,
                                           const GridSpec& grid, int max_iter = 600,
                                           double tol = 1e-6, std::uint64_t seed = 7);

// Same estimate for a SymbolPair, plus the certified side: level sets on the
// primal/dual domains, their measured thinness, the corpus inequality
// constant, and the chain value 1 - (1 - (1-delta)^2)/C_emp.
ContractionReport composition_norm(const SymbolPair& sym, const GridSpec& grid, int max_iter = 600,
                                   double tol = 1e-6, std::uint64_t seed = 7);

}  // namespace thinlab
