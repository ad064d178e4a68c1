#pragma once

#include <memory>
#include <string>
#include <vector>

#include "thinlab/radius.hpp"

namespace thinlab {

// Smooth step: 0 for t <= 0, 1 for t >= 1, strictly increasing between.
double bump_transition(double t);
// Radial window q(r) = bump_transition(2 - r): 1 on [0,1], 0 on [2,inf),
// smooth and non-increasing. psi0(x) = q(|x|).
double window_profile(double r);

// psi0, the dyadic partition psi_j, phi = inverse transform of psi0 (cached as
// a radial interpolant), the rho1-scaled family phi_j and its closed-form
// transform. Immutable after build; safe to share across threads.
class MollifierSystem {
 public:
  struct Options {
    int dim = 1;
    double c1 = 1.0;
    RadiusFunction rho1 = RadiusFunction::power_law(1.0);
    double domain_extent = 64.0;  // R of the experiment grid; sets j_max
    int j_max = -1;               // -1: smallest j with 2^{j+1} >= domain_extent
    // phi construction grid (d=1): psi0 sampled at build_extent/build_samples
    double build_extent = 512.0;
    int build_samples = 1 << 17;
  };

  static std::shared_ptr<const MollifierSystem> build(const Options& opt);

  int dim() const { return dim_; }
  double c1() const { return c1_; }
  const RadiusFunction& rho1() const { return rho1_; }
  int j_max() const { return j_max_; }

  // rho1(2^j); j = -1 uses rho1(0.5)
  double scale(int j) const;

  // radial interpolant of phi; exact 0 beyond tail_radius(0)
  double phi(double r) const;
  // phi_j(x) at |x - center| = r: (c1/rho1(2^j))^d phi(c1 r / rho1(2^j))
  double phi_family(int j, double r) const;
  // psi_j at radius r: q(r/2^j) - q(r/2^{j-1}) for j >= 1, q(r) for j = 0
  double partition_term(int j, double r) const;
  // closed-form transform of phi_j: q(rho1(2^j) |y| / c1) at |y| = r
  double hat_phi_j(int j, double r) const;

  double peak() const { return peak_; }          // phi(0)
  double integral() const { return integral_; }  // ∫phi (should be 1)
  double l1_norm() const { return l1_; }         // ∫|phi|
  double profile_step() const { return dr_; }
  // largest r with |phi(r)| > rel_thr * peak (rel_thr = 0 gives the cache end)
  double tail_radius(double rel_thr) const;

  struct EnvelopeFit {
    double slope = 0.0;      // d log|phi| / d log(1+r) over the window
    double intercept = 0.0;
    int points = 0;
  };
  // log-log regression on local maxima of |phi| in [lo, hi]
  EnvelopeFit envelope_fit(double lo, double hi) const;

  struct RadialProfile {
    std::vector<double> t;   // uniform grid from 0
    std::vector<double> p;   // p(t) = transform of |phi| at radius t
    std::vector<double> dp;  // central differences
    double p0 = 0.0;
    EnvelopeFit dp_fit;      // log|p'| vs log t on [4, 64]
    double partial_integral(double T) const;  // ∫_0^T |p'|
  };
  // d=1 only: the decay profile used by the L-kernel estimates
  RadialProfile radial_profile_decay() const;

  // dump the cached radial samples (r, phi) for reproducibility
  void write_profile_csv(const std::string& path) const;

 private:
  MollifierSystem() : rho1_(RadiusFunction::power_law(1.0)) {}
  double profile_at(double r) const;

  int dim_ = 1;
  double c1_ = 1.0;
  RadiusFunction rho1_;
  int j_max_ = 5;
  double dr_ = 0.0;            // profile sample step
  std::vector<double> prof_;   // phi(i * dr_)
  std::vector<double> slope_;  // Hermite slopes
  double r_cut_ = 0.0;
  double peak_ = 0.0, integral_ = 0.0, l1_ = 0.0;
  double build_extent_ = 0.0;
  int build_samples_ = 0;
};

}  // namespace thinlab
