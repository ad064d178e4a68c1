#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thinlab/radius.hpp"
#include "thinlab/sets.hpp"
#include "thinlab/spectral.hpp"

namespace thinlab {

// One rung of the necessity ladder: a spike train f_n supported in the thin
// set E_n whose transform dumps all but a vanishing fraction of its energy
// into the thin set Sigma_n.  At ladder scales n and a_n are far beyond any
// grid, so the ratio comes from the Dirichlet x bump factorization of
// fhat_n and the thinness sups from closed-form window counting; f_n and the
// explicit sets are materialized only when their size allows.
struct CounterexampleInstance {
  int dim = 1;
  double k = 0.0;
  double eps = 0.0;
  double t_k = 0.0;  // first scale where the compatibility margin fails
  double n = 0.0;    // spike count parameter ([t_k] in d=1, chosen in d=2)
  double a_n = 0.0;  // frequency-side count ([C1/rho1(n)] in d=1, exact in d=2)

  double spike_halfwidth = 0.0;  // eps*rho1(n)
  double sigma_halfwidth = 0.0;  // eps*rho2(a_n)
  double norm_sq = 0.0;          // ||f_n||^2, exact from disjoint supports

  double ratio = 0.0;   // ∫_{Sigma_n^c}|fhat_n|^2 / ||f_n||^2
  double defect = 0.0;  // uncertainty defect; equals 1/ratio since supp f ⊂ E

  double thinness_E = 0.0;      // measured sup of |E∩D|/|D| over centers
  double thinness_Sigma = 0.0;  // same for Sigma (sup-norm balls in d=2)

  // requirement flags from the construction: spread values must be >> 1 and
  // balance << 1 for the leakage estimate to bite
  double req_spread = 0.0;   // a_n * eps * rho1(n)
  double req_dual = 0.0;     // eps * rho2(a_n) * n (d>=2 only)
  double req_balance = 0.0;  // a_n rho1(n) / (n rho2(a_n)) (d=1 only)

  std::string note;

  std::optional<GridFunction> f_n;  // present when a grid was requested
  MeasurableSet E_n = MeasurableSet::empty(1);
  MeasurableSet Sigma_n = MeasurableSet::empty(1);
  bool sets_materialized = false;  // false when interval counts were too large

  bool grid_checked = false;
  double grid_ratio = 0.0;  // energy_split ratio from the grid realization
};

// Smallest t with C2/rho2(C1/rho1(t)) < t under the ladder schedule
// C1 -> k*c1, C2 -> k^2*c2 (d=1) or C2 -> k*c2 (d>=2), scanning a log-spaced
// probe grid up to t_max and bisecting the first sign change.  Returns the
// violating endpoint of the bracket; nullopt when no probe violates.
std::optional<double> find_violation(const CompatiblePair& pair, double k, int dim = 1,
                                     double t_max = 1e18, int probes = 20000);

// 1-D rung: spikes at the integers |j| <= n-1 of half-width eps*rho1(n),
// Sigma windows at the integers |l| <= a_n-1 of half-width eps*rho2(a_n),
// with n = [t_k] under the schedule C1 = k/eps, C2 = k^2/eps (the pair's own
// c1, c2 are the compatibility claim, not the ladder).  Degenerate n <= 1 or
// a_n <= 1 doubles k until both counts are honest, recording a note.  When
// `grid` is given, f_n is sampled on it and the closed-form ratio is
// cross-checked by energy_split; a grid that cannot resolve the spikes (less
// than 8 samples per bump) or reach the outer Sigma window is refused with
// the required sample count in the message.
CounterexampleInstance build_1d(const CompatiblePair& pair, double eps, double k,
                                const GridSpec* grid = nullptr);

// d>=2 rung (d = 2 supported): f_n = b(x1/(n-d)) * b(x2/(eps*rho1(n))), E_n
// the matching box, Sigma_n = [-eps*rho2(a_n), eps*rho2(a_n)] x
// [-(a_n-d), a_n-d], with C1 = C2 = k/eps, n = 2*ceil(t_k) and
// a_n = C1/rho1(n) exact.  Thinness is certified with sup-norm balls
// (Euclidean discs lose a factor 4/pi at the box corners).
CounterexampleInstance build_highdim(const CompatiblePair& pair, double eps, double k,
                                     int dim = 2);

// rungs are independent; runs them in parallel
std::vector<CounterexampleInstance> counterexample_ladder(const CompatiblePair& pair, double eps,
                                                          const std::vector<double>& ks,
                                                          int dim = 1);

// I_w / M for the squared Dirichlet kernel with `modes` terms: the fraction
// of one period's energy held by the center window [-halfwidth, halfwidth].
// Exact integrand (no sinc asymptotics), valid from modes = 1 up to 1e9+.
double dirichlet_window_fraction(double modes, double halfwidth);

// Spectral mass fraction of the unit bump b(x) = theta(1 - |x|) beyond
// frequency s, from a cached fine-grid transform; and its squared L2 norm.
double bump_spectral_tail(double s);
double bump_norm_sq();

// Off-Sigma fraction for the spike train via the factorization
// fhat(y) = D_{n-1}(y) * w * bhat(w y): window fraction per unit cell times
// the bump envelope mass inside the covered band.
double spike_train_offband_fraction(double n, double spike_halfwidth, double sigma_count,
                                    double sigma_halfwidth);

// sup over centers c of |E ∩ [c - rho(|c|), c + rho(|c|)]| / (2 rho(|c|))
// for the periodic spike set (intervals of half_width at 0, ±1, ...,
// ±(count-1)), by exact window counting plus local refinement; handles counts
// far beyond what an explicit interval list could hold.
double periodic_thinness_sup(double count, double half_width, const RadiusFunction& rho,
                             int probes = 2048);

// Same sup for the box [-half_width, half_width] x [-half_length, half_length]
// against sup-norm balls D(c, rho(|c|)) in d=2 (|c| Euclidean).
double box_thinness_sup(double half_width, double half_length, const RadiusFunction& rho,
                        int probes = 1024);

// Explicit grid realization of the 1-D construction for resolvable sizes:
// samples the train, builds both periodic sets, and measures the off-Sigma
// fraction with energy_split.  Used to validate the closed form.
struct GridRealization {
  GridFunction f;
  MeasurableSet E = MeasurableSet::empty(1);
  MeasurableSet Sigma = MeasurableSet::empty(1);
  double ratio = 0.0;         // off-Sigma spectral fraction
  double support_leak = 0.0;  // mass fraction outside E (0 up to roundoff)
};
GridRealization realize_1d(double n, double spike_halfwidth, double sigma_count,
                           double sigma_halfwidth, const GridSpec& spec);

}  // namespace thinlab
