#pragma once

#include <memory>
#include <string>
#include <vector>

#include "thinlab/mollifier.hpp"
#include "thinlab/radius.hpp"
#include "thinlab/sets.hpp"
#include "thinlab/spectral.hpp"

namespace thinlab {

// Schur-test quantities for the two kernels plus the measured spectral
// leakages driving the smallness condition 4(alpha+beta) <= 1/2.
struct SchurReport {
  double sup_row = 0.0;       // sup_x ∫|K(x,y)| dy
  double sup_col = 0.0;       // sup_y ∫|K(x,y)| dx
  double thin_row_sup = 0.0;  // sup_x ∫_E |K(x,y)| dy
  double thin_col_sup = 0.0;  // sup_y ∫_Σ |L(x,y)| dx
  double epsilon = 0.0;
  double leakage_alpha = 0.0;  // max_corpus ‖S(χ_E f)‖² / ‖f‖²
  double leakage_beta = 0.0;   // max_corpus ‖χ_Σ (Tf)^‖² / ‖f‖²
};

// Full-line kernel integrals for both kernels (no set restriction).
struct KernelSups {
  double k_row = 0.0, k_col = 0.0;
  double l_row = 0.0, l_col = 0.0;
};

struct UpReport {
  double c_emp = 0.0;       // worst uncertainty defect over the corpus
  int worst_function = -1;  // corpus index attaining it
  double alpha = 0.0, beta = 0.0;
  bool smallness = false;  // 4(alpha+beta) <= 1/2
  bool compatible = true;  // radius pair passed the compatibility probe
  std::string warning;
};

// The low/high frequency splitting f = Sf + Tf on a fixed grid.
// S runs the dyadic partition against rho1-scaled smoothing; T is the
// complement. Convolutions are exact Fourier multipliers. Immutable.
class OperatorPair {
 public:
  OperatorPair(std::shared_ptr<const MollifierSystem> sys, CompatiblePair pair,
               const GridSpec& grid);

  const MollifierSystem& sys() const { return *sys_; }
  const CompatiblePair& pair() const { return pair_; }
  const GridSpec& grid() const { return grid_; }
  int j_max() const { return sys_->j_max(); }

  GridFunction apply_S(const GridFunction& f) const;
  GridFunction apply_T(const GridFunction& f) const;

  // spatial kernel: K(x,y) = Σ_{j=0}^{j_max} ψ_j(x) φ_{j-1}(x-y)
  double kernel_K(const Point& x, const Point& y) const;
  double kernel_K(double x, double y) const;
  // frequency kernel: L(x,y) = Σ_j 2^{jd} φ(2^j(x-y)) (φ̂_j(y) - φ̂_{j-1}(y)),
  // summed until the multiplier difference is identically 1-1
  double kernel_L(const Point& x, const Point& y) const;
  double kernel_L(double x, double y) const;

  // sup of row/column integrals over the standard probe family
  // (log-spaced radii plus the annulus midpoints 3·2^{j-1}/2); d=1 only
  KernelSups kernel_sups(int probes = 256) const;

  SchurReport schur_bounds(const MeasurableSet& E, const MeasurableSet& Sigma,
                           double epsilon,
                           const std::vector<GridFunction>& corpus,
                           int probes = 256) const;

  UpReport verify_up_inequality(const MeasurableSet& E,
                                const MeasurableSet& Sigma,
                                const std::vector<GridFunction>& corpus) const;

  void leakages(const MeasurableSet& E, const MeasurableSet& Sigma,
                const std::vector<GridFunction>& corpus, double* alpha,
                double* beta) const;

 private:
  // level j of the frequency kernel contributes only at |y| in (lo, hi)
  struct LBand {
    int j = 0;
    double lo = 0.0, hi = 0.0;
    double s_prev = 0.0, s_cur = 0.0;  // rho1(2^{j-1}), rho1(2^j)
    double dil = 1.0, amp = 1.0;       // 2^j, 2^{jd}
  };

  double kernel_K_radial(double ax, double dist) const;
  double kernel_L_radial(double dist, double ay) const;
  double row_integral_K(double x, const MeasurableSet* E) const;
  double col_integral_K(double y) const;
  double col_integral_L(double y, const MeasurableSet* Sigma) const;
  double row_integral_L(double x) const;
  std::vector<double> probe_radii(double hi, int n) const;

  std::shared_ptr<const MollifierSystem> sys_;
  CompatiblePair pair_;
  GridSpec grid_;
  std::vector<std::vector<double>> psi_;  // ψ_j on the primal grid, j=0..j_max
  std::vector<std::vector<double>> hat_;  // φ̂_j on the dual grid, j=-1..j_max
  std::vector<LBand> bands_;
};

}  // namespace thinlab
