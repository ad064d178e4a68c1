#pragma once

#include <functional>
#include <vector>

namespace thinlab {

// Adaptive Simpson on [a,b]; recursion splits until the 5-point correction is
// below tol (absolute). Kinks are fine, integrable endpoint singularities are
// not (callers reparametrize instead).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 48);

// Nodes/weights for n-point Gauss-Legendre on [-1,1] (Newton on P_n).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Composite trapezoid over an explicit sorted knot vector.
double trapezoid(const std::function<double(double)>& f, const std::vector<double>& knots);

// Sorted unique merge of segment grids; used to build kernel quadrature knots.
class KnotBuilder {
 public:
  // add [lo,hi] sampled at `count` intervals (count+1 knots)
  void add_segment(double lo, double hi, int count);
  std::vector<double> take_sorted();

 private:
  std::vector<double> knots_;
};

}  // namespace thinlab
