#include "thinlab/quad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thinlab {

namespace {
double simpson_rec(const std::function<double(double)>& f, double a, double m, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));  // Tricomi initial guess
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

double trapezoid(const std::function<double(double)>& f, const std::vector<double>& knots) {
  if (knots.size() < 2) return 0.0;
  double sum = 0.0;
  double prev = f(knots[0]);
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double cur = f(knots[i]);
    sum += 0.5 * (prev + cur) * (knots[i] - knots[i - 1]);
    prev = cur;
  }
  return sum;
}

void KnotBuilder::add_segment(double lo, double hi, int count) {
  if (!(hi > lo) || count < 1) return;
  const double h = (hi - lo) / count;
  for (int i = 0; i <= count; ++i) knots_.push_back(lo + h * i);
}

std::vector<double> KnotBuilder::take_sorted() {
  std::sort(knots_.begin(), knots_.end());
  knots_.erase(std::unique(knots_.begin(), knots_.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-13 * (1.0 + std::abs(a)); }),
               knots_.end());
  return std::move(knots_);
}

}  // namespace thinlab
