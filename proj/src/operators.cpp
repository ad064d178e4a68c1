#include "thinlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "thinlab/quad.hpp"
#include "thinlab/util.hpp"

namespace thinlab {

namespace {

int seg_count(double len, double per_unit, int cap) {
  const double want = len * per_unit + 1.0;
  if (want >= cap) return cap;
  return std::max(9, static_cast<int>(std::ceil(want)));
}

// trapezoid of fn over the part of [clip_lo, clip_hi] covered by the sorted
// disjoint intervals, reusing the global knot vector for resolution; tiny
// intervals holding no knots get a Simpson fallback
double integrate_on_intervals(const std::vector<double>& knots,
                              const std::vector<Interval>& ivs, double clip_lo,
                              double clip_hi,
                              const std::function<double(double)>& fn) {
  double acc = 0.0;
  std::size_t k = 0;
  for (const auto& iv : ivs) {
    const double a = std::max(iv.lo, clip_lo);
    const double b = std::min(iv.hi, clip_hi);
    if (b <= a) continue;
    while (k < knots.size() && knots[k] <= a) ++k;
    std::size_t k2 = k;
    const double fa = fn(a);
    const double fb = fn(b);
    if (k2 >= knots.size() || knots[k2] >= b) {
      const double m = 0.5 * (a + b);
      acc += (b - a) / 6.0 * (fa + 4.0 * fn(m) + fb);
      continue;
    }
    double px = a, pf = fa, sub = 0.0;
    while (k2 < knots.size() && knots[k2] < b) {
      const double cf = fn(knots[k2]);
      sub += 0.5 * (knots[k2] - px) * (pf + cf);
      px = knots[k2];
      pf = cf;
      ++k2;
    }
    sub += 0.5 * (b - px) * (pf + fb);
    acc += sub;
    k = k2;
  }
  return acc;
}

}  // namespace

OperatorPair::OperatorPair(std::shared_ptr<const MollifierSystem> sys,
                           CompatiblePair pair, const GridSpec& grid)
    : sys_(std::move(sys)), pair_(std::move(pair)), grid_(grid) {
  if (!sys_) throw std::invalid_argument("OperatorPair: null mollifier system");
  if (grid_.dim != sys_->dim())
    throw std::invalid_argument("OperatorPair: grid/mollifier dim mismatch");
  if (pair_.rho1.describe() != sys_->rho1().describe() ||
      pair_.c1 != sys_->c1())
    throw std::invalid_argument(
        "OperatorPair: pair.rho1/C1 differ from the mollifier system");

  const int jm = sys_->j_max();
  GridFunction probe(grid_);
  const std::size_t total = probe.size();

  psi_.resize(jm + 1);
  for (int j = 0; j <= jm; ++j) {
    psi_[j].resize(total);
    for (std::size_t i = 0; i < total; ++i) {
      const Point x = probe.point(i);
      double r2 = 0.0;
      for (int a = 0; a < grid_.dim; ++a) r2 += x[a] * x[a];
      psi_[j][i] = sys_->partition_term(j, std::sqrt(r2));
    }
  }

  GridFunction dprobe(grid_.dual());
  hat_.resize(jm + 2);
  for (int j = -1; j <= jm; ++j) {
    auto& h = hat_[j + 1];
    h.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
      const Point y = dprobe.point(i);
      double r2 = 0.0;
      for (int a = 0; a < grid_.dim; ++a) r2 += y[a] * y[a];
      h[i] = sys_->hat_phi_j(j, std::sqrt(r2));
    }
  }

  // frequency-kernel bands: level j matters only for
  // C1/rho1(2^{j-1}) < |y| < 2 C1/rho1(2^j)
  const double reach =
      2.0 * std::max(grid_.dual_extent(), grid_.extent) + 1.0;
  const double c1 = sys_->c1();
  for (int j = 0; j < 400; ++j) {
    const double sp = sys_->scale(j - 1);
    const double sc = sys_->scale(j);
    if (sp <= 0.0) break;  // multipliers all 1 from here on
    if (sc == sp) continue;  // difference identically zero
    LBand b;
    b.j = j;
    b.lo = c1 / sp;
    b.hi = sc > 0.0 ? 2.0 * c1 / sc : std::numeric_limits<double>::infinity();
    b.s_prev = sp;
    b.s_cur = sc;
    b.dil = std::pow(2.0, j);
    b.amp = grid_.dim == 1 ? b.dil : b.dil * b.dil;
    bands_.push_back(b);
    if (b.lo > reach) break;
    if (sc <= 0.0) break;
  }
}

GridFunction OperatorPair::apply_S(const GridFunction& f) const {
  if (!(f.spec() == grid_))
    throw std::invalid_argument("apply_S: function grid does not match");
  GridFunction F = forward_transform(f);
  GridFunction out(grid_);
  const int jm = sys_->j_max();
  for (int j = 0; j <= jm; ++j) {
    GridFunction G = F;
    const auto& h = hat_[j];  // multiplier of phi_{j-1}
    for (std::size_t i = 0; i < G.size(); ++i) G[i] *= h[i];
    GridFunction g = inverse_transform(G);
    const auto& w = psi_[j];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[i] * g[i];
  }
  return out;
}

GridFunction OperatorPair::apply_T(const GridFunction& f) const {
  if (!(f.spec() == grid_))
    throw std::invalid_argument("apply_T: function grid does not match");
  GridFunction F = forward_transform(f);
  GridFunction out(grid_);
  const int jm = sys_->j_max();
  for (int j = 0; j <= jm; ++j) {
    GridFunction G = F;
    const auto& h = hat_[j];
    for (std::size_t i = 0; i < G.size(); ++i) G[i] *= h[i];
    GridFunction g = inverse_transform(G);
    const auto& w = psi_[j];
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] += w[i] * (f[i] - g[i]);
  }
  return out;
}

double OperatorPair::kernel_K_radial(double ax, double dist) const {
  const int jm = sys_->j_max();
  double acc = 0.0;
  for (int j = 0; j <= jm; ++j) {
    const double p2 = std::pow(2.0, j);
    if (ax >= 2.0 * p2) continue;
    if (j >= 1 && ax <= 0.5 * p2) continue;
    const double w = sys_->partition_term(j, ax);
    if (w == 0.0) continue;
    acc += w * sys_->phi_family(j - 1, dist);
  }
  return acc;
}

double OperatorPair::kernel_K(const Point& x, const Point& y) const {
  double r2 = 0.0, d2 = 0.0;
  for (int a = 0; a < grid_.dim; ++a) {
    r2 += x[a] * x[a];
    d2 += (x[a] - y[a]) * (x[a] - y[a]);
  }
  return kernel_K_radial(std::sqrt(r2), std::sqrt(d2));
}

double OperatorPair::kernel_K(double x, double y) const {
  return kernel_K_radial(std::fabs(x), std::fabs(x - y));
}

double OperatorPair::kernel_L_radial(double dist, double ay) const {
  const double c1 = sys_->c1();
  double acc = 0.0;
  for (const auto& b : bands_) {
    if (b.lo >= ay) break;
    if (b.hi <= ay) continue;
    const double hj = window_profile(b.s_cur * ay / c1);
    const double hprev = window_profile(b.s_prev * ay / c1);
    const double diff = hj - hprev;
    if (diff <= 0.0) continue;
    acc += b.amp * sys_->phi(b.dil * dist) * diff;
  }
  return acc;
}

double OperatorPair::kernel_L(const Point& x, const Point& y) const {
  double d2 = 0.0, y2 = 0.0;
  for (int a = 0; a < grid_.dim; ++a) {
    d2 += (x[a] - y[a]) * (x[a] - y[a]);
    y2 += y[a] * y[a];
  }
  return kernel_L_radial(std::sqrt(d2), std::sqrt(y2));
}

double OperatorPair::kernel_L(double x, double y) const {
  return kernel_L_radial(std::fabs(x - y), std::fabs(y));
}

double OperatorPair::row_integral_K(double x, const MeasurableSet* E) const {
  const double ax = std::fabs(x);
  const int jm = sys_->j_max();
  const double rcut = sys_->tail_radius(0.0);
  KnotBuilder kb;
  bool any = false;
  double vmax = 0.0;
  for (int j = 0; j <= jm; ++j) {
    if (sys_->partition_term(j, ax) <= 0.0) continue;
    const double s = sys_->scale(j - 1);
    if (!(s > 0.0))
      throw std::runtime_error(
          "kernel quadrature: rho1 scale vanishes at level " +
          std::to_string(j - 1));
    const double mu = sys_->c1() / s;
    const double V = rcut / mu;
    kb.add_segment(x - V, x + V, seg_count(2.0 * V, 128.0 * mu, 40000));
    vmax = std::max(vmax, V);
    any = true;
  }
  if (!any) return 0.0;
  auto fn = [&](double y) {
    return std::fabs(kernel_K_radial(ax, std::fabs(x - y)));
  };
  const auto knots = kb.take_sorted();
  if (!E) return trapezoid(fn, knots);
  return integrate_on_intervals(knots, E->interval_list(), x - vmax, x + vmax,
                                fn);
}

double OperatorPair::col_integral_K(double y) const {
  const int jm = sys_->j_max();
  const double rcut = sys_->tail_radius(0.0);
  KnotBuilder kb;
  bool any = false;
  for (int j = 0; j <= jm; ++j) {
    const double s = sys_->scale(j - 1);
    if (!(s > 0.0))
      throw std::runtime_error(
          "kernel quadrature: rho1 scale vanishes at level " +
          std::to_string(j - 1));
    const double mu = sys_->c1() / s;
    const double V = rcut / mu;
    const double lo_r = j == 0 ? 0.0 : std::pow(2.0, j - 1);
    const double hi_r = std::pow(2.0, j + 1);
    const double dens = std::max(128.0 * mu, 8.0);
    const double branches[2][2] = {{lo_r, hi_r}, {-hi_r, -lo_r}};
    for (const auto& br : branches) {
      const double lo = std::max(br[0], y - V);
      const double hi = std::min(br[1], y + V);
      if (hi <= lo) continue;
      kb.add_segment(lo, hi, seg_count(hi - lo, dens, 40000));
      any = true;
    }
  }
  if (!any) return 0.0;
  auto fn = [&](double x) {
    return std::fabs(kernel_K_radial(std::fabs(x), std::fabs(x - y)));
  };
  return trapezoid(fn, kb.take_sorted());
}

double OperatorPair::row_integral_L(double x) const {
  const double rcut = sys_->tail_radius(0.0);
  KnotBuilder kb;
  bool any = false;
  for (const auto& b : bands_) {
    const double V = rcut / b.dil;
    if (b.lo - V > std::fabs(x)) break;
    const double dens = 128.0 * b.dil;
    const double lo1 = std::max(b.lo, x - V);
    const double hi1 = std::min(b.hi, x + V);
    if (hi1 > lo1) {
      kb.add_segment(lo1, hi1, seg_count(hi1 - lo1, dens, 20000));
      any = true;
    }
    const double lo2 = std::max(-b.hi, x - V);
    const double hi2 = std::min(-b.lo, x + V);
    if (hi2 > lo2) {
      kb.add_segment(lo2, hi2, seg_count(hi2 - lo2, dens, 20000));
      any = true;
    }
  }
  if (!any) return 0.0;
  auto fn = [&](double y) {
    return std::fabs(kernel_L_radial(std::fabs(x - y), std::fabs(y)));
  };
  return trapezoid(fn, kb.take_sorted());
}

double OperatorPair::col_integral_L(double y, const MeasurableSet* Sigma) const {
  const double ay = std::fabs(y);
  const double rcut = sys_->tail_radius(0.0);
  KnotBuilder kb;
  bool any = false;
  double vmax = 0.0;
  for (const auto& b : bands_) {
    if (b.lo >= ay) break;
    if (b.hi <= ay) continue;
    const double V = rcut / b.dil;
    kb.add_segment(y - V, y + V, seg_count(2.0 * V, 128.0 * b.dil, 20000));
    vmax = std::max(vmax, V);
    any = true;
  }
  if (!any) return 0.0;
  auto fn = [&](double x) {
    return std::fabs(kernel_L_radial(std::fabs(x - y), ay));
  };
  const auto knots = kb.take_sorted();
  if (!Sigma) return trapezoid(fn, knots);
  return integrate_on_intervals(knots, Sigma->interval_list(), y - vmax,
                                y + vmax, fn);
}

std::vector<double> OperatorPair::probe_radii(double hi, int n) const {
  std::vector<double> p = log_spaced(std::min(1.0 / 64.0, hi / 64.0), hi, n);
  p.push_back(0.0);
  for (int j = 0; j <= sys_->j_max(); ++j) {
    const double mid = 3.0 * std::pow(2.0, j - 1) / 2.0;
    if (mid <= hi) p.push_back(mid);
  }
  return p;
}

KernelSups OperatorPair::kernel_sups(int probes) const {
  if (grid_.dim != 1)
    throw std::runtime_error("kernel_sups: implemented for d=1");
  if (probes <= 0) throw std::invalid_argument("kernel_sups: probe set empty");
  const double xmax = std::pow(2.0, sys_->j_max() + 1);
  const double ymax = 0.5 * grid_.dual_extent();
  const auto xp = probe_radii(xmax, probes);
  const auto yp = probe_radii(ymax, probes);
  KernelSups ks;
  ks.k_row = parallel_max(
      xp.size(), [&](std::size_t i) { return row_integral_K(xp[i], nullptr); });
  ks.k_col = parallel_max(
      xp.size(), [&](std::size_t i) { return col_integral_K(xp[i]); });
  ks.l_row = parallel_max(
      yp.size(), [&](std::size_t i) { return row_integral_L(yp[i]); });
  ks.l_col = parallel_max(yp.size(), [&](std::size_t i) {
    return col_integral_L(yp[i], nullptr);
  });
  return ks;
}

void OperatorPair::leakages(const MeasurableSet& E, const MeasurableSet& Sigma,
                            const std::vector<GridFunction>& corpus,
                            double* alpha, double* beta) const {
  std::vector<double> as(corpus.size(), 0.0), bs(corpus.size(), 0.0);
  parallel_for(corpus.size(), [&](std::size_t i) {
    const GridFunction& f = corpus[i];
    const double en = energy(f);
    if (en <= 0.0) return;
    GridFunction fe = f;
    for (std::size_t m = 0; m < fe.size(); ++m)
      if (!E.contains(fe.point(m))) fe[m] = 0.0;
    as[i] = energy(apply_S(fe)) / en;
    GridFunction tfh = forward_transform(apply_T(f));
    bs[i] = energy_split(tfh, Sigma).on_set / en;
  });
  *alpha = *std::max_element(as.begin(), as.end());
  *beta = *std::max_element(bs.begin(), bs.end());
}

SchurReport OperatorPair::schur_bounds(const MeasurableSet& E,
                                       const MeasurableSet& Sigma,
                                       double epsilon,
                                       const std::vector<GridFunction>& corpus,
                                       int probes) const {
  if (grid_.dim != 1)
    throw std::runtime_error("schur_bounds: implemented for d=1");
  if (E.dim() != 1 || Sigma.dim() != 1)
    throw std::invalid_argument("schur_bounds: sets must be 1-dimensional");
  if (probes <= 0) throw std::invalid_argument("schur_bounds: probe set empty");

  const double xmax = std::pow(2.0, sys_->j_max() + 1);
  const double ymax = 0.5 * grid_.dual_extent();
  const auto xp = probe_radii(xmax, probes);
  const auto yp = probe_radii(ymax, probes);

  SchurReport r;
  r.epsilon = epsilon;
  r.sup_row = parallel_max(
      xp.size(), [&](std::size_t i) { return row_integral_K(xp[i], nullptr); });
  r.sup_col = parallel_max(
      xp.size(), [&](std::size_t i) { return col_integral_K(xp[i]); });
  r.thin_row_sup = parallel_max(
      xp.size(), [&](std::size_t i) { return row_integral_K(xp[i], &E); });
  r.thin_col_sup = parallel_max(
      yp.size(), [&](std::size_t i) { return col_integral_L(yp[i], &Sigma); });
  if (!corpus.empty())
    leakages(E, Sigma, corpus, &r.leakage_alpha, &r.leakage_beta);
  return r;
}

UpReport OperatorPair::verify_up_inequality(
    const MeasurableSet& E, const MeasurableSet& Sigma,
    const std::vector<GridFunction>& corpus) const {
  if (corpus.empty())
    throw std::invalid_argument("verify_up_inequality: empty corpus");
  UpReport rep;
  if (!pair_.certified) {
    const auto cr = check_compatibility(pair_, 1e6, 2000);
    rep.compatible = cr.holds;
    if (!cr.holds)
      rep.warning = "radius pair failed compatibility (worst margin " +
                    fmt_double(cr.worst_margin) + " at t=" +
                    fmt_double(cr.worst_t) + "); inequality may degrade";
  }
  std::vector<double> defects(corpus.size(), 0.0);
  parallel_for(corpus.size(), [&](std::size_t i) {
    defects[i] = uncertainty_defect(corpus[i], E, Sigma);
  });
  rep.c_emp = 0.0;
  for (std::size_t i = 0; i < defects.size(); ++i) {
    if (defects[i] > rep.c_emp) {
      rep.c_emp = defects[i];
      rep.worst_function = static_cast<int>(i);
    }
  }
  leakages(E, Sigma, corpus, &rep.alpha, &rep.beta);
  rep.smallness = 4.0 * (rep.alpha + rep.beta) <= 0.5;
  return rep;
}

}  // namespace thinlab
