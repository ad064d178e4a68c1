#include "thinlab/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "thinlab/mollifier.hpp"
#include "thinlab/quad.hpp"
#include "thinlab/util.hpp"

namespace thinlab {

namespace {

// Spectrum of the unit bump b(x) = theta(1-|x|) on a fine grid, reduced to a
// radial tail profile.  Tail fractions are accumulated outside-in so values
// near the floor (~1e-15) carry no cancellation error.
struct BumpSpectrum {
  double dy = 0.0;
  double norm_sq = 0.0;
  std::vector<double> tail;  // tail[j] = mass fraction beyond |y| = (j+0.5)*dy
};

const BumpSpectrum& bump_spectrum() {
  static const BumpSpectrum cache = [] {
    BumpSpectrum s;
    GridSpec spec{1, 64.0, 1 << 14};
    GridFunction b = GridFunction::sample(spec, [](Point p) {
      return std::complex<double>(bump_transition(1.0 - std::abs(p[0])), 0.0);
    });
    s.norm_sq = energy(b);
    GridFunction bh = forward_transform(b);
    const int N = bh.samples();
    const int c = N / 2;  // index of y = 0
    const int half = std::min(c, N - c - 1);
    s.dy = bh.spacing();
    std::vector<double> shell(half + 1, 0.0);
    shell[0] = std::norm(bh[c]);
    for (int j = 1; j <= half; ++j) shell[j] = std::norm(bh[c + j]) + std::norm(bh[c - j]);
    for (int i = 0; i < c - half; ++i) shell[half] += std::norm(bh[i]);  // unpaired edge cells
    double total = 0.0;
    for (double v : shell) total += v;
    s.tail.assign(half + 1, 0.0);
    double beyond = 0.0;
    for (int j = half; j >= 0; --j) {
      s.tail[j] = beyond / total;
      beyond += shell[j];
    }
    return s;
  }();
  return cache;
}

double pow2_at_least(double need) {
  double p = 1.0;
  while (p < need && p < 1e18) p *= 2.0;
  return p;
}

}  // namespace

double bump_norm_sq() { return bump_spectrum().norm_sq; }

double bump_spectral_tail(double s) {
  const BumpSpectrum& B = bump_spectrum();
  if (s <= 0.0) return 1.0;
  const double r0 = 0.5 * B.dy;
  if (s <= r0) return 1.0 + (B.tail[0] - 1.0) * (s / r0);
  double pos = s / B.dy - 0.5;
  auto j = static_cast<std::size_t>(pos);
  if (j + 1 >= B.tail.size()) return 0.0;
  double frac = pos - static_cast<double>(j);
  return std::max(0.0, B.tail[j] * (1.0 - frac) + B.tail[j + 1] * frac);
}

double dirichlet_window_fraction(double modes, double halfwidth) {
  if (modes < 1.0) throw std::invalid_argument("dirichlet_window_fraction: modes must be >= 1");
  if (halfwidth <= 0.0) return 0.0;
  if (halfwidth >= 0.5) return 1.0;  // the window is the whole period
  const double M = modes;
  const double nu = halfwidth * M;
  // I_w / M = ∫_{-nu}^{nu} (sin(pi v) / (M sin(pi v / M)))^2 dv after u -> v/M;
  // the normalized integrand lives in [0,1] and is smooth across the cells
  auto g = [M](double v) {
    if (v < 1e-9) return 1.0;
    double q = std::sin(M_PI * v) / (M * std::sin(M_PI * v / M));
    return q * q;
  };
  double acc = 0.0;
  for (double m = 0.0; m < nu; m += 1.0) {
    double hi = std::min(m + 1.0, nu);
    if (hi <= m) break;
    acc += adaptive_simpson(g, m, hi, 1e-12);
  }
  return std::min(1.0, 2.0 * acc);
}

double spike_train_offband_fraction(double n, double spike_halfwidth, double sigma_count,
                                    double sigma_halfwidth) {
  if (n < 1.0 || sigma_count < 1.0)
    throw std::invalid_argument("spike_train_offband_fraction: counts must be >= 1");
  if (!(spike_halfwidth > 0.0) || !(sigma_halfwidth > 0.0))
    throw std::invalid_argument("spike_train_offband_fraction: widths must be positive");
  if (sigma_halfwidth >= 0.5)
    throw std::invalid_argument("spike_train_offband_fraction: Sigma windows merge at halfwidth >= 1/2");
  double window = dirichlet_window_fraction(2.0 * n - 1.0, sigma_halfwidth);
  double eta = bump_spectral_tail(spike_halfwidth * (sigma_count - 0.5));
  return 1.0 - window * (1.0 - eta);
}

double periodic_thinness_sup(double count, double half_width, const RadiusFunction& rho,
                             int probes) {
  if (count < 1.0 || half_width <= 0.0)
    throw std::invalid_argument("periodic_thinness_sup: need count >= 1 and half_width > 0");
  if (half_width >= 0.5)
    throw std::invalid_argument("periodic_thinness_sup: spikes merge at half_width >= 1/2");
  const double h = half_width;
  auto ratio = [&](double c) {
    c = std::abs(c);
    double r = rho(c);
    if (r <= 0.0) return 0.0;
    if (r <= 0.5) {
      // the window reaches at most the three nearest spikes; offset
      // coordinates keep full precision at counts around 1e11
      double m0 = std::round(c);
      double delta = c - m0;
      double acc = 0.0;
      for (int s = -1; s <= 1; ++s) {
        if (std::abs(m0 + s) > count - 1.0) continue;
        double ov = std::min(delta + r, s + h) - std::max(delta - r, s - h);
        if (ov > 0.0) acc += ov;
      }
      return acc / (2.0 * r);
    }
    // wide window; |c| is modest here for any decreasing profile
    double A = c - r, B = c + r;
    double lo = std::max(-(count - 1.0), std::ceil(A - h));
    double hi = std::min(count - 1.0, std::floor(B + h));
    if (hi < lo) return 0.0;
    auto clip = [&](double m) { return std::max(0.0, std::min(B, m + h) - std::max(A, m - h)); };
    double acc = 0.0;
    if (hi - lo <= 64.0) {
      for (double m = lo; m <= hi; m += 1.0) acc += clip(m);
    } else {
      double flo = std::max(lo, std::ceil(A + h));
      double fhi = std::min(hi, std::floor(B - h));
      if (fhi >= flo) acc += (fhi - flo + 1.0) * 2.0 * h;
      for (double m = lo; m < flo; m += 1.0) acc += clip(m);
      for (double m = fhi + 1.0; m <= hi; m += 1.0) acc += clip(m);
    }
    return acc / (2.0 * r);
  };

  double best = 0.0, bc = 0.0;
  auto consider = [&](double c) {
    if (c < 0.0) return;
    double v = ratio(c);
    if (v > best) {
      best = v;
      bc = c;
    }
  };
  const double edge = count - 1.0;
  consider(0.0);
  consider(1.0);
  consider(2.0);
  for (double c : log_spaced(std::min(0.25, edge + 1.0), edge + 2.0, probes)) consider(c);
  for (double d : {0.0, h, -h, 0.5, -0.5, 1.0, -1.0}) consider(edge + d);
  double span = 1.0;
  for (int round = 0; round < 6; ++round) {
    double lo = std::max(0.0, bc - span);
    for (int i = 0; i <= 80; ++i) consider(lo + 2.0 * span * i / 80.0);
    span /= 18.0;
  }
  return best;
}

double box_thinness_sup(double half_width, double half_length, const RadiusFunction& rho,
                        int probes) {
  if (half_width <= 0.0 || half_length <= 0.0)
    throw std::invalid_argument("box_thinness_sup: box half-sizes must be positive");
  const double w = half_width, L = half_length;
  // overlap of the sup-norm ball D(c, rho(|c|)) with the box, written in
  // edge-relative coordinates so nothing cancels at lengths around 1e11
  auto ratio = [&](double c0, double c1) {
    c0 = std::abs(c0);
    c1 = std::abs(c1);
    double r = rho(std::hypot(c0, c1));
    if (r <= 0.0) return 0.0;
    double cx = std::min(w - c0, r) + std::min(w + c0, r);
    if (cx <= 0.0) return 0.0;
    double u = L - c1;
    double cy = std::min(u, r) + std::min(2.0 * L - u, r);
    if (cy <= 0.0) return 0.0;
    return cx * cy / (4.0 * r * r);
  };

  double best = 0.0, b0 = 0.0, b1 = 0.0;
  auto consider = [&](double c0, double c1) {
    double v = ratio(c0, c1);
    if (v > best) {
      best = v;
      b0 = std::abs(c0);
      b1 = std::abs(c1);
    }
  };
  std::vector<double> c1s = {0.0, L, std::max(0.0, L - 1.0), L + 0.5};
  double rL = rho(L);
  if (rL > 0.0) {
    c1s.push_back(std::max(0.0, L - rL));
    c1s.push_back(L + rL);
  }
  for (double c : log_spaced(std::min(0.25, L), L + 2.0, probes)) c1s.push_back(c);
  for (double c1 : c1s) {
    double rr = std::max(rho(std::abs(c1)), 1e-12);
    for (int i = 0; i <= 48; ++i) consider((w + rr) * i / 48.0, c1);
  }
  double s0 = std::max(w, 1e-3), s1 = 1.0;
  for (int round = 0; round < 6; ++round) {
    double lo0 = std::max(0.0, b0 - s0), lo1 = std::max(0.0, b1 - s1);
    for (int i = 0; i <= 16; ++i)
      for (int j = 0; j <= 16; ++j)
        consider(lo0 + 2.0 * s0 * i / 16.0, lo1 + 2.0 * s1 * j / 16.0);
    s0 /= 12.0;
    s1 /= 12.0;
  }
  return best;
}

std::optional<double> find_violation(const CompatiblePair& pair, double k, int dim, double t_max,
                                     int probes) {
  if (k < 1.0) throw std::invalid_argument("find_violation: k must be >= 1");
  if (dim < 1) throw std::invalid_argument("find_violation: dim must be >= 1");
  const double c1 = k * pair.c1;
  const double c2 = (dim == 1 ? k * k : k) * pair.c2;
  auto margin = [&](double t) {
    double r1 = pair.rho1(t);
    if (r1 <= 0.0) return std::numeric_limits<double>::infinity();
    double r2 = pair.rho2(c1 / r1);
    if (r2 <= 0.0) return std::numeric_limits<double>::infinity();
    return c2 / r2 - t;
  };
  double prev = 0.0;
  for (double t : log_spaced(1e-3, t_max, probes)) {
    if (margin(t) < 0.0) {
      double lo = prev, hi = t;  // margin(lo) >= 0 > margin(hi)
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        (margin(mid) < 0.0 ? hi : lo) = mid;
      }
      return hi;
    }
    prev = t;
  }
  return std::nullopt;
}

CounterexampleInstance build_1d(const CompatiblePair& pair, double eps, double k,
                                const GridSpec* grid) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("build_1d: eps must lie in (0,1)");
  if (k < 1.0) throw std::invalid_argument("build_1d: k must be >= 1");
  // the ladder schedule C1 = k/eps, C2 = k^2/eps; the pair's own constants
  // describe the compatibility claim being refuted, not the construction
  CompatiblePair sched{pair.rho1, pair.rho2, 1.0 / eps, 1.0 / eps, false};
  CounterexampleInstance inst;
  inst.dim = 1;
  inst.eps = eps;
  double kk = k, t = 0.0, n = 0.0, an = 0.0;
  for (;;) {
    auto tk = find_violation(sched, kk, 1);
    if (!tk)
      throw std::invalid_argument(
          "build_1d: schedule C1=k/eps, C2=k^2/eps stays compatible up to t_max; no "
          "counterexample for this pair");
    t = *tk;
    n = std::floor(t);
    double r1 = pair.rho1(n);
    if (n >= 2.0 && r1 > 0.0) {
      an = std::floor(kk / eps / r1);
      if (an >= 2.0) break;
    }
    kk *= 2.0;
    inst.note += "k doubled to " + fmt_double(kk) + " (degenerate counts); ";
    if (kk > 1e12) throw std::runtime_error("build_1d: counts stay degenerate under k doubling");
  }
  const double r1 = pair.rho1(n), r2 = pair.rho2(an);
  const double w = eps * r1, ws = eps * r2;
  if (!(w < 0.5) || !(ws < 0.5))
    throw std::invalid_argument("build_1d: eps*rho must stay below 1/2 for disjoint windows (got " +
                                fmt_double(w) + " and " + fmt_double(ws) + ")");
  inst.k = kk;
  inst.t_k = t;
  inst.n = n;
  inst.a_n = an;
  inst.spike_halfwidth = w;
  inst.sigma_halfwidth = ws;
  inst.norm_sq = (2.0 * n - 1.0) * w * bump_norm_sq();
  inst.ratio = spike_train_offband_fraction(n, w, an, ws);
  inst.defect = inst.ratio > 0.0 ? 1.0 / inst.ratio : std::numeric_limits<double>::infinity();
  inst.thinness_E = periodic_thinness_sup(n, w, pair.rho1);
  inst.thinness_Sigma = periodic_thinness_sup(an, ws, pair.rho2);
  inst.req_spread = an * eps * r1;
  inst.req_balance = an * r1 / (n * r2);
  const double kMaxIntervals = 4.0e6;
  if (2.0 * n - 1.0 <= kMaxIntervals && 2.0 * an - 1.0 <= kMaxIntervals) {
    inst.E_n = periodic_thin_set(1, static_cast<long long>(n), w);
    inst.Sigma_n = periodic_thin_set(1, static_cast<long long>(an), ws);
    inst.sets_materialized = true;
  } else {
    inst.note += "sets left implicit (" + fmt_double(2.0 * n - 1.0) + " + " +
                 fmt_double(2.0 * an - 1.0) +
                 " intervals); thinness certified by window counting; ";
  }
  if (grid) {
    GridRealization gr = realize_1d(n, w, an, ws, *grid);
    if (!inst.sets_materialized) {
      inst.E_n = gr.E;
      inst.Sigma_n = gr.Sigma;
      inst.sets_materialized = true;
    }
    inst.f_n = std::move(gr.f);
    inst.grid_checked = true;
    inst.grid_ratio = gr.ratio;
  }
  return inst;
}

CounterexampleInstance build_highdim(const CompatiblePair& pair, double eps, double k, int dim) {
  if (dim != 2)
    throw std::invalid_argument("build_highdim: only d=2 is materialized (grid types are 2-D)");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("build_highdim: eps must lie in (0,1)");
  if (k < 1.0) throw std::invalid_argument("build_highdim: k must be >= 1");
  CompatiblePair sched{pair.rho1, pair.rho2, 1.0 / eps, 1.0 / eps, false};
  CounterexampleInstance inst;
  inst.dim = dim;
  inst.eps = eps;
  double kk = k, t = 0.0, n = 0.0, an = 0.0;
  for (;;) {
    auto tk = find_violation(sched, kk, dim);
    if (!tk)
      throw std::invalid_argument(
          "build_highdim: schedule C1=C2=k/eps stays compatible up to t_max; no counterexample "
          "for this pair");
    t = *tk;
    n = 2.0 * std::ceil(t);  // comfortably inside the violation region
    double r1 = pair.rho1(n);
    if (n > dim && r1 > 0.0) {
      an = kk / eps / r1;  // exact in d >= 2; no floor in the construction
      if (an > dim) break;
    }
    kk *= 2.0;
    inst.note += "k doubled to " + fmt_double(kk) + " (degenerate counts); ";
    if (kk > 1e12)
      throw std::runtime_error("build_highdim: counts stay degenerate under k doubling");
  }
  const double r1 = pair.rho1(n), r2 = pair.rho2(an);
  const double w = eps * r1, ws = eps * r2;
  if (!(w < 0.5) || !(ws < 0.5))
    throw std::invalid_argument("build_highdim: eps*rho must stay below 1/2 (got " +
                                fmt_double(w) + " and " + fmt_double(ws) + ")");
  inst.k = kk;
  inst.t_k = t;
  inst.n = n;
  inst.a_n = an;
  inst.spike_halfwidth = w;
  inst.sigma_halfwidth = ws;
  inst.norm_sq = (n - dim) * w * bump_norm_sq() * bump_norm_sq();
  double eta1 = bump_spectral_tail((n - dim) * ws);  // x1 factor vs Sigma's narrow side
  double eta2 = bump_spectral_tail(w * (an - dim));  // x2 factor vs Sigma's long side
  inst.ratio = 1.0 - (1.0 - eta1) * (1.0 - eta2);
  inst.defect = inst.ratio > 0.0 ? 1.0 / inst.ratio : std::numeric_limits<double>::infinity();
  inst.thinness_E = box_thinness_sup(w, n - dim, pair.rho1);
  inst.thinness_Sigma = box_thinness_sup(ws, an - dim, pair.rho2);
  inst.req_spread = an * eps * r1;
  inst.req_dual = eps * r2 * n;
  inst.E_n = periodic_thin_set(2, static_cast<long long>(n), w);
  inst.Sigma_n = MeasurableSet::boxes({Box{{-ws, -(an - dim)}, {ws, an - dim}}});
  inst.sets_materialized = true;
  return inst;
}

std::vector<CounterexampleInstance> counterexample_ladder(const CompatiblePair& pair, double eps,
                                                          const std::vector<double>& ks,
                                                          int dim) {
  std::vector<CounterexampleInstance> out(ks.size());
  std::vector<std::string> errs(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) {
    try {
      out[i] = dim == 1 ? build_1d(pair, eps, ks[i]) : build_highdim(pair, eps, ks[i], dim);
    } catch (const std::exception& e) {
      errs[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < errs.size(); ++i)
    if (!errs[i].empty())
      throw std::runtime_error("counterexample_ladder: k=" + fmt_double(ks[i]) + ": " + errs[i]);
  return out;
}

GridRealization realize_1d(double n, double spike_halfwidth, double sigma_count,
                           double sigma_halfwidth, const GridSpec& spec) {
  if (spec.dim != 1) throw std::invalid_argument("realize_1d: 1-D grids only");
  if (n < 1.0 || sigma_count < 1.0 || !(spike_halfwidth > 0.0) || !(sigma_halfwidth > 0.0))
    throw std::invalid_argument("realize_1d: bad train parameters");
  const double w = spike_halfwidth, ws = sigma_halfwidth;
  const double need_extent = 2.0 * (n - 1.0) + 2.0;
  if (spec.extent < need_extent)
    throw std::invalid_argument("realize_1d: extent " + fmt_double(spec.extent) +
                                " cannot hold the train; need R >= " + fmt_double(need_extent));
  if (w / spec.spacing() < 8.0)
    throw std::invalid_argument(
        "realize_1d: grid cannot resolve the spikes (" + fmt_double(w / spec.spacing()) +
        " samples per bump); need N >= " + fmt_double(pow2_at_least(spec.extent * 8.0 / w)));
  const double dual_need = sigma_count - 1.0 + ws;
  if (0.5 * spec.dual_extent() < dual_need)
    throw std::invalid_argument(
        "realize_1d: dual grid stops before the outer Sigma window; need N >= " +
        fmt_double(pow2_at_least(2.0 * dual_need * spec.extent)));
  if (2.0 * sigma_count - 1.0 > 8.0e6)
    throw std::invalid_argument("realize_1d: too many Sigma windows for an explicit set");

  GridRealization out{GridFunction::sample(spec,
                                           [&](Point p) {
                                             double j = std::round(p[0]);
                                             if (std::abs(j) > n - 1.0)
                                               return std::complex<double>(0.0, 0.0);
                                             double u = std::abs(p[0] - j) / w;
                                             if (u >= 1.0) return std::complex<double>(0.0, 0.0);
                                             return std::complex<double>(
                                                 bump_transition(1.0 - u), 0.0);
                                           })};
  out.E = periodic_thin_set(1, static_cast<long long>(n), w);
  out.Sigma = periodic_thin_set(1, static_cast<long long>(sigma_count), ws);
  EnergyReport primal = energy_split(out.f, out.E);
  if (primal.total <= 0.0) throw std::runtime_error("realize_1d: sampled train has no energy");
  out.support_leak = primal.off_set / primal.total;
  EnergyReport dual = energy_split(forward_transform(out.f), out.Sigma);
  out.ratio = dual.off_set / dual.total;
  return out;
}

}  // namespace thinlab
