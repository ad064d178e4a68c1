#include "thinlab/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "thinlab/quad.hpp"
#include "thinlab/spectral.hpp"
#include "thinlab/util.hpp"

namespace thinlab {

namespace {

double smooth_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// least squares y = slope * x + intercept
void fit_line(const std::vector<double>& x, const std::vector<double>& y,
              double* slope, double* intercept) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det <= 0.0) throw std::runtime_error("envelope fit: degenerate abscissae");
  *slope = (n * sxy - sx * sy) / det;
  *intercept = (sxx * sy - sx * sxy) / det;
}

// local maxima of |v| restricted to index range [i0, i1]
std::vector<std::size_t> peak_indices(const std::vector<double>& v,
                                      std::size_t i0, std::size_t i1) {
  std::vector<std::size_t> out;
  for (std::size_t i = std::max<std::size_t>(i0, 1); i + 1 < v.size() && i <= i1;
       ++i) {
    const double a = std::fabs(v[i]);
    if (a > std::fabs(v[i - 1]) && a >= std::fabs(v[i + 1]) && a > 0.0)
      out.push_back(i);
  }
  return out;
}

}  // namespace

double bump_transition(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = smooth_exp(t);
  return a / (a + smooth_exp(1.0 - t));
}

double window_profile(double r) { return bump_transition(2.0 - r); }

std::shared_ptr<const MollifierSystem> MollifierSystem::build(
    const Options& opt) {
  if (opt.dim != 1 && opt.dim != 2)
    throw std::invalid_argument("MollifierSystem: dim must be 1 or 2");
  if (!(opt.c1 > 0.0) || !std::isfinite(opt.c1))
    throw std::invalid_argument("MollifierSystem: c1 must be positive");

  auto sys = std::shared_ptr<MollifierSystem>(new MollifierSystem());
  sys->dim_ = opt.dim;
  sys->c1_ = opt.c1;
  sys->rho1_ = opt.rho1;
  sys->build_extent_ = opt.build_extent;
  sys->build_samples_ = opt.build_samples;

  if (opt.j_max >= 0) {
    sys->j_max_ = opt.j_max;
  } else {
    if (!(opt.domain_extent > 0.0))
      throw std::invalid_argument("MollifierSystem: domain_extent must be > 0");
    int j = 0;
    while (std::pow(2.0, j + 1) < opt.domain_extent) ++j;
    sys->j_max_ = j;
  }

  if (opt.dim == 1) {
    // phi from the transform of psi0 sampled on a wide fine grid.  The
    // transform of a real even function is real even, so the positive-radius
    // half of the output is the whole story.
    const GridSpec gs{1, opt.build_extent, opt.build_samples};
    if (gs.spacing() > 1.0 / 256.0)
      throw std::invalid_argument(
          "MollifierSystem: build grid too coarse to resolve psi0 "
          "(need >= 256 samples per unit)");
    GridFunction f(gs);
    for (int m = 0; m < gs.samples; ++m)
      f[m] = window_profile(std::fabs(f.coord(m)));
    GridFunction phi = forward_transform(f);

    const GridSpec ds = phi.spec();
    const int n = ds.samples;
    const int half = n / 2;
    const double dr = ds.spacing();
    sys->dr_ = dr;

    double imag_max = 0.0, asym_max = 0.0;
    for (int m = 0; m < n; ++m)
      imag_max = std::max(imag_max, std::fabs(phi[m].imag()));
    for (int i = 1; i < half; ++i)
      asym_max = std::max(asym_max, std::fabs(phi[half + i].real() -
                                              phi[half - i].real()));
    if (imag_max > 1e-10 || asym_max > 1e-10)
      throw std::runtime_error("MollifierSystem: phi lost radial symmetry");

    std::vector<double> prof(half);
    for (int i = 0; i < half; ++i) prof[i] = phi[half + i].real();
    sys->peak_ = prof[0];

    // aliasing check: essentially all mass must sit well inside the window
    double total = 0.0, tail = 0.0;
    for (int i = 0; i < half; ++i) {
      const double a = std::fabs(prof[i]);
      total += a;
      if (i * dr > ds.extent / 4.0) tail += a;
    }
    if (tail > 1e-8 * total)
      throw std::runtime_error(
          "MollifierSystem: phi tail mass exceeds 1e-8 of total "
          "(aliasing); increase build_extent/build_samples");

    const double floor = 1e-16 * std::fabs(sys->peak_);
    int cut = half - 1;
    while (cut > 0 && std::fabs(prof[cut]) <= floor) --cut;
    cut = std::min(half - 1, cut + 8);
    prof.resize(cut + 1);
    sys->prof_ = std::move(prof);
    sys->r_cut_ = cut * dr;

    double sum = sys->peak_, abs_sum = std::fabs(sys->peak_);
    for (std::size_t i = 1; i < sys->prof_.size(); ++i) {
      sum += 2.0 * sys->prof_[i];
      abs_sum += 2.0 * std::fabs(sys->prof_[i]);
    }
    sys->integral_ = sum * dr;
    sys->l1_ = abs_sum * dr;
  } else {
    // d=2: radial profile via the order-zero Hankel transform
    //   phi(r) = 2π ∫_0^2 q(s) J0(2π r s) s ds,
    // panel count grows with r to track the oscillation of J0.
    const double dr = 1.0 / 128.0;
    const double r_max = 32.0;
    const int count = static_cast<int>(std::lround(r_max / dr)) + 1;
    sys->dr_ = dr;
    sys->r_cut_ = r_max;
    sys->prof_.assign(count, 0.0);
    std::vector<double> gx, gw;
    gauss_legendre(10, gx, gw);
    std::vector<double>& prof = sys->prof_;
    parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
      const double r = static_cast<double>(i) * dr;
      const int panels = std::max(8, static_cast<int>(std::ceil(6.0 * r)));
      const double w = 2.0 / panels;
      double acc = 0.0;
      for (int pnl = 0; pnl < panels; ++pnl) {
        const double lo = pnl * w;
        for (std::size_t k = 0; k < gx.size(); ++k) {
          const double s = lo + 0.5 * w * (gx[k] + 1.0);
          acc += 0.5 * w * gw[k] * window_profile(s) *
                 std::cyl_bessel_j(0.0, 2.0 * M_PI * r * s) * s;
        }
      }
      prof[i] = 2.0 * M_PI * acc;
    });
    sys->peak_ = prof[0];
    double sum = 0.0, abs_sum = 0.0;
    for (int i = 0; i < count; ++i) {
      const double wt = (i == 0 || i == count - 1) ? 0.5 : 1.0;
      sum += wt * prof[i] * (i * dr);
      abs_sum += wt * std::fabs(prof[i]) * (i * dr);
    }
    sys->integral_ = 2.0 * M_PI * sum * dr;
    sys->l1_ = 2.0 * M_PI * abs_sum * dr;
  }

  // Hermite slopes for the radial interpolant
  const std::size_t np = sys->prof_.size();
  sys->slope_.assign(np, 0.0);
  if (np >= 3) {
    sys->slope_[0] = 0.0;  // even function: phi'(0) = 0
    for (std::size_t i = 1; i + 1 < np; ++i)
      sys->slope_[i] = 0.5 * (sys->prof_[i + 1] - sys->prof_[i - 1]);
    sys->slope_[np - 1] = sys->prof_[np - 1] - sys->prof_[np - 2];
  }

  // sanity on the sampled window: within [0,2] q must not increase
  double prev = window_profile(0.0);
  for (int i = 1; i <= 512; ++i) {
    const double cur = window_profile(i * (2.5 / 512.0));
    if (cur > prev + 1e-15)
      throw std::runtime_error("MollifierSystem: window profile not monotone");
    prev = cur;
  }
  return sys;
}

double MollifierSystem::scale(int j) const {
  if (j < -1) throw std::invalid_argument("scale: level must be >= -1");
  return rho1_(std::pow(2.0, j));
}

double MollifierSystem::profile_at(double r) const {
  r = std::fabs(r);
  if (r >= r_cut_) return 0.0;
  const double u = r / dr_;
  const std::size_t i = static_cast<std::size_t>(u);
  if (i + 1 >= prof_.size()) return 0.0;
  const double s = u - static_cast<double>(i);
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * prof_[i] + (s3 - 2 * s2 + s) * slope_[i] +
         (-2 * s3 + 3 * s2) * prof_[i + 1] + (s3 - s2) * slope_[i + 1];
}

double MollifierSystem::phi(double r) const { return profile_at(r); }

double MollifierSystem::phi_family(int j, double r) const {
  const double s = scale(j);
  const double ratio = c1_ / s;
  const double pref = dim_ == 1 ? ratio : ratio * ratio;
  return pref * profile_at(ratio * r);
}

double MollifierSystem::partition_term(int j, double r) const {
  if (j < 0) throw std::invalid_argument("partition_term: level must be >= 0");
  r = std::fabs(r);
  if (j == 0) return window_profile(r);
  const double p2j = std::pow(2.0, j);
  return window_profile(r / p2j) - window_profile(2.0 * r / p2j);
}

double MollifierSystem::hat_phi_j(int j, double r) const {
  return window_profile(scale(j) * std::fabs(r) / c1_);
}

double MollifierSystem::tail_radius(double rel_thr) const {
  if (rel_thr <= 0.0) return r_cut_;
  const double thr = rel_thr * std::fabs(peak_);
  for (std::size_t i = prof_.size(); i-- > 0;)
    if (std::fabs(prof_[i]) > thr) return (i + 1) * dr_;
  return 0.0;
}

MollifierSystem::EnvelopeFit MollifierSystem::envelope_fit(double lo,
                                                           double hi) const {
  const std::size_t i0 = static_cast<std::size_t>(std::ceil(lo / dr_));
  const std::size_t i1 =
      std::min(prof_.size() - 1, static_cast<std::size_t>(hi / dr_));
  const auto peaks = peak_indices(prof_, i0, i1);
  if (peaks.size() < 4)
    throw std::runtime_error("envelope_fit: too few peaks in window");
  std::vector<double> xs, ys;
  for (auto i : peaks) {
    xs.push_back(std::log1p(i * dr_));
    ys.push_back(std::log(std::fabs(prof_[i])));
  }
  EnvelopeFit fit;
  fit_line(xs, ys, &fit.slope, &fit.intercept);
  fit.points = static_cast<int>(xs.size());
  return fit;
}

double MollifierSystem::RadialProfile::partial_integral(double T) const {
  if (t.size() < 2) return 0.0;
  const double dt = t[1] - t[0];
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t.size() && t[i + 1] <= T + 1e-12; ++i)
    acc += 0.5 * dt * (std::fabs(dp[i]) + std::fabs(dp[i + 1]));
  return acc;
}

MollifierSystem::RadialProfile MollifierSystem::radial_profile_decay() const {
  if (dim_ != 1)
    throw std::runtime_error("radial_profile_decay: profile defined for d=1");
  // p = transform of |phi|, computed on the same grid phi came from
  const GridSpec gs{1, build_extent_, build_samples_};
  const GridSpec phig = gs.dual();
  GridFunction g(phig);
  const int half = phig.samples / 2;
  for (int m = 0; m < phig.samples; ++m) {
    const int i = std::abs(m - half);
    g[m] =
        i < static_cast<int>(prof_.size()) ? std::fabs(prof_[i]) : 0.0;
  }
  GridFunction ph = forward_transform(g);
  const GridSpec ps = ph.spec();
  const double dt = ps.spacing();
  const int keep = std::min(ps.samples / 2,
                            static_cast<int>(std::lround(130.0 / dt)));

  RadialProfile rp;
  rp.t.resize(keep);
  rp.p.resize(keep);
  for (int k = 0; k < keep; ++k) {
    rp.t[k] = k * dt;
    rp.p[k] = ph[ps.samples / 2 + k].real();
  }
  rp.p0 = rp.p[0];
  rp.dp.assign(keep, 0.0);
  for (int k = 1; k + 1 < keep; ++k)
    rp.dp[k] = (rp.p[k + 1] - rp.p[k - 1]) / (2.0 * dt);
  rp.dp[0] = 0.0;  // p even
  if (keep >= 2) rp.dp[keep - 1] = (rp.p[keep - 1] - rp.p[keep - 2]) / dt;

  // decay exponent from the peaks of |p'| on [4, 64]
  double lo = 4.0, hi = 64.0;
  for (;;) {
    const auto peaks =
        peak_indices(rp.dp, static_cast<std::size_t>(std::ceil(lo / dt)),
                     static_cast<std::size_t>(hi / dt));
    std::vector<double> xs, ys;
    for (auto i : peaks) {
      if (std::fabs(rp.dp[i]) < 1e-13 * std::fabs(rp.p0)) continue;
      xs.push_back(std::log(i * dt));
      ys.push_back(std::log(std::fabs(rp.dp[i])));
    }
    if (xs.size() >= 4) {
      fit_line(xs, ys, &rp.dp_fit.slope, &rp.dp_fit.intercept);
      rp.dp_fit.points = static_cast<int>(xs.size());
      break;
    }
    hi *= 0.5;  // noise floor reached: shrink the window
    if (hi <= 2.0 * lo)
      throw std::runtime_error(
          "radial_profile_decay: derivative noise floor reached before a "
          "usable fit window was found");
  }
  return rp;
}

void MollifierSystem::write_profile_csv(const std::string& path) const {
  CsvTable t({"r", "phi"});
  for (std::size_t i = 0; i < prof_.size(); ++i)
    t.add_row({fmt_double(i * dr_), fmt_double(prof_[i])});
  t.write(path);
}

}  // namespace thinlab
