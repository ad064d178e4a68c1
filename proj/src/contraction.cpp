#include "thinlab/contraction.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "thinlab/corpus.hpp"
#include "thinlab/util.hpp"

namespace thinlab {

namespace {

using cd = std::complex<double>;

// 1-D plans for the offset transform, cached with the same new-array idiom as
// the aligned transforms; twiddle phases e^{2 pi i c m / N}, c = (N-1)/2, are
// cached alongside since every call needs them.
struct OffsetPlan {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::vector<cd> twiddle;
  cd quad = {1.0, 0.0};  // e^{-2 pi i c^2 / N}
};

const OffsetPlan& offset_plan(int n) {
  static std::mutex mu;
  static std::map<int, OffsetPlan> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  OffsetPlan p;
  fftw_complex* buf = fftw_alloc_complex(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags);
  p.bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
  const double c = 0.5 * (n - 1);
  p.twiddle.resize(n);
  for (int m = 0; m < n; ++m) p.twiddle[m] = std::polar(1.0, 2.0 * M_PI * c * m / n);
  p.quad = std::polar(1.0, -2.0 * M_PI * c * c / n);
  return cache.emplace(n, std::move(p)).first->second;
}

}  // namespace

AtomicMeasure AtomicMeasure::bernoulli() { return from_atoms({{0.0, 0.5}, {1.0, 0.5}}); }

AtomicMeasure AtomicMeasure::from_atoms(std::vector<Atom> atoms) {
  AtomicMeasure mu{std::move(atoms)};
  mu.validate();
  return mu;
}

AtomicMeasure AtomicMeasure::parse(const std::string& text) {
  if (text == "bernoulli") return bernoulli();
  const std::string prefix = "atoms:";
  if (text.rfind(prefix, 0) != 0)
    throw std::invalid_argument("AtomicMeasure: expected 'bernoulli' or 'atoms:x:w,...', got '" +
                                text + "'");
  std::vector<Atom> atoms;
  std::stringstream ss(text.substr(prefix.size()));
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("AtomicMeasure: atom '" + item + "' is not x:w");
    atoms.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
  }
  return from_atoms(std::move(atoms));
}

void AtomicMeasure::validate() const {
  if (atoms.size() < 2) throw std::invalid_argument("AtomicMeasure: need at least two atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.w > 0.0)) throw std::invalid_argument("AtomicMeasure: weights must be positive");
    total += a.w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("AtomicMeasure: weights sum to " + fmt_double(total) +
                                ", expected 1");
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if (atoms[i].x == atoms[j].x)
        throw std::invalid_argument("AtomicMeasure: duplicate atom location " +
                                    fmt_double(atoms[i].x));
}

std::string AtomicMeasure::describe() const {
  std::string s = "atoms:";
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) s += ",";
    s += fmt_double(atoms[i].x) + ":" + fmt_double(atoms[i].w);
  }
  return s;
}

std::complex<double> char_function(const AtomicMeasure& mu, double xi) {
  cd acc = 0.0;
  for (const auto& a : mu.atoms) acc += a.w * std::polar(1.0, -2.0 * M_PI * xi * a.x);
  return acc;
}

namespace {

// intervals of {g > level} on [lo, hi] by uniform scan plus bisection of each
// sign change of g - level
std::vector<Interval> scan_level_set(const std::function<double(double)>& g, double lo, double hi,
                                     double level, int samples) {
  auto cross = [&](double a, double b) {
    // g(a) and g(b) straddle level; refine the crossing
    for (int it = 0; it < 64; ++it) {
      double mid = 0.5 * (a + b);
      if (!(mid > a && mid < b)) break;
      ((g(mid) > level) == (g(a) > level) ? a : b) = mid;
    }
    return 0.5 * (a + b);
  };
  std::vector<Interval> out;
  double step = (hi - lo) / samples;
  double prev_x = lo;
  bool prev_in = g(lo) > level;
  double open = prev_in ? lo : 0.0;
  for (int i = 1; i <= samples; ++i) {
    double x = lo + step * i;
    bool in = g(x) > level;
    if (in != prev_in) {
      double b = cross(prev_x, x);
      if (prev_in)
        out.push_back({open, b});
      else
        open = b;
    }
    prev_x = x;
    prev_in = in;
  }
  if (prev_in) out.push_back({open, hi});
  return out;
}

}  // namespace

double level_set_density(const AtomicMeasure& mu, double delta, int window_count,
                         int samples_per_window) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("level_set_density: delta must lie in (0,1)");
  if (window_count < 1 || samples_per_window < 16)
    throw std::invalid_argument("level_set_density: degenerate probe parameters");
  const double level = 1.0 - delta;
  auto g = [&](double xi) { return std::abs(char_function(mu, xi)); };
  double worst = 0.0;
  for (int j = 0; j < window_count; ++j) {
    double measure = 0.0;
    for (const auto& iv :
         scan_level_set(g, static_cast<double>(j), j + 1.0, level, samples_per_window))
      measure += iv.length();
    worst = std::max(worst, measure);
  }
  return worst;
}

SymbolPair::SymbolPair(AtomicMeasure m1, AtomicMeasure m2, double p_, double delta_, int dim_,
                       std::vector<double> a, std::vector<double> b)
    : dim(dim_),
      p(p_),
      p_conj(p_ / (p_ - 1.0)),
      mu1(std::move(m1)),
      mu2(std::move(m2)),
      delta(delta_),
      a_coeff(std::move(a)),
      b_coeff(std::move(b)),
      rho1(RadiusFunction::power_law(p_ - 1.0)),
      rho2(RadiusFunction::power_law(p_ / (p_ - 1.0) - 1.0)) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("SymbolPair: dim must be 1 or 2");
  if (!(p > 1.0)) throw std::invalid_argument("SymbolPair: p must exceed 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("SymbolPair: delta must lie in (0,1)");
  mu1.validate();
  mu2.validate();
  if (a_coeff.empty()) a_coeff.assign(dim, 1.0);
  if (b_coeff.empty()) b_coeff.assign(dim, 1.0);
  if (static_cast<int>(a_coeff.size()) != dim || static_cast<int>(b_coeff.size()) != dim)
    throw std::invalid_argument("SymbolPair: axis coefficient count must match dim");
  for (double v : a_coeff)
    if (v == 0.0) throw std::invalid_argument("SymbolPair: Q1 coefficients must be non-zero");
  for (double v : b_coeff)
    if (v == 0.0) throw std::invalid_argument("SymbolPair: Q2 coefficients must be non-zero");
}

double SymbolPair::Q1(const Point& x) const {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc += a_coeff[i] * std::pow(std::abs(x[i]), p);
  return acc;
}

double SymbolPair::Q2(const Point& x) const {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc += b_coeff[i] * std::pow(std::abs(x[i]), p_conj);
  return acc;
}

double SymbolPair::G(const Point& x) const { return std::abs(char_function(mu1, Q1(x))); }

double SymbolPair::H(const Point& x) const { return std::abs(char_function(mu2, Q2(x))); }

MeasurableSet symbol_level_set(const AtomicMeasure& mu, double delta, double coeff, double expo,
                               double domain) {
  if (!(coeff > 0.0) || !(expo > 0.0) || !(domain > 0.0))
    throw std::invalid_argument("symbol_level_set: need positive coefficient, exponent, domain");
  const double level = 1.0 - delta;
  const double xi_hi = coeff * std::pow(domain, expo);
  auto g = [&](double xi) { return std::abs(char_function(mu, xi)); };
  // scan in Q-space (uniform features), pull boundaries back through the
  // monotone map xi = coeff * x^expo
  int samples = static_cast<int>(std::min(3.0e7, std::max(4096.0, 1024.0 * std::ceil(xi_hi))));
  std::vector<Interval> pos;
  for (const auto& iv : scan_level_set(g, 0.0, xi_hi, level, samples))
    pos.push_back(
        {std::pow(iv.lo / coeff, 1.0 / expo), std::pow(iv.hi / coeff, 1.0 / expo)});
  std::vector<Interval> all;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
    if (it->lo <= 0.0) continue;  // mirror of an origin-straddling interval merges below
    all.push_back({-it->hi, -it->lo});
  }
  for (const auto& iv : pos) {
    if (iv.lo <= 0.0)
      all.push_back({-iv.hi, iv.hi});
    else
      all.push_back(iv);
  }
  return MeasurableSet::intervals(std::move(all));
}

PullbackReport pullback_thinness(const SymbolPair& sym, double eps_target, double domain) {
  if (sym.dim != 1)
    throw std::invalid_argument("pullback_thinness: certification is materialized for d=1");
  if (!(eps_target > 0.0)) throw std::invalid_argument("pullback_thinness: eps_target must be > 0");
  PullbackReport rep;
  rep.delta = sym.delta;
  rep.eps_target = eps_target;
  rep.density1 = level_set_density(sym.mu1, sym.delta);
  rep.density2 = level_set_density(sym.mu2, sym.delta);
  if (rep.density1 > eps_target || rep.density2 > eps_target)
    rep.note += "level density exceeds eps_target; expect certification to fail; ";
  rep.E = symbol_level_set(sym.mu1, sym.delta, sym.a_coeff[0], sym.p, domain);
  rep.Sigma = symbol_level_set(sym.mu2, sym.delta, sym.b_coeff[0], sym.p_conj, domain);
  CenterSpec centers{{-domain, 0.0}, {domain, 0.0}, 0.0, {}};
  rep.cert_E = certify_thinness(rep.E, sym.rho1, centers);
  rep.cert_Sigma = certify_thinness(rep.Sigma, sym.rho2, centers);
  auto grad_ratio = [&](double expo) {
    // |Q'|(x) = const * x^{expo-1}; ratio across D(x, rho(|x|)) with
    // rho = min(x^{-(expo-1)}, 1)
    double worst = 0.0;
    for (double x : log_spaced(2.0, std::max(2.5, domain), 200)) {
      double r = std::min(std::pow(x, -(expo - 1.0)), 1.0);
      if (r >= x) continue;
      double ratio = std::pow((x + r) / (x - r), expo - 1.0);
      worst = std::max(worst, ratio);
    }
    return worst;
  };
  rep.grad_ratio_E = grad_ratio(sym.p);
  rep.grad_ratio_Sigma = grad_ratio(sym.p_conj);
  rep.pass = rep.cert_E.epsilon_measured <= eps_target * (1.0 + 1e-9) &&
             rep.cert_Sigma.epsilon_measured <= eps_target * (1.0 + 1e-9);
  if (!rep.pass)
    rep.note += "worst centers: E at " + fmt_double(rep.cert_E.worst_center[0]) + ", Sigma at " +
                fmt_double(rep.cert_Sigma.worst_center[0]) + "; ";
  return rep;
}

OffsetGrid::OffsetGrid(GridSpec spec) : spec_(spec), shift_(0.5 * (spec.samples - 1)) {
  if (spec_.dim != 1) throw std::invalid_argument("OffsetGrid: d=1 only");
  const int n = spec_.samples;
  if (n < 4 || (n & (n - 1)) != 0)
    throw std::invalid_argument("OffsetGrid: samples must be a power of two >= 4");
  if (!(spec_.extent > 0.0)) throw std::invalid_argument("OffsetGrid: extent must be positive");
}

std::vector<cd> OffsetGrid::forward(std::vector<cd> f) const {
  const int n = spec_.samples;
  if (static_cast<int>(f.size()) != n)
    throw std::invalid_argument("OffsetGrid::forward: size mismatch");
  const OffsetPlan& plan = offset_plan(n);
  for (int m = 0; m < n; ++m) f[m] *= plan.twiddle[m];
  fftw_execute_dft(plan.fwd, reinterpret_cast<fftw_complex*>(f.data()),
                   reinterpret_cast<fftw_complex*>(f.data()));
  const cd base = spec_.spacing() * plan.quad;
  for (int k = 0; k < n; ++k) f[k] *= base * plan.twiddle[k];
  return f;
}

std::vector<cd> OffsetGrid::inverse(std::vector<cd> g) const {
  const int n = spec_.samples;
  if (static_cast<int>(g.size()) != n)
    throw std::invalid_argument("OffsetGrid::inverse: size mismatch");
  const OffsetPlan& plan = offset_plan(n);
  for (int k = 0; k < n; ++k) g[k] *= std::conj(plan.twiddle[k]);
  fftw_execute_dft(plan.bwd, reinterpret_cast<fftw_complex*>(g.data()),
                   reinterpret_cast<fftw_complex*>(g.data()));
  const cd base = std::conj(plan.quad) / (spec_.spacing() * spec_.samples);
  for (int m = 0; m < n; ++m) g[m] *= base * std::conj(plan.twiddle[m]);
  return g;
}

ContractionReport composition_norm_symbols(const std::function<double(double)>& G,
                                           const std::function<double(double)>& H,
                                           const GridSpec& grid, int max_iter, double tol,
                                           std::uint64_t seed) {
  OffsetGrid og(grid);
  const int n = grid.samples;
  std::vector<double> gv(n), h2(n);
  for (int m = 0; m < n; ++m) gv[m] = G(og.coord(m));
  for (int k = 0; k < n; ++k) {
    double h = H(og.dual_coord(k));
    h2[k] = h * h;
  }
  for (double v : gv)
    if (!(std::abs(v) <= 1.0 + 1e-12))
      throw std::invalid_argument("composition_norm: |G| must be bounded by 1");
  for (double v : h2)
    if (!(v <= 1.0 + 1e-12))
      throw std::invalid_argument("composition_norm: |H| must be bounded by 1");

  // B = (T_H T_G)^* (T_H T_G) = M_G F^{-1} M_{H^2} F M_G; two transforms per
  // application since the middle pair F F^{-1} cancels
  auto apply = [&](std::vector<cd> v) {
    for (int m = 0; m < n; ++m) v[m] *= gv[m];
    v = og.forward(std::move(v));
    for (int k = 0; k < n; ++k) v[k] *= h2[k];
    v = og.inverse(std::move(v));
    for (int m = 0; m < n; ++m) v[m] *= gv[m];
    return v;
  };

  ContractionReport rep;
  Rng rng(seed);
  std::vector<cd> v(n);
  for (auto& z : v) z = rng.cnormal();
  double nv = 0.0;
  for (const auto& z : v) nv += std::norm(z);
  nv = std::sqrt(nv);
  for (auto& z : v) z /= nv;

  double lambda = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    rep.iterations = it;
    std::vector<cd> w = apply(v);
    double ray = 0.0, nw = 0.0;
    for (int i = 0; i < n; ++i) {
      ray += (std::conj(v[i]) * w[i]).real();
      nw += std::norm(w[i]);
    }
    nw = std::sqrt(nw);
    rep.rayleigh.push_back(std::max(0.0, ray));
    if (nw <= 1e-300) {  // G or H annihilates everything reachable
      lambda = 0.0;
      rep.converged = true;
      break;
    }
    for (auto& z : w) z /= nw;
    v = std::move(w);
    double cur = rep.rayleigh.back();
    if (it > 1) {
      double prev = rep.rayleigh[rep.rayleigh.size() - 2];
      if (std::abs(cur - prev) <= tol * std::max(cur, 1e-300)) {
        lambda = cur;
        rep.converged = true;
        break;
      }
    }
    lambda = cur;
  }
  rep.beta = std::sqrt(std::max(0.0, lambda));
  if (rep.converged) {
    rep.beta_lo = rep.beta_hi = rep.beta;
  } else {
    // Rayleigh quotients approach the top eigenvalue from below; the symbol
    // bounds cap the norm at 1
    rep.beta_lo = rep.beta;
    rep.beta_hi = 1.0;
    rep.note += "power iteration hit the cap; reporting Rayleigh bracket; ";
  }
  return rep;
}

ContractionReport composition_norm(const SymbolPair& sym, const GridSpec& grid, int max_iter,
                                   double tol, std::uint64_t seed) {
  if (sym.dim != 1) throw std::invalid_argument("composition_norm: d=1 grids only");
  ContractionReport rep = composition_norm_symbols([&](double x) { return sym.G1(x); },
                                                   [&](double y) { return sym.H1(y); }, grid,
                                                   max_iter, tol, seed);
  const double primal_half = 0.5 * grid.extent;
  const double dual_half = 0.5 * grid.dual_extent();
  MeasurableSet E = symbol_level_set(sym.mu1, sym.delta, sym.a_coeff[0], sym.p, primal_half);
  MeasurableSet Sigma = symbol_level_set(sym.mu2, sym.delta, sym.b_coeff[0], sym.p_conj, dual_half);
  CenterSpec pc{{-primal_half, 0.0}, {primal_half, 0.0}, 0.0, {}};
  CenterSpec dc{{-dual_half, 0.0}, {dual_half, 0.0}, 0.0, {}};
  rep.eps_E = certify_thinness(E, sym.rho1, pc).epsilon_measured;
  rep.eps_Sigma = certify_thinness(Sigma, sym.rho2, dc).epsilon_measured;
  std::vector<GridFunction> corpus = make_corpus(grid, 32, seed);
  std::vector<double> defects(corpus.size(), 0.0);
  parallel_for(corpus.size(),
               [&](std::size_t i) { defects[i] = uncertainty_defect(corpus[i], E, Sigma); });
  rep.c_emp = 1.0;
  for (double d : defects) rep.c_emp = std::max(rep.c_emp, d);
  const double gap = 1.0 - (1.0 - sym.delta) * (1.0 - sym.delta);
  rep.bound_chain_value = 1.0 - gap / rep.c_emp;
  return rep;
}

}  // namespace thinlab
