#include "thinlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "thinlab/util.hpp"

namespace thinlab {

namespace {

void validate_spec(const GridSpec& s) {
  if (s.dim != 1 && s.dim != 2) throw std::invalid_argument("GridSpec: dim must be 1 or 2");
  if (!(s.extent > 0.0)) throw std::invalid_argument("GridSpec: extent must be positive");
  const int n = s.samples;
  if (n < 4 || (n & (n - 1)) != 0)
    throw std::invalid_argument("GridSpec: samples must be a power of two >= 4");
}

// FFTW plans are cached per (dim, N, sign); execution uses the new-array
// interface so concurrent transforms of distinct buffers are safe.
class PlanCache {
 public:
  static fftw_plan get(int dim, int n, int sign) {
    static PlanCache cache;
    std::lock_guard<std::mutex> lk(cache.mu_);
    const Key key{dim, n, sign};
    auto it = cache.plans_.find(key);
    if (it != cache.plans_.end()) return it->second;
    const std::size_t total = dim == 1 ? n : static_cast<std::size_t>(n) * n;
    fftw_complex* buf = fftw_alloc_complex(total);
    // FFTW_UNALIGNED: plans must accept whatever alignment std::vector gives
    // the buffers they are later executed on.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = dim == 1 ? fftw_plan_dft_1d(n, buf, buf, sign, flags)
                           : fftw_plan_dft_2d(n, n, buf, buf, sign, flags);
    fftw_free(buf);
    cache.plans_.emplace(key, p);
    return p;
  }

 private:
  using Key = std::tuple<int, int, int>;
  std::mutex mu_;
  std::map<Key, fftw_plan> plans_;
};

// Shared core: out_k = scale * (-1)^{Σk} DFT_sign[(-1)^{Σm} in_m]_k.
// With x_m = (m - N/2) h and y_k = (k - N/2) / R, the (-1)^m / (-1)^k factors
// absorb the half-extent offsets; the leftover global phase e^{∓iπN²/... } is
// exactly 1 because N ≡ 0 (mod 4).
GridFunction phase_dft(const GridFunction& f, int sign, const GridSpec& out_spec, double scale) {
  const int n = f.samples();
  const int d = f.dim();
  GridFunction out(out_spec);
  std::vector<std::complex<double>> buf(f.size());
  if (d == 1) {
    for (int m = 0; m < n; ++m) buf[m] = (m & 1) ? -f[m] : f[m];
  } else {
    for (int m1 = 0; m1 < n; ++m1)
      for (int m2 = 0; m2 < n; ++m2) {
        const std::size_t id = static_cast<std::size_t>(m1) * n + m2;
        buf[id] = ((m1 + m2) & 1) ? -f[id] : f[id];
      }
  }
  fftw_plan p = PlanCache::get(d, n, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf.data()),
                   reinterpret_cast<fftw_complex*>(buf.data()));
  if (d == 1) {
    for (int k = 0; k < n; ++k) out[k] = ((k & 1) ? -buf[k] : buf[k]) * scale;
  } else {
    for (int k1 = 0; k1 < n; ++k1)
      for (int k2 = 0; k2 < n; ++k2) {
        const std::size_t id = static_cast<std::size_t>(k1) * n + k2;
        out[id] = (((k1 + k2) & 1) ? -buf[id] : buf[id]) * scale;
      }
  }
  return out;
}

}  // namespace

GridFunction::GridFunction(GridSpec spec) : spec_(spec) {
  validate_spec(spec_);
  const std::size_t total =
      spec_.dim == 1 ? spec_.samples : static_cast<std::size_t>(spec_.samples) * spec_.samples;
  v_.assign(total, {0.0, 0.0});
}

GridFunction GridFunction::sample(const GridSpec& spec,
                                  const std::function<std::complex<double>(Point)>& f) {
  GridFunction g(spec);
  const int n = spec.samples;
  if (spec.dim == 1) {
    for (int m = 0; m < n; ++m) g[m] = f({g.coord(m), 0.0});
  } else {
    for (int m1 = 0; m1 < n; ++m1)
      for (int m2 = 0; m2 < n; ++m2)
        g[static_cast<std::size_t>(m1) * n + m2] = f({g.coord(m1), g.coord(m2)});
  }
  return g;
}

Point GridFunction::point(std::size_t flat) const {
  if (spec_.dim == 1) return {coord(static_cast<int>(flat)), 0.0};
  const int n = spec_.samples;
  return {coord(static_cast<int>(flat / n)), coord(static_cast<int>(flat % n))};
}

void GridFunction::write_csv(std::ostream& os) const {
  os << (spec_.dim == 1 ? "x,re,im\n" : "x,y,re,im\n");
  for (std::size_t i = 0; i < v_.size(); ++i) {
    const Point p = point(i);
    os << fmt_double(p[0]) << ',';
    if (spec_.dim == 2) os << fmt_double(p[1]) << ',';
    os << fmt_double(v_[i].real()) << ',' << fmt_double(v_[i].imag()) << '\n';
  }
}

GridFunction forward_transform(const GridFunction& f) {
  const double h = f.spacing();
  const double scale = f.dim() == 1 ? h : h * h;
  return phase_dft(f, FFTW_FORWARD, f.spec().dual(), scale);
}

GridFunction inverse_transform(const GridFunction& g) {
  // dual of the dual grid has extent N / (N/R) = R: the original grid
  const GridSpec primal = g.spec().dual();
  const double dxi = g.spacing();  // quadrature weight on the incoming grid
  const double scale = g.dim() == 1 ? dxi : dxi * dxi;
  return phase_dft(g, FFTW_BACKWARD, primal, scale);
}

double energy(const GridFunction& f) {
  const double h = f.spacing();
  const double w = f.dim() == 1 ? h : h * h;
  double acc = 0.0;
  for (const auto& v : f.data()) acc += std::norm(v);
  return acc * w;
}

EnergyReport energy_split(const GridFunction& f, const MeasurableSet& A) {
  if (A.dim() != f.dim()) throw std::invalid_argument("energy_split: dimension mismatch");
  if (!A.empty_set()) {
    const Point lo = A.bounding_lo(), hi = A.bounding_hi();
    const double half = 0.5 * f.extent();
    const double tol = 1e-9 * f.extent();
    for (int a = 0; a < f.dim(); ++a) {
      if (lo[a] < -half - tol || hi[a] > half + tol)
        throw std::invalid_argument(
            "energy_split: set exceeds the grid domain [-" + fmt_double(half) + "," + fmt_double(half) +
            ") on axis " + std::to_string(a) + " (set spans [" + fmt_double(lo[a]) + "," +
            fmt_double(hi[a]) + "])");
    }
  }
  const double h = f.spacing();
  const double w = f.dim() == 1 ? h : h * h;
  double on = 0.0, total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double e = std::norm(f[i]);
    total += e;
    if (A.contains(f.point(i))) on += e;
  }
  EnergyReport rep;
  rep.total = total * w;
  rep.on_set = on * w;
  rep.off_set = rep.total - rep.on_set;
  return rep;
}

double uncertainty_defect(const GridFunction& f, const MeasurableSet& E, const MeasurableSet& Sigma) {
  const double num = energy(f);
  if (!(num > 0.0)) throw std::invalid_argument("uncertainty_defect: zero function rejected");
  const GridFunction fh = forward_transform(f);
  const double off_e = energy_split(f, E).off_set;
  const double off_s = energy_split(fh, Sigma).off_set;
  const double denom = off_e + off_s;
  if (denom <= num * 1e-300) return std::numeric_limits<double>::infinity();
  return num / denom;
}

}  // namespace thinlab
