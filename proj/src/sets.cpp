#include "thinlab/sets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "thinlab/quad.hpp"
#include "thinlab/util.hpp"

namespace thinlab {

namespace {
double norm2(const Point& x) { return std::hypot(x[0], x[1]); }
double overlap_len(double alo, double ahi, double blo, double bhi) {
  const double lo = std::max(alo, blo), hi = std::min(ahi, bhi);
  return hi > lo ? hi - lo : 0.0;
}
}  // namespace

MeasurableSet MeasurableSet::empty(int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("MeasurableSet: dim must be 1 or 2");
  MeasurableSet s;
  s.dim_ = dim;
  return s;
}

MeasurableSet MeasurableSet::intervals(std::vector<Interval> iv) {
  for (const auto& i : iv) {
    if (!(std::isfinite(i.lo) && std::isfinite(i.hi)) || !(i.hi > i.lo))
      throw std::invalid_argument("MeasurableSet: intervals must be finite with hi > lo");
  }
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < iv.size(); ++i) {
    if (iv[i].lo < iv[i - 1].hi)
      throw std::invalid_argument("MeasurableSet: overlapping intervals rejected at lo=" + fmt_double(iv[i].lo));
  }
  MeasurableSet s;
  s.dim_ = 1;
  s.iv_ = std::move(iv);
  return s;
}

MeasurableSet MeasurableSet::boxes(std::vector<Box> bx) {
  for (const auto& b : bx) {
    for (int a = 0; a < 2; ++a) {
      if (!(std::isfinite(b.lo[a]) && std::isfinite(b.hi[a])) || !(b.hi[a] > b.lo[a]))
        throw std::invalid_argument("MeasurableSet: boxes must be finite with hi > lo per axis");
    }
  }
  std::sort(bx.begin(), bx.end(), [](const Box& a, const Box& b) {
    return a.lo[0] != b.lo[0] ? a.lo[0] < b.lo[0] : a.lo[1] < b.lo[1];
  });
  for (std::size_t i = 0; i < bx.size(); ++i)
    for (std::size_t j = i + 1; j < bx.size(); ++j) {
      const bool apart = bx[i].hi[0] <= bx[j].lo[0] || bx[j].hi[0] <= bx[i].lo[0] ||
                         bx[i].hi[1] <= bx[j].lo[1] || bx[j].hi[1] <= bx[i].lo[1];
      if (!apart) throw std::invalid_argument("MeasurableSet: overlapping boxes rejected");
    }
  MeasurableSet s;
  s.dim_ = 2;
  s.bx_ = std::move(bx);
  return s;
}

MeasurableSet MeasurableSet::grid_mask(int dim, Point origin, double cell, std::array<int, 2> shape,
                                       std::vector<std::uint8_t> mask) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid_mask: dim must be 1 or 2");
  if (!(cell > 0.0)) throw std::invalid_argument("grid_mask: cell spacing must be positive");
  const std::size_t want = static_cast<std::size_t>(shape[0]) * (dim == 2 ? shape[1] : 1);
  if (shape[0] < 1 || (dim == 2 && shape[1] < 1) || mask.size() != want)
    throw std::invalid_argument("grid_mask: shape/mask size mismatch");
  MeasurableSet s;
  s.dim_ = dim;
  s.is_mask_ = true;
  s.origin_ = origin;
  s.cell_ = cell;
  s.shape_ = {shape[0], dim == 2 ? shape[1] : 1};
  s.mask_ = std::move(mask);
  return s;
}

double MeasurableSet::measure() const {
  if (is_mask_) {
    std::size_t on = 0;
    for (auto v : mask_) on += v ? 1 : 0;
    return static_cast<double>(on) * (dim_ == 1 ? cell_ : cell_ * cell_);
  }
  double m = 0.0;
  if (dim_ == 1)
    for (const auto& i : iv_) m += i.length();
  else
    for (const auto& b : bx_) m += b.area();
  return m;
}

bool MeasurableSet::empty_set() const {
  if (!is_mask_) return dim_ == 1 ? iv_.empty() : bx_.empty();
  for (auto v : mask_)
    if (v) return false;
  return true;
}

const std::vector<Interval>& MeasurableSet::interval_list() const {
  if (dim_ != 1 || is_mask_) throw std::logic_error("interval_list: not an interval set");
  return iv_;
}

const std::vector<Box>& MeasurableSet::box_list() const {
  if (dim_ != 2 || is_mask_) throw std::logic_error("box_list: not a box set");
  return bx_;
}

Point MeasurableSet::bounding_lo() const {
  Point lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  if (is_mask_) return origin_;
  if (dim_ == 1) {
    for (const auto& i : iv_) lo[0] = std::min(lo[0], i.lo);
    lo[1] = 0.0;
  } else {
    for (const auto& b : bx_) {
      lo[0] = std::min(lo[0], b.lo[0]);
      lo[1] = std::min(lo[1], b.lo[1]);
    }
  }
  return lo;
}

Point MeasurableSet::bounding_hi() const {
  Point hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  if (is_mask_) {
    return {origin_[0] + cell_ * shape_[0], dim_ == 2 ? origin_[1] + cell_ * shape_[1] : 0.0};
  }
  if (dim_ == 1) {
    for (const auto& i : iv_) hi[0] = std::max(hi[0], i.hi);
    hi[1] = 0.0;
  } else {
    for (const auto& b : bx_) {
      hi[0] = std::max(hi[0], b.hi[0]);
      hi[1] = std::max(hi[1], b.hi[1]);
    }
  }
  return hi;
}

bool MeasurableSet::contains(const Point& x) const {
  if (is_mask_) {
    const long long i = static_cast<long long>(std::floor((x[0] - origin_[0]) / cell_));
    if (i < 0 || i >= shape_[0]) return false;
    long long j = 0;
    if (dim_ == 2) {
      j = static_cast<long long>(std::floor((x[1] - origin_[1]) / cell_));
      if (j < 0 || j >= shape_[1]) return false;
    }
    return mask_[static_cast<std::size_t>(i) * shape_[1] + j] != 0;
  }
  if (dim_ == 1) {
    auto it = std::upper_bound(iv_.begin(), iv_.end(), x[0],
                               [](double v, const Interval& i) { return v < i.lo; });
    if (it == iv_.begin()) return false;
    --it;
    return x[0] >= it->lo && x[0] < it->hi;
  }
  for (const auto& b : bx_)
    if (x[0] >= b.lo[0] && x[0] < b.hi[0] && x[1] >= b.lo[1] && x[1] < b.hi[1]) return true;
  return false;
}

MeasurableSet MeasurableSet::to_mask(double cell) const {
  if (!(cell > 0.0)) throw std::invalid_argument("to_mask: cell must be positive");
  const Point lo = bounding_lo(), hi = bounding_hi();
  if (empty_set()) return grid_mask(dim_, {0.0, 0.0}, cell, {1, 1}, std::vector<std::uint8_t>(1, 0));
  const int nx = static_cast<int>(std::ceil((hi[0] - lo[0]) / cell)) + 1;
  const int ny = dim_ == 2 ? static_cast<int>(std::ceil((hi[1] - lo[1]) / cell)) + 1 : 1;
  std::vector<std::uint8_t> m(static_cast<std::size_t>(nx) * ny, 0);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const Point c{lo[0] + (i + 0.5) * cell, dim_ == 2 ? lo[1] + (j + 0.5) * cell : 0.0};
      m[static_cast<std::size_t>(i) * ny + j] = contains(c) ? 1 : 0;
    }
  return grid_mask(dim_, lo, cell, {nx, ny}, std::move(m));
}

MeasurableSet MeasurableSet::read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open set file: " + path);
  std::vector<Interval> iv;
  std::vector<Box> bx;
  std::string line;
  int cols = 0;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::vector<double> vals;
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (...) {
        throw std::runtime_error("set file " + path + ": cannot parse '" + tok + "'");
      }
    }
    if (vals.size() != 2 && vals.size() != 4)
      throw std::runtime_error("set file " + path + ": rows need 2 (interval) or 4 (box) columns");
    if (cols == 0) cols = static_cast<int>(vals.size());
    if (cols != static_cast<int>(vals.size()))
      throw std::runtime_error("set file " + path + ": mixed row widths");
    if (cols == 2)
      iv.push_back({vals[0], vals[1]});
    else
      bx.push_back({{vals[0], vals[2]}, {vals[1], vals[3]}});
  }
  if (cols == 4) return boxes(std::move(bx));
  return intervals(std::move(iv));  // empty file -> empty d=1 set
}

void MeasurableSet::write_csv(std::ostream& os) const {
  if (is_mask_) throw std::logic_error("write_csv: mask serialization not supported");
  if (dim_ == 1) {
    os << "# lo,hi\n";
    for (const auto& i : iv_) os << fmt_double(i.lo) << ',' << fmt_double(i.hi) << '\n';
  } else {
    os << "# lo1,hi1,lo2,hi2\n";
    for (const auto& b : bx_)
      os << fmt_double(b.lo[0]) << ',' << fmt_double(b.hi[0]) << ',' << fmt_double(b.lo[1]) << ','
         << fmt_double(b.hi[1]) << '\n';
  }
}

double ball_measure(int dim, double r, BallNorm norm) {
  if (r < 0.0) throw std::invalid_argument("ball_measure: r >= 0 required");
  if (dim == 1) return 2.0 * r;
  if (dim == 2) return norm == BallNorm::Euclidean ? M_PI * r * r : 4.0 * r * r;
  throw std::invalid_argument("ball_measure: dim must be 1 or 2");
}

namespace {

// area of box ∩ Euclidean disc D(c,r); substitution t = c0 + r sin(theta)
// turns the sqrt chord into a smooth integrand
double box_disc_area(const Box& b, const Point& c, double r) {
  const double x0 = std::max(b.lo[0], c[0] - r), x1 = std::min(b.hi[0], c[0] + r);
  if (!(x1 > x0)) return 0.0;
  const double s0 = std::clamp((x0 - c[0]) / r, -1.0, 1.0);
  const double s1 = std::clamp((x1 - c[0]) / r, -1.0, 1.0);
  const double th0 = std::asin(s0), th1 = std::asin(s1);
  auto integrand = [&](double th) {
    const double half = r * std::cos(th);
    return overlap_len(b.lo[1], b.hi[1], c[1] - half, c[1] + half) * half;  // chord * dt/dtheta
  };
  const double scale = std::min(b.area(), M_PI * r * r);
  return adaptive_simpson(integrand, th0, th1, std::max(1e-13, 1e-11 * scale));
}

double mask_ball_measure(const MeasurableSet& s, const Point& x, double r, BallNorm norm) {
  const double cell = s.mask_cell();
  const Point o = s.mask_origin();
  const auto sh = s.mask_shape();
  const auto& m = s.mask_data();
  const double cvol = s.dim() == 1 ? cell : cell * cell;
  const long long ilo = std::max(0LL, static_cast<long long>(std::floor((x[0] - r - o[0]) / cell)) - 1);
  const long long ihi = std::min<long long>(sh[0] - 1, static_cast<long long>(std::ceil((x[0] + r - o[0]) / cell)) + 1);
  double acc = 0.0;
  if (s.dim() == 1) {
    for (long long i = ilo; i <= ihi; ++i) {
      if (!m[static_cast<std::size_t>(i)]) continue;
      const double cx = o[0] + (i + 0.5) * cell;
      if (std::abs(cx - x[0]) <= r) acc += cvol;
    }
    return acc;
  }
  const long long jlo = std::max(0LL, static_cast<long long>(std::floor((x[1] - r - o[1]) / cell)) - 1);
  const long long jhi = std::min<long long>(sh[1] - 1, static_cast<long long>(std::ceil((x[1] + r - o[1]) / cell)) + 1);
  for (long long i = ilo; i <= ihi; ++i)
    for (long long j = jlo; j <= jhi; ++j) {
      if (!m[static_cast<std::size_t>(i) * sh[1] + j]) continue;
      const double cx = o[0] + (i + 0.5) * cell, cy = o[1] + (j + 0.5) * cell;
      const bool in = norm == BallNorm::Euclidean
                          ? (cx - x[0]) * (cx - x[0]) + (cy - x[1]) * (cy - x[1]) <= r * r
                          : std::max(std::abs(cx - x[0]), std::abs(cy - x[1])) <= r;
      if (in) acc += cvol;
    }
  return acc;
}

}  // namespace

double intersect_ball_measure(const MeasurableSet& set, const Point& x, double r, BallNorm norm) {
  if (!(r > 0.0)) throw std::invalid_argument("intersect_ball_measure: r > 0 required");
  if (set.is_mask()) return mask_ball_measure(set, x, r, norm);
  if (set.dim() == 1) {
    double acc = 0.0;
    for (const auto& i : set.interval_list()) {
      if (i.lo > x[0] + r) break;
      acc += overlap_len(i.lo, i.hi, x[0] - r, x[0] + r);
    }
    return acc;
  }
  double acc = 0.0;
  for (const auto& b : set.box_list()) {
    if (norm == BallNorm::Sup) {
      acc += overlap_len(b.lo[0], b.hi[0], x[0] - r, x[0] + r) *
             overlap_len(b.lo[1], b.hi[1], x[1] - r, x[1] + r);
    } else {
      acc += box_disc_area(b, x, r);
    }
  }
  return acc;
}

ThinnessCertificate certify_thinness(const MeasurableSet& set, const RadiusFunction& rho,
                                     const CenterSpec& centers, BallNorm norm) {
  const int d = set.dim();
  if (!(centers.hi[0] >= centers.lo[0]) || (d == 2 && !(centers.hi[1] >= centers.lo[1])))
    throw std::invalid_argument("certify_thinness: empty probe domain");
  // the smallest adapted radius over the domain sets the required pitch
  double max_norm = 0.0;
  {
    const double cx = std::max(std::abs(centers.lo[0]), std::abs(centers.hi[0]));
    const double cy = d == 2 ? std::max(std::abs(centers.lo[1]), std::abs(centers.hi[1])) : 0.0;
    max_norm = d == 2 ? std::hypot(cx, cy) : cx;
  }
  const double rho_min = rho(max_norm);
  const double required = rho_min / 2.0;
  double spacing = centers.spacing;
  if (spacing == 0.0) spacing = required;
  if (spacing > required * (1.0 + 1e-12))
    throw std::invalid_argument("certify_thinness: center spacing " + fmt_double(spacing) +
                                " coarser than required " + fmt_double(required) +
                                " (= min rho over domain / 2)");

  std::vector<Point> pts;
  const long long nx = static_cast<long long>(std::floor((centers.hi[0] - centers.lo[0]) / spacing)) + 1;
  const long long ny = d == 2 ? static_cast<long long>(std::floor((centers.hi[1] - centers.lo[1]) / spacing)) + 1 : 1;
  if (nx * ny > 40'000'000LL)
    throw std::invalid_argument("certify_thinness: probe grid too large (" + std::to_string(nx * ny) +
                                " centers); shrink the domain or use a coarser rho");
  pts.reserve(static_cast<std::size_t>(nx * ny) + centers.extra.size());
  for (long long i = 0; i < nx; ++i)
    for (long long j = 0; j < ny; ++j)
      pts.push_back({centers.lo[0] + i * spacing, d == 2 ? centers.lo[1] + j * spacing : 0.0});
  for (const auto& e : centers.extra) pts.push_back(e);

  std::vector<double> ratio(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const double r = rho(d == 2 ? norm2(pts[i]) : std::abs(pts[i][0]));
    const double denom = ball_measure(d, r, norm);
    ratio[i] = denom > 0.0 ? intersect_ball_measure(set, pts[i], r, norm) / denom : 0.0;
  });

  ThinnessCertificate cert;
  cert.center_count = pts.size();
  cert.rho = rho.describe();
  cert.norm = norm;
  double worst = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (ratio[i] > worst) {
      worst = ratio[i];
      cert.worst_center = pts[i];
      cert.worst_radius = rho(d == 2 ? norm2(pts[i]) : std::abs(pts[i][0]));
    }
  }
  cert.epsilon_measured = std::clamp(worst, 0.0, 1.0);
  cert.note = "centers in [" + fmt_double(centers.lo[0]) + "," + fmt_double(centers.hi[0]) + "]" +
              (d == 2 ? "^2" : "") + " spacing " + fmt_double(spacing) +
              (norm == BallNorm::Sup ? ", sup-norm balls" : ", euclidean balls") +
              "; outside the truncated domain thinness relies on the set's analytic form";
  return cert;
}

MeasurableSet periodic_thin_set(int dim, long long count, double half_width, double spacing) {
  if (count < 1) throw std::invalid_argument("periodic_thin_set: count >= 1 required");
  if (!(half_width > 0.0)) throw std::invalid_argument("periodic_thin_set: half_width > 0 required");
  if (dim == 1) {
    if (!(half_width < spacing / 2.0))
      throw std::invalid_argument("periodic_thin_set: overlapping intervals (need half_width < spacing/2)");
    std::vector<Interval> iv;
    iv.reserve(static_cast<std::size_t>(2 * count - 1));
    for (long long j = -(count - 1); j <= count - 1; ++j)
      iv.push_back({j * spacing - half_width, j * spacing + half_width});
    return MeasurableSet::intervals(std::move(iv));
  }
  if (dim == 2) {
    const double half_span = static_cast<double>(count - 2);
    if (!(half_span > 0.0)) throw std::invalid_argument("periodic_thin_set: d=2 needs count > 2");
    return MeasurableSet::boxes({Box{{-half_span, -half_width}, {half_span, half_width}}});
  }
  throw std::invalid_argument("periodic_thin_set: dim must be 1 or 2");
}

}  // namespace thinlab
