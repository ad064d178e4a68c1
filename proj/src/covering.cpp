#include "thinlab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "thinlab/util.hpp"

namespace thinlab {

namespace {

double dist(int dim, BallNorm norm, const Point& a, const Point& b) {
  if (dim == 1) return std::fabs(a[0] - b[0]);
  const double dx = a[0] - b[0], dy = a[1] - b[1];
  return norm == BallNorm::Euclidean ? std::hypot(dx, dy)
                                     : std::max(std::fabs(dx), std::fabs(dy));
}

double radial(int dim, const Point& a) {
  return dim == 1 ? std::fabs(a[0]) : std::hypot(a[0], a[1]);
}

}  // namespace

std::size_t CoverResult::selected_count() const {
  return static_cast<std::size_t>(
      std::count(selected.begin(), selected.end(), std::uint8_t(1)));
}

void CoverResult::write_csv(const std::string& path) const {
  CsvTable t({"x", "y", "radius", "selected"});
  for (std::size_t i = 0; i < candidates.size(); ++i)
    t.add_row({fmt_double(candidates[i][0]),
               fmt_double(dim == 2 ? candidates[i][1] : 0.0),
               fmt_double(cand_radii[i]), selected[i] ? "1" : "0"});
  t.write(path);
}

CoverResult greedy_cover(int dim, const Point& x, double r,
                         const RadiusFunction& rho1, BallNorm norm,
                         int coverage_probes) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("greedy_cover: dim must be 1 or 2");
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::invalid_argument("greedy_cover: target radius must be positive");

  // smallest adapted radius over the disc sets the candidate pitch
  const double rho_min = rho1(radial(dim, x) + r);
  if (!(rho_min > 0.0))
    throw std::invalid_argument(
        "greedy_cover: rho1 vanishes on the target disc; adapted covering "
        "undefined");
  const double pitch = std::min(rho_min, 3.0 * r) / 6.0;
  const long per_axis = std::lround(std::ceil(2.0 * r / pitch)) + 1;
  const double total_est = dim == 1 ? double(per_axis)
                                    : double(per_axis) * double(per_axis);
  if (total_est > 2e6)
    throw std::invalid_argument(
        "greedy_cover: candidate grid would need " + fmt_double(total_est) +
        " points (pitch " + fmt_double(pitch) +
        "); shrink r or use a flatter rho1");

  CoverResult res;
  res.dim = dim;
  res.norm = norm;
  res.center = x;
  res.target_radius = r;
  res.target_measure = ball_measure(dim, r, norm);

  for (long i = 0; i < per_axis; ++i) {
    const double cx = x[0] - r + (2.0 * r) * double(i) / double(per_axis - 1);
    const long jn = dim == 1 ? 1 : per_axis;
    for (long j = 0; j < jn; ++j) {
      Point c{cx, 0.0};
      if (dim == 2)
        c[1] = x[1] - r + (2.0 * r) * double(j) / double(per_axis - 1);
      if (dist(dim, norm, c, x) > r) continue;
      const double rad = rho1(radial(dim, c));
      if (!(rad > 0.0)) continue;
      if (rad > 3.0 * r) continue;  // the proof's radius filter
      res.candidates.push_back(c);
      res.cand_radii.push_back(rad);
    }
  }
  if (res.candidates.empty())
    throw std::runtime_error("greedy_cover: no admissible candidates");
  res.selected.assign(res.candidates.size(), 0);

  // decreasing radius, lexicographic center tie-break
  std::vector<std::size_t> order(res.candidates.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (res.cand_radii[a] != res.cand_radii[b])
      return res.cand_radii[a] > res.cand_radii[b];
    if (res.candidates[a][0] != res.candidates[b][0])
      return res.candidates[a][0] < res.candidates[b][0];
    return res.candidates[a][1] < res.candidates[b][1];
  });

  std::vector<std::size_t> picked;
  for (std::size_t idx : order) {
    const double rc = res.cand_radii[idx] / 3.0;
    bool free = true;
    for (std::size_t s : picked) {
      if (dist(dim, norm, res.candidates[idx], res.candidates[s]) <=
          rc + res.cand_radii[s] / 3.0) {
        free = false;
        break;
      }
    }
    if (free) {
      picked.push_back(idx);
      res.selected[idx] = 1;
    }
  }

  res.overlap_sum = 0.0;
  for (std::size_t s : picked)
    res.overlap_sum += ball_measure(dim, res.cand_radii[s], norm);
  res.constant = res.overlap_sum / res.target_measure;

  // probe coverage of the closed disc by the full-radius selected balls
  const long side =
      dim == 1 ? std::max(2L, long(coverage_probes))
               : std::max(2L, std::lround(std::ceil(std::sqrt(
                                  double(coverage_probes)))));
  res.uncovered = 0;
  res.probes_checked = 0;
  for (long i = 0; i < side; ++i) {
    const long jn = dim == 1 ? 1 : side;
    for (long j = 0; j < jn; ++j) {
      Point p{x[0] - r + (2.0 * r) * double(i) / double(side - 1), 0.0};
      if (dim == 2) p[1] = x[1] - r + (2.0 * r) * double(j) / double(side - 1);
      if (dist(dim, norm, p, x) > r) continue;
      ++res.probes_checked;
      bool hit = false;
      for (std::size_t s : picked) {
        if (dist(dim, norm, p, res.candidates[s]) <=
            res.cand_radii[s] * (1.0 + 1e-12)) {
          hit = true;
          break;
        }
      }
      if (!hit) ++res.uncovered;
    }
  }
  res.covered = res.uncovered == 0 && res.probes_checked > 0;
  return res;
}

double thin_ball_bound(const MeasurableSet& E, const Point& x, double r,
                       const RadiusFunction& rho1, double eps, BallNorm norm) {
  const int dim = E.dim();
  if (!(eps > 0.0))
    throw std::invalid_argument("thin_ball_bound: eps must be positive");
  if (r < rho1(radial(dim, x)))
    throw std::invalid_argument(
        "thin_ball_bound: needs the adapted regime r >= rho1(|x|) "
        "(got r = " +
        fmt_double(r) + ", rho1(|x|) = " + fmt_double(rho1(radial(dim, x))) +
        ")");
  const double inter = intersect_ball_measure(E, x, r, norm);
  const double ratio = inter / (eps * ball_measure(dim, r, norm));
  const auto cover = greedy_cover(dim, x, r, rho1, norm);
  if (!cover.covered)
    throw std::runtime_error(
        "thin_ball_bound: cover probe failed; bound not certified");
  if (ratio > cover.constant * (1.0 + 1e-9))
    throw std::runtime_error(
        "thin_ball_bound: measured ratio " + fmt_double(ratio) +
        " exceeds the cover constant " + fmt_double(cover.constant) +
        "; E is not eps-thin at the stated eps");
  return ratio;
}

}  // namespace thinlab
