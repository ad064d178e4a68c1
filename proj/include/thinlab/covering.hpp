#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thinlab/radius.hpp"
#include "thinlab/sets.hpp"

namespace thinlab {

// Greedy Vitali cover of D(x,r) by rho1-adapted balls: candidates on a grid
// of pitch min(rho1)/6, filtered to rho1(|c|) <= 3r, selected in decreasing
// radius order with exactly disjoint third-radius balls.
struct CoverResult {
  int dim = 1;
  BallNorm norm = BallNorm::Euclidean;
  Point center{};
  double target_radius = 0.0;

  std::vector<Point> candidates;
  std::vector<double> cand_radii;
  std::vector<std::uint8_t> selected;  // parallel to candidates

  double overlap_sum = 0.0;     // Σ selected |D(x_i, rho1(|x_i|))|
  double target_measure = 0.0;  // |D(x, r)|
  double constant = 0.0;        // overlap_sum / target_measure

  bool covered = false;  // every probe of the closed disc in a selected ball
  int probes_checked = 0;
  int uncovered = 0;

  std::size_t selected_count() const;
  void write_csv(const std::string& path) const;  // center, radius, selected
};

CoverResult greedy_cover(int dim, const Point& x, double r,
                         const RadiusFunction& rho1,
                         BallNorm norm = BallNorm::Euclidean,
                         int coverage_probes = 10000);

// |D(x,r) ∩ E| / (eps |D(x,r)|); requires the adapted regime r >= rho1(|x|)
// and checks the result against the cover constant of greedy_cover.
double thin_ball_bound(const MeasurableSet& E, const Point& x, double r,
                       const RadiusFunction& rho1, double eps,
                       BallNorm norm = BallNorm::Euclidean);

}  // namespace thinlab
