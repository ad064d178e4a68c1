#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "thinlab/radius.hpp"

namespace thinlab {

using Point = std::array<double, 2>;  // d=1 uses [0], [1] stays 0

enum class BallNorm { Euclidean, Sup };

struct Interval {
  double lo = 0.0, hi = 0.0;
  double length() const { return hi - lo; }
};

struct Box {
  Point lo{}, hi{};
  double area() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]); }
};

// Finite unions of intervals (d=1), axis-aligned boxes (d=2), or a boolean
// grid mask. Interval/box reps are kept sorted and pairwise disjoint.
class MeasurableSet {
 public:
  static MeasurableSet empty(int dim);
  static MeasurableSet intervals(std::vector<Interval> iv);
  static MeasurableSet boxes(std::vector<Box> bx);
  static MeasurableSet grid_mask(int dim, Point origin, double cell, std::array<int, 2> shape,
                                 std::vector<std::uint8_t> mask);

  int dim() const { return dim_; }
  bool is_mask() const { return is_mask_; }
  double measure() const;
  bool empty_set() const;

  const std::vector<Interval>& interval_list() const;
  const std::vector<Box>& box_list() const;

  Point bounding_lo() const;
  Point bounding_hi() const;
  bool contains(const Point& x) const;

  // quantized copy on a cell grid (cell centers decide membership)
  MeasurableSet to_mask(double cell) const;

  // mask accessors
  double mask_cell() const { return cell_; }
  Point mask_origin() const { return origin_; }
  std::array<int, 2> mask_shape() const { return shape_; }
  const std::vector<std::uint8_t>& mask_data() const { return mask_; }

  // CSV: "lo,hi" rows (d=1) or "lo1,hi1,lo2,hi2" rows (d=2), '#' comments
  static MeasurableSet read_csv(const std::string& path);
  void write_csv(std::ostream& os) const;

 private:
  int dim_ = 1;
  bool is_mask_ = false;
  std::vector<Interval> iv_;
  std::vector<Box> bx_;
  Point origin_{};
  double cell_ = 0.0;
  std::array<int, 2> shape_{};
  std::vector<std::uint8_t> mask_;
};

// volume of the metric ball; Sup gives (2r)^d
double ball_measure(int dim, double r, BallNorm norm = BallNorm::Euclidean);

// |set ∩ D(x,r)|: exact clip for intervals and sup-norm boxes, adaptive
// quadrature for Euclidean disc vs boxes, cell counting for masks
double intersect_ball_measure(const MeasurableSet& set, const Point& x, double r,
                              BallNorm norm = BallNorm::Euclidean);

struct ThinnessCertificate {
  double epsilon_measured = 0.0;
  Point worst_center{};
  double worst_radius = 0.0;
  std::size_t center_count = 0;
  std::string rho;   // description of the radius function used
  std::string note;  // records truncation domain and ball norm
  BallNorm norm = BallNorm::Euclidean;
};

struct CenterSpec {
  Point lo{}, hi{};    // probed domain (per-axis bounds)
  double spacing = 0;  // 0 => auto: min over domain of rho(|x|)/2
  std::vector<Point> extra;  // analytically worst centers, appended verbatim
};

// epsilon_measured = max over centers of |set ∩ D(x, rho(|x|))| / |D(x, rho(|x|))|
ThinnessCertificate certify_thinness(const MeasurableSet& set, const RadiusFunction& rho,
                                     const CenterSpec& centers,
                                     BallNorm norm = BallNorm::Euclidean);

// d=1: 2*count-1 intervals [j*spacing - h, j*spacing + h], |j| <= count-1.
// d=2: the box [-(count-2), count-2] x [-h, h].
MeasurableSet periodic_thin_set(int dim, long long count, double half_width, double spacing = 1.0);

}  // namespace thinlab
