#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

#include "thinlab/sets.hpp"

namespace thinlab {

struct GridSpec {
  int dim = 1;
  double extent = 64.0;  // R, per axis; domain is [-R/2, R/2)
  int samples = 4096;    // N, per axis; power of two

  double spacing() const { return extent / samples; }
  double dual_extent() const { return samples / extent; }  // N * (1/R)
  GridSpec dual() const { return {dim, dual_extent(), samples}; }
  bool operator==(const GridSpec&) const = default;
};

// Complex samples on the uniform grid x = -R/2 + m h, h = R/N (row-major for
// d=2). Carries the transform convention fhat(y) = ∫ f(x) e^{-2πi x·y} dx.
class GridFunction {
 public:
  explicit GridFunction(GridSpec spec);
  static GridFunction sample(const GridSpec& spec,
                             const std::function<std::complex<double>(Point)>& f);

  const GridSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  int samples() const { return spec_.samples; }
  double extent() const { return spec_.extent; }
  double spacing() const { return spec_.spacing(); }
  std::size_t size() const { return v_.size(); }  // N^d

  double coord(int idx) const { return -0.5 * spec_.extent + spec_.spacing() * idx; }
  Point point(std::size_t flat) const;

  std::complex<double>& operator[](std::size_t i) { return v_[i]; }
  const std::complex<double>& operator[](std::size_t i) const { return v_[i]; }
  std::vector<std::complex<double>>& data() { return v_; }
  const std::vector<std::complex<double>>& data() const { return v_; }

  void write_csv(std::ostream& os) const;  // x[,y],re,im

 private:
  GridSpec spec_;
  std::vector<std::complex<double>> v_;
};

// FFT under the continuous convention; output lives on the dual grid
// (spacing 1/R, extent N/R). inverse_transform undoes it exactly.
GridFunction forward_transform(const GridFunction& f);
GridFunction inverse_transform(const GridFunction& g);

// h^d Σ |f|^2
double energy(const GridFunction& f);

struct EnergyReport {
  double total = 0.0;
  double on_set = 0.0;
  double off_set = 0.0;  // complement within the truncated domain
};

EnergyReport energy_split(const GridFunction& f, const MeasurableSet& A);

// ‖f‖² / (∫_{E^c}|f|² + ∫_{Σ^c}|fhat|²); +inf when the denominator underflows
double uncertainty_defect(const GridFunction& f, const MeasurableSet& E, const MeasurableSet& Sigma);

}  // namespace thinlab
