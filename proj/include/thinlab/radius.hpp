#pragma once

#include <memory>
#include <string>
#include <vector>

namespace thinlab {

// Continuous non-increasing map [0,inf) -> (0,inf). Immutable value type;
// copies share the underlying definition.
class RadiusFunction {
 public:
  enum class Kind { PowerLaw, Constant, CompactCutoff, Tabulated, Scaled };

  // min(t^-a, 1), a > 0
  static RadiusFunction power_law(double exponent);
  static RadiusFunction constant(double value);
  // same formula as power_law with large exponent; kept as its own kind since
  // it plays the role of an approximate characteristic function of [0,1]
  static RadiusFunction compact_cutoff(double exponent);
  // piecewise-linear through (t_i, v_i); values clamped non-increasing,
  // extended by constants on both sides
  static RadiusFunction tabulated(std::vector<double> t, std::vector<double> v);

  double operator()(double t) const;
  // value_scale * f(t / arg_scale); nested scalings collapse
  RadiusFunction scaled(double value_scale, double arg_scale) const;

  Kind kind() const;
  std::string describe() const;
  // "powerlaw:a=2" | "constant:c=0.5" | "cutoff:n=8" | "table:t0:v0,t1:v1,..."
  static RadiusFunction parse(const std::string& text);

 private:
  struct Impl;
  explicit RadiusFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

struct CompatiblePair {
  RadiusFunction rho1;
  RadiusFunction rho2;
  double c1 = 1.0;
  double c2 = 1.0;
  // set by callers once check_compatibility succeeded on their probe grid
  bool certified = false;
  std::string describe() const;
};

struct CompatibilityReport {
  bool holds = false;
  double worst_margin = 0.0;  // min over probes of c2/rho2(c1/rho1(t)) - t
  double worst_t = 0.0;
  double t_max = 0.0;
  int probes = 0;
};

// Checks c2/rho2(c1/rho1(t)) >= t on {0} + a log-spaced grid up to t_max.
CompatibilityReport check_compatibility(const CompatiblePair& pair, double t_max = 1e8,
                                        int probes = 10000);

// rho1 -> k rho1(t/k), rho2 -> (1/k) rho2(k t); preserves the compatibility
// margin sign at rescaled arguments. c1, c2 unchanged.
CompatiblePair scale_pair(const CompatiblePair& pair, double k);

// Named presets: "wolff", "powerlaw:a=A", "ls:n=N", "incompat", "cutoff:n=N".
CompatiblePair parse_pair(const std::string& name);

}  // namespace thinlab
