#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace thinlab {

// n log-spaced points in [lo, hi], endpoints included. lo must be > 0.
std::vector<double> log_spaced(double lo, double hi, int n);

// FNV-1a over a canonical key=value rendering; used to stamp CSV rows so a
// result can be traced back to the exact configuration that produced it.
std::uint64_t fnv1a(std::string_view s);
std::string config_hash(const std::vector<std::pair<std::string, std::string>>& kv);

// Deterministic random source. We roll uniform/normal by hand on top of
// mt19937_64 because the std distributions are implementation-defined and we
// promise byte-identical CSV output for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t raw() { return eng_(); }
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal();
  std::complex<double> cnormal() { double a = normal(); return {a, normal()}; }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Runs fn(0..n-1); worker count from THINLAB_WORKERS (default: hardware).
// Results must be written to per-index slots so the schedule cannot leak into
// the output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// max over f(0..n-1), computed in parallel, reduced in index order.
double parallel_max(std::size_t n, const std::function<double(std::size_t)>& fn);

// CSV helpers (RFC-4180 style: quote fields containing comma/quote/newline).
std::string csv_escape(const std::string& field);
std::string fmt_double(double v);  // shortest round-trippable-ish %.12g

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  void add_row(const std::vector<std::string>& r);
  std::string to_string() const;
  void write(const std::string& path) const;
};

}  // namespace thinlab
