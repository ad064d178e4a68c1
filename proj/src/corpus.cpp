#include "thinlab/corpus.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "thinlab/mollifier.hpp"
#include "thinlab/util.hpp"

namespace thinlab {

namespace {

std::uint64_t member_seed(std::uint64_t seed, int index) {
  return fnv1a("corpus/" + std::to_string(seed) + "/" + std::to_string(index));
}

constexpr int kNoiseModes = 24;

}  // namespace

std::vector<GridFunction> make_corpus(const GridSpec& spec, int count,
                                      std::uint64_t seed) {
  if (count <= 0) throw std::invalid_argument("make_corpus: count must be > 0");
  const double R = spec.extent;
  const int d = spec.dim;
  std::vector<GridFunction> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Rng rng(member_seed(seed, i));
    const int family = i % 3;
    // modest centers/frequencies keep tails below the truncation floor
    Point c{};
    Point xi{};
    for (int a = 0; a < d; ++a) {
      c[a] = rng.uniform(-R / 8.0, R / 8.0);
      xi[a] = rng.uniform(-4.0, 4.0);
    }
    std::function<std::complex<double>(Point)> f;
    if (family == 0) {
      const double w = rng.uniform(0.5, std::min(3.0, R / 12.0));
      f = [=](Point x) {
        double q2 = 0.0, ph = 0.0;
        for (int a = 0; a < d; ++a) {
          q2 += (x[a] - c[a]) * (x[a] - c[a]);
          ph += xi[a] * x[a];
        }
        return std::exp(-q2 / (2.0 * w * w)) *
               std::polar(1.0, 2.0 * M_PI * ph);
      };
    } else if (family == 1) {
      const double w = rng.uniform(1.0, 4.0);
      f = [=](Point x) {
        double q2 = 0.0, ph = 0.0;
        for (int a = 0; a < d; ++a) {
          q2 += (x[a] - c[a]) * (x[a] - c[a]);
          ph += xi[a] * x[a];
        }
        return bump_transition(1.0 - std::sqrt(q2) / w) *
               std::polar(1.0, 2.0 * M_PI * ph);
      };
    } else {
      // random trigonometric polynomial under a Gaussian envelope: frequencies
      // on a fixed lattice so the function does not depend on the grid
      const double sigma = R / 10.0;
      std::vector<Point> freq(kNoiseModes);
      std::vector<double> re(kNoiseModes), im(kNoiseModes);
      for (int k = 0; k < kNoiseModes; ++k) {
        for (int a = 0; a < d; ++a) freq[k][a] = rng.uniform(-6.0, 6.0);
        auto z = rng.cnormal();
        re[k] = z.real() / std::sqrt(double(kNoiseModes));
        im[k] = z.imag() / std::sqrt(double(kNoiseModes));
      }
      f = [=](Point x) {
        double q2 = 0.0;
        for (int a = 0; a < d; ++a) q2 += x[a] * x[a];
        std::complex<double> acc = 0.0;
        for (int k = 0; k < kNoiseModes; ++k) {
          double ph = 0.0;
          for (int a = 0; a < d; ++a) ph += freq[k][a] * x[a];
          acc += std::complex<double>(re[k], im[k]) *
                 std::polar(1.0, 2.0 * M_PI * ph);
        }
        return acc * std::exp(-q2 / (2.0 * sigma * sigma));
      };
    }
    out.push_back(GridFunction::sample(spec, f));
  }
  return out;
}

std::string corpus_label(int index) {
  static const char* names[3] = {"gaussian", "bump", "noise"};
  if (index < 0) return "none";
  return std::string(names[index % 3]) + "-" + std::to_string(index);
}

}  // namespace thinlab
