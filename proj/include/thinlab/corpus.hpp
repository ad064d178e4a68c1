#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thinlab/spectral.hpp"

namespace thinlab {

// Seeded test functions cycling through three families: Gaussians with random
// centers/widths/modulations, smooth compact bumps, and band-limited noise
// under a Gaussian envelope. All are closed-form pointwise evaluations, so
// refining the grid samples the same continuum function and the first k
// functions of a larger corpus equal corpus(k).
std::vector<GridFunction> make_corpus(const GridSpec& spec, int count,
                                      std::uint64_t seed);

std::string corpus_label(int index);  // e.g. "gaussian-0", "noise-5"

}  // namespace thinlab
