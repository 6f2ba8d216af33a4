#pragma once

#include <cstdint>
#include <vector>

#include "zygmund/common.hpp"

namespace zyg {

// Scrambled Halton sequence in [0,1)^dim. The seed selects a Cranley-Patterson
// rotation, so the sequence stays low-discrepancy and point i never depends on
// how many points are drawn (prefix property).
class HaltonSequence {
 public:
  HaltonSequence(std::size_t dim, std::uint64_t seed);

  std::size_t dimension() const noexcept { return shift_.size(); }
  // Point with index i (0-based); index 0 is skipped internally.
  Vec point(std::uint64_t i) const;

 private:
  std::vector<std::uint32_t> bases_;
  Vec shift_;
};

// Unit vectors in R^dim from a low-discrepancy sequence. The first `dim`
// directions are the canonical basis vectors; the rest come from a Halton
// sequence pushed through the Gaussian quantile and normalized. Prefixes are
// stable: sphere_directions(n) is a prefix of sphere_directions(2n).
std::vector<Vec> sphere_directions(std::size_t dim, std::size_t count,
                                   std::uint64_t seed);

// Log-spaced grid from hi down to lo (inclusive), `per_decade` points per
// factor of ten. Strictly decreasing.
Vec log_grid_descending(double hi, double lo, int per_decade);

// Splitmix-style mix used to derive sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace zyg
