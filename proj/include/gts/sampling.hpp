#pragma once

// Seeded inverse-CDF sampling from a density table.

#include <cstdint>
#include <random>
#include <vector>

#include "gts/density.hpp"
#include "gts/risk.hpp"

namespace gts {

/// F^{-1}(u) by the same quartic inversion as var; levels too deep in a tail
/// for a five-node stencil are pulled in to the last usable node.
inline double quantile(const DensityTable& t, double u) {
  const std::size_t n = t.F.size();
  const double lo = t.F[2], hi = t.F[n - 3];
  if (u <= lo) return t.x[2];
  if (u > hi) return t.x[n - 3];
  return var(t, u);
}

inline std::vector<double> sample(const DensityTable& t, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out(count);
  for (auto& v : out) {
    double u = unif(rng);
    while (u <= 0.0) u = unif(rng);
    v = quantile(t, u);
  }
  return out;
}

}  // namespace gts
