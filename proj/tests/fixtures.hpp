#pragma once

#include <cmath>
#include <random>

#include "gts/model.hpp"

namespace gts::testing {

// Fitted daily-return laws used throughout the suites (percent units).
inline const GtsParams kSp500{-0.693477, 0.682290, 0.242579, 0.458582, 0.414443, 0.822222, 0.727607};
inline const GtsParams kBitcoin{-0.736924, 0.461378, 0.267178, 0.810017, 0.517347, 0.215628, 0.191937};

inline const GtsParams kSymmetric{0.0, 0.5, 0.5, 0.6, 0.6, 0.9, 0.9};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Random valid parameters in a box around typical fitted values.
inline GtsParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mu(-1.0, 1.0), beta(0.15, 0.85), alpha(0.2, 1.2), lambda(0.3, 1.5);
  return {mu(rng), beta(rng), beta(rng), alpha(rng), alpha(rng), lambda(rng), lambda(rng)};
}

}  // namespace gts::testing
