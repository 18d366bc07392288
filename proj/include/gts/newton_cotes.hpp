#pragma once

// Closed 13-node Newton-Cotes rule (12 intervals per panel) and the partial
// weights used for cumulative integration inside a panel.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace gts {

inline constexpr std::size_t kPanelIntervals = 12;
inline constexpr std::size_t kPanelNodes = kPanelIntervals + 1;

using PanelWeights = std::array<double, kPanelNodes>;

/// W_0..W_12 for unit node spacing: integral over [0, 12] of p ~ sum W_j p(j).
/// Exact rationals; they sum to 12.
inline constexpr PanelWeights newton_cotes_weights() {
  constexpr double w0 = 1364651.0 / 5255250.0;
  constexpr double w1 = 150048.0 / 79625.0;
  constexpr double w2 = -1264644.0 / 875875.0;
  constexpr double w3 = 3572512.0 / 525525.0;
  constexpr double w4 = -3432753.0 / 350350.0;
  constexpr double w5 = 14586048.0 / 875875.0;
  constexpr double w6 = -2090408.0 / 125125.0;
  return {w0, w1, w2, w3, w4, w5, w6, w5, w4, w3, w2, w1, w0};
}

/// Weights of the composite rule on m+1 nodes (m a multiple of 12); panel
/// endpoint weights add across adjacent panels.
inline std::vector<double> composite_weights(std::size_t m) {
  if (m == 0 || m % kPanelIntervals != 0) {
    throw std::invalid_argument("composite_weights: m must be a positive multiple of 12");
  }
  const auto w = newton_cotes_weights();
  std::vector<double> out(m + 1, 0.0);
  for (std::size_t p = 0; p < m; p += kPanelIntervals) {
    for (std::size_t j = 0; j < kPanelNodes; ++j) out[p + j] += w[j];
  }
  return out;
}

/// Composite integral of equally spaced samples (size - 1 a multiple of 12).
inline double integrate_samples(std::span<const double> y, double h) {
  const auto w = composite_weights(y.size() - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += w[i] * y[i];
  return acc * h;
}

/// partial[i][j] = integral over [0, i] of the j-th Lagrange basis polynomial
/// on nodes 0..12. Row 12 equals the closed weights.
inline const std::array<PanelWeights, kPanelNodes>& partial_panel_weights() {
  static const std::array<PanelWeights, kPanelNodes> table = [] {
    // 7-point Gauss-Legendre is exact for the degree-12 basis on each unit step.
    constexpr std::array<double, 7> gx = {-0.9491079123427585, -0.7415311855993945,
                                          -0.4058451513773972, 0.0,
                                          0.4058451513773972,  0.7415311855993945,
                                          0.9491079123427585};
    constexpr std::array<double, 7> gw = {0.1294849661688697, 0.2797053914892766,
                                          0.3818300505051189, 0.4179591836734694,
                                          0.3818300505051189, 0.2797053914892766,
                                          0.1294849661688697};
    auto basis = [](std::size_t j, double t) {
      double v = 1.0;
      for (std::size_t r = 0; r < kPanelNodes; ++r) {
        if (r != j) v *= (t - static_cast<double>(r)) / (static_cast<double>(j) - static_cast<double>(r));
      }
      return v;
    };
    std::array<PanelWeights, kPanelNodes> t{};
    for (std::size_t i = 1; i < kPanelNodes; ++i) {
      const double mid = static_cast<double>(i) - 0.5;
      for (std::size_t j = 0; j < kPanelNodes; ++j) {
        double step = 0.0;
        for (std::size_t g = 0; g < gx.size(); ++g) step += gw[g] * basis(j, mid + 0.5 * gx[g]);
        t[i][j] = t[i - 1][j] + 0.5 * step;
      }
    }
    return t;
  }();
  return table;
}

/// Running integral of equally spaced samples from the first node.
/// Any length >= 13 works; the trailing partial panel reuses the last
/// 13-node stencil. out[0] = 0.
inline std::vector<double> cumulative_integral(std::span<const double> y, double h) {
  const std::size_t n = y.size();
  if (n < kPanelNodes) throw std::invalid_argument("cumulative_integral: need at least 13 samples");
  const auto& part = partial_panel_weights();
  std::vector<double> out(n, 0.0);
  auto fill = [&](std::size_t start, double base, std::size_t from, std::size_t to) {
    for (std::size_t k = from; k <= to; ++k) {
      const auto& w = part[k - start];
      double acc = 0.0;
      for (std::size_t j = 0; j < kPanelNodes; ++j) acc += w[j] * y[start + j];
      out[k] = base + h * acc;
    }
  };
  std::size_t start = 0;
  for (; start + kPanelIntervals <= n - 1; start += kPanelIntervals) {
    fill(start, out[start], start + 1, start + kPanelIntervals);
  }
  if (start < n - 1) {
    const std::size_t s1 = n - kPanelNodes;
    fill(s1, out[s1], start + 1, n - 1);
  }
  return out;
}

}  // namespace gts
