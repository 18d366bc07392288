#pragma once

// Independent reference computations shared by the unit suites and the
// acceptance runner.

#include <algorithm>
#include <cmath>
#include <vector>

#include "gts/density.hpp"
#include "gts/risk.hpp"

namespace gts::testing {

/// (1/a) int_0^a VaR_y dy (lower) or (1/(1-c)) int_c^1 VaR_y dy (upper), by
/// Simpson's rule on var() in the log of the tail probability. Mass beyond the
/// deepest bracketable level is below 1e-9 and is dropped.
inline double avar_by_definition(const DensityTable& t, double level, Tail side, int n = 4000) {
  const double tail = side == Tail::kLower ? level : 1.0 - level;
  const std::size_t sz = t.F.size();
  const double deepest = side == Tail::kLower ? t.F[3] : 1.0 - t.F[sz - 4];
  const double lo = std::log(std::max(deepest, 1e-12) * 1.0001), hi = std::log(tail);
  const double h = (hi - lo) / n;
  auto g = [&](double s) {
    const double p = std::exp(s);
    const double y = side == Tail::kLower ? p : 1.0 - p;
    return var(t, y) * p;  // dy = p ds
  };
  double acc = g(lo) + g(hi);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(lo + i * h);
  return acc * h / 3.0 / tail;
}

/// E[(X-k)^+] by Newton-Cotes quadrature of the tabulated density. The kink
/// at k is avoided: the smooth part starts at the first node above k and the
/// sliver before it is added from a local linear expansion.
inline double call_by_quadrature(const DensityTable& t, double k) {
  const auto it = std::upper_bound(t.x.begin(), t.x.end(), k);
  const std::size_t j0 = static_cast<std::size_t>(it - t.x.begin());
  std::vector<double> y;
  for (std::size_t i = j0; i < t.size(); ++i) y.push_back((t.x[i] - k) * t.f[i]);
  if (y.size() < 2) return 0.0;
  const double d = t.x[j0] - k;
  return cumulative_integral(y, t.grid.gamma_step).back() + 0.5 * d * d * density_at(t, k);
}

}  // namespace gts::testing
