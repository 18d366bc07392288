#pragma once

// Frequency/space grid for the inverse-Fourier scheme.
//
// Input nodes   y_i = (i - m/2) * beta_step,            i = 0..m   (m+1 nodes, n panels)
// Output nodes  x_k = center + (k + s - (m-1)/2) * gamma_step,  k = 0..m-1
//
// The half-node offset in x makes the output span symmetric about `center`.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "gts/error.hpp"
#include "gts/model.hpp"
#include "gts/newton_cotes.hpp"

namespace gts {

struct FourierGrid {
  double a = 0;            // frequency support width; transform ~0 outside [-a/2, a/2]
  std::size_t Q = kPanelIntervals;
  std::size_t n = 0;       // panels
  std::size_t m = 0;       // Q * n
  double beta_step = 0;    // a / m
  double gamma_step = 0;   // output spacing
  double delta = 0;        // beta_step * gamma_step / (2 pi)
  double s = 0;            // fractional output shift
  double center = 0;       // midpoint of the output span

  double y(std::size_t i) const {
    return (static_cast<double>(i) - 0.5 * static_cast<double>(m)) * beta_step;
  }
  double x(std::size_t k) const {
    return center + (static_cast<double>(k) + s - 0.5 * static_cast<double>(m - 1)) * gamma_step;
  }
  double x_min() const { return x(0); }
  double x_max() const { return x(m - 1); }
  double span() const { return x_max() - x_min(); }
};

inline std::size_t round_up_to_panels(std::size_t m) {
  const std::size_t q = kPanelIntervals;
  return ((m + q - 1) / q) * q;
}

/// Grid with explicit a, m (rounded up to a multiple of 12) and output spacing.
inline FourierGrid make_grid(double a, std::size_t m, double gamma_step, double center = 0.0,
                             double s = 0.0) {
  if (!(a > 0) || !(gamma_step > 0) || m == 0) {
    throw GridError("make_grid: a, m and gamma_step must be positive");
  }
  FourierGrid g;
  g.m = round_up_to_panels(m);
  g.n = g.m / g.Q;
  g.a = a;
  g.beta_step = a / static_cast<double>(g.m);
  g.gamma_step = gamma_step;
  g.delta = g.beta_step * g.gamma_step / (2.0 * std::numbers::pi);
  g.s = s;
  g.center = center;
  return g;
}

struct GridOptions {
  double tail_tol = 1e-12;
  double coverage = 40.0;  // output span in standard deviations
  double a_max = 1e6;
};

/// Smallest m for which the period-12 weight ghosts of the composite rule,
/// spaced 2 pi m / (12 a) apart, stay a full span away from the centre.
inline std::size_t alias_free_m(double a, double span) {
  const double q = static_cast<double>(kPanelIntervals);
  return static_cast<std::size_t>(std::ceil(q * a * span / (2.0 * std::numbers::pi)));
}

/// Frequency width a with |F(+-a/2)| < tail_tol: doubled from a guess, then
/// tightened by bisection.
inline double choose_support(const CharacteristicFunction& cf, double sd, const GridOptions& opt) {
  auto ok = [&](double a) {
    return std::abs(cf.value(0.5 * a)) < opt.tail_tol && std::abs(cf.value(-0.5 * a)) < opt.tail_tol;
  };
  double hi = 8.0 / sd;
  while (!ok(hi)) {
    hi *= 2.0;
    if (hi > opt.a_max) throw GridError("choose_grid: characteristic function does not decay below tail_tol by a = 1e6");
  }
  double lo = 0.5 * hi;
  if (ok(lo)) return hi;  // initial guess already satisfied
  for (int it = 0; it < 40 && hi - lo > 1e-3 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

/// Grid for GTS parameters: a from the tail tolerance, output span
/// coverage * sd centred on the mean, m = max(m_target, alias-free m)
/// rounded up to a multiple of 12.
inline FourierGrid choose_grid(const GtsParams& p, std::size_t m_target = 8192,
                               const GridOptions& opt = {}) {
  const CharacteristicFunction cf(p);
  const auto c = cumulants(p, 2);
  const double sd = std::sqrt(c(2));
  const double a = choose_support(cf, sd, opt);
  const double span = opt.coverage * sd;
  const std::size_t m = round_up_to_panels(std::max(m_target, alias_free_m(a, span)));
  return make_grid(a, m, span / static_cast<double>(m), c(1));
}

inline FourierGrid choose_grid(const GtsParams& p, std::size_t m_target, double coverage) {
  GridOptions opt;
  opt.coverage = coverage;
  return choose_grid(p, m_target, opt);
}

}  // namespace gts
