#pragma once

// VaR by quartic Taylor inversion of the tabulated CDF, AVaR from contour
// integrals of tail payoffs, and the matching empirical estimators.
//
// Levels: lower-tail quantities take the tail probability alpha (< 1/2);
// upper-tail quantities take the confidence level c (> 1/2), so the upper
// tail has probability 1 - c. Results are signed returns in percent.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gts/density.hpp"
#include "gts/error.hpp"
#include "gts/grid.hpp"
#include "gts/model.hpp"
#include "gts/newton_cotes.hpp"

namespace gts {

enum class Tail { kLower, kUpper };
enum class Payoff { kCall, kPut };

inline const char* tail_name(Tail t) { return t == Tail::kLower ? "lower" : "upper"; }

struct RiskReport {
  double level = 0;  // alpha for the lower tail, confidence for the upper tail
  Tail side = Tail::kLower;
  double var = 0;
  double avar = 0;
  std::optional<double> empirical_var;
  std::optional<double> empirical_avar;
  double q_used = 0;
};

// ---------------------------------------------------------------- empirical

namespace detail {

inline void check_level(double a, const char* fn) {
  if (!(a > 0.0 && a < 1.0)) {
    std::ostringstream os;
    os << fn << ": level " << a << " outside (0, 1)";
    throw DomainError(os.str());
  }
}

inline std::vector<double> sorted_copy(std::span<const double> x, const char* fn) {
  if (x.empty()) throw DomainError(std::string(fn) + ": empty sample");
  std::vector<double> v(x.begin(), x.end());
  if (!std::is_sorted(v.begin(), v.end())) std::sort(v.begin(), v.end());
  return v;
}

/// ceil(n a) as a 1-based order-statistic index in [1, n]; the small guard
/// keeps n a = 5.000000000000001 from rounding up to 6.
inline std::size_t order_index(std::size_t n, double a) {
  const double na = static_cast<double>(n) * a;
  const double c = std::ceil(na - 1e-9 * std::max(1.0, na));
  return static_cast<std::size_t>(std::clamp(c, 1.0, static_cast<double>(n)));
}

}  // namespace detail

/// x_(ceil(n alpha)) of the sorted sample.
inline double empirical_var(std::span<const double> sample, double alpha) {
  detail::check_level(alpha, "empirical_var");
  const auto v = detail::sorted_copy(sample, "empirical_var");
  return v[detail::order_index(v.size(), alpha) - 1];
}

/// Upper tail (alpha = confidence):
///   (1/(1-alpha)) [ (1/n) sum_{j>K} x_j + (K/n - alpha) x_K ],  K = ceil(n alpha).
/// Lower tail, the mirror image:
///   (1/alpha) [ (1/n) sum_{j<K} x_j + (alpha - (K-1)/n) x_K ].
inline double empirical_avar(std::span<const double> sample, double alpha, Tail side) {
  detail::check_level(alpha, "empirical_avar");
  const auto v = detail::sorted_copy(sample, "empirical_avar");
  const std::size_t n = v.size();
  const double nd = static_cast<double>(n);
  const std::size_t K = detail::order_index(n, alpha);
  const double xk = v[K - 1];
  double acc = 0.0;
  if (side == Tail::kUpper) {
    for (std::size_t j = K; j < n; ++j) acc += v[j];
    return (acc / nd + (static_cast<double>(K) / nd - alpha) * xk) / (1.0 - alpha);
  }
  for (std::size_t j = 0; j + 1 < K; ++j) acc += v[j];
  return (acc / nd + (alpha - static_cast<double>(K - 1) / nd) * xk) / alpha;
}

// ---------------------------------------------------------------- quartic

inline double poly4(const std::array<double, 5>& b, double y) {
  return (((b[4] * y + b[3]) * y + b[2]) * y + b[1]) * y + b[0];
}

/// Root in [0, 1] of b0 + b1 y + ... + b4 y^4 given a sign change over [0, 1].
/// With several roots, the one closest to the linear estimate -b0/b1 wins.
inline double quartic_root_unit(double b0, double b1, double b2, double b3, double b4) {
  const std::array<double, 5> b{b0, b1, b2, b3, b4};
  const double p0 = b0, p1 = b0 + b1 + b2 + b3 + b4;
  if (!(p0 * p1 <= 0.0)) throw DomainError("quartic_root_unit: no sign change over [0, 1]");
  double scale = 0.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  const double tol = 1e-12 * scale;
  if (std::abs(p0) <= tol && std::abs(p1) > tol) return 0.0;
  if (std::abs(p1) <= tol && std::abs(p0) > tol) return 1.0;

  auto refine = [&](double lo, double hi) {
    double flo = poly4(b, lo);
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double fy = poly4(b, y);
      if (std::abs(fy) <= tol) return y;
      if ((fy < 0) == (flo < 0)) {
        lo = y;
        flo = fy;
      } else {
        hi = y;
      }
      const double d = ((4 * b[4] * y + 3 * b[3]) * y + 2 * b[2]) * y + b[1];
      double next = (d != 0.0) ? y - fy / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (hi - lo <= 4 * std::numeric_limits<double>::epsilon()) return next;
      y = next;
    }
    return y;
  };

  // Bracket every sign change on a fine partition, then pick by proximity.
  constexpr int kCells = 64;
  const double lin = (b1 != 0.0) ? std::clamp(-b0 / b1, 0.0, 1.0) : 0.5;
  double best = std::numeric_limits<double>::quiet_NaN();
  double prev_y = 0.0, prev_f = p0;
  for (int c = 1; c <= kCells; ++c) {
    const double y = static_cast<double>(c) / kCells;
    const double f = poly4(b, y);
    double root = std::numeric_limits<double>::quiet_NaN();
    if (prev_f == 0.0) {
      root = prev_y;
    } else if ((prev_f < 0) != (f < 0) || f == 0.0) {
      root = (f == 0.0) ? y : refine(prev_y, y);
    }
    if (!std::isnan(root) && (std::isnan(best) || std::abs(root - lin) < std::abs(best - lin))) best = root;
    prev_y = y;
    prev_f = f;
  }
  if (std::isnan(best)) best = refine(0.0, 1.0);
  return best;
}

// ---------------------------------------------------------------- VaR

namespace detail {

/// i with F_i < alpha <= F_{i+1}; requires two nodes of margin on each side.
inline std::size_t bracket_index(const DensityTable& t, double alpha) {
  const auto it = std::lower_bound(t.F.begin(), t.F.end(), alpha);
  if (it == t.F.begin() || it == t.F.end()) throw GridError("var: level outside the tabulated CDF range");
  const std::size_t i = static_cast<std::size_t>(it - t.F.begin()) - 1;
  if (i < 2 || i + 2 >= t.F.size()) throw GridError("var: bracket too close to the table edge; widen the grid");
  return i;
}

}  // namespace detail

/// alpha-quantile: five-node central differences give the Taylor polynomial of
/// F around x_i in units of the node spacing; its root in (0, 1) locates x_alpha.
inline double var(const DensityTable& t, double alpha) {
  detail::check_level(alpha, "var");
  const std::size_t i = detail::bracket_index(t, alpha);
  const auto& F = t.F;
  const double a1 = (F[i + 1] - F[i - 1]) / 2.0;
  const double a2 = F[i - 1] - 2.0 * F[i] + F[i + 1];
  const double a3 = (-F[i - 2] + 2.0 * F[i - 1] - 2.0 * F[i + 1] + F[i + 2]) / 2.0;
  const double a4 = F[i - 2] - 4.0 * F[i - 1] + 6.0 * F[i] - 4.0 * F[i + 1] + F[i + 2];
  const double b0 = -(alpha - F[i]);
  double y;
  try {
    y = quartic_root_unit(b0, a1, a2 / 2.0, a3 / 6.0, a4 / 24.0);
  } catch (const DomainError&) {
    // The truncated series lost the sign change; use the secant instead.
    y = (alpha - F[i]) / (F[i + 1] - F[i]);
  }
  return t.x[i] + y * (t.x[i + 1] - t.x[i]);
}

/// F(hi) - F(lo) from the table.
inline double prob_interval(const DensityTable& t, double lo, double hi) {
  if (lo > hi) throw DomainError("prob_interval: lo > hi");
  return cdf_at(t, hi) - cdf_at(t, lo);
}

// ---------------------------------------------------------------- contour integrals

/// E[(X-k)^+] (Call) or E[(X-k)^-] = E[min(X-k, 0)] (Put) from
///   Call: (1/2pi) int_{Im z = +q} (-1/z^2) exp(i z k + Psi(-z)) dz
///   Put:  (1/2pi) int_{Im z = -q} (+1/z^2) exp(i z k + Psi(-z)) dz
/// with q > 0 inside the analyticity strip. Integrated along the line by the
/// composite Newton-Cotes rule on [0, R] using Hermitian symmetry.
inline double tail_payoff_fourier(const GtsParams& p, double k, double q, Payoff side) {
  if (!(q > 0.0)) throw DomainError("tail_payoff_fourier: contour offset q must be positive");
  const double bound = side == Payoff::kCall ? p.lambda_minus : p.lambda_plus;
  if (!(q < bound)) {
    std::ostringstream os;
    os << "tail_payoff_fourier: q = " << q << " leaves the analyticity strip (bound " << bound << ")";
    throw DomainError(os.str());
  }
  const CharacteristicFunction cf(p);
  const double im = side == Payoff::kCall ? q : -q;
  const double sign = side == Payoff::kCall ? -1.0 : 1.0;
  const cplx I{0.0, 1.0};
  auto integrand = [&](double u) {
    const cplx z{u, im};
    return sign * std::exp(I * z * k + cf.exponent(-z)) / (z * z);
  };

  const double sd = std::sqrt(cumulants(p, 2)(2));
  double R = 16.0 / sd;
  constexpr double kDecay = 1e-14;
  constexpr double kRmax = 1e5;
  while (std::abs(integrand(R)) >= kDecay) {
    R *= 2.0;
    if (R > kRmax) throw ConvergenceError("tail_payoff_fourier: integrand does not decay along the contour");
  }
  const double h_target = std::min(q, 1.0 / (1.0 + std::abs(k) + std::abs(p.mu))) / 16.0;
  std::size_t m = round_up_to_panels(static_cast<std::size_t>(std::ceil(R / h_target)));
  const double h = R / static_cast<double>(m);
  const auto w = composite_weights(m);
  double acc = 0.0;
  for (std::size_t i = 0; i <= m; ++i) acc += w[i] * integrand(static_cast<double>(i) * h).real();
  return 2.0 * acc * h / (2.0 * std::numbers::pi);
}

// ---------------------------------------------------------------- ER and q

struct ErOptions {
  double a = 100.0;        // frequency truncation of the payoff transform
  std::size_t m = 4800;    // quadrature nodes
  double M = 20.0;         // reconstruction window [-M, M] (percent)
};

/// Root-mean-square gap between (x-k)^+ and its inverse-Fourier reconstruction
///   g(x) = (1/2pi) int_{Im y = q} exp(i y x) (-exp(-i y k) / y^2) dy
/// over the output nodes in [-M, M]. The reconstruction holds for q < 0.
inline double er(double k, double q, const ErOptions& opt = {}) {
  if (q == 0.0) throw DomainError("er: q must be nonzero");
  const FourierGrid g = make_grid(opt.a, opt.m, 2.0 * opt.M / static_cast<double>(opt.m), 0.0);
  const cplx I{0.0, 1.0};
  const auto v = inverse_fourier(g, [&](double u) {
    const cplx y{u, q};
    return -std::exp(-I * y * k) / (y * y);
  });
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < g.m; ++j) {
    const double x = g.x(j);
    if (std::abs(x) > opt.M) continue;
    const double d = std::max(x - k, 0.0) - std::exp(-q * x) * v[j].real();
    s += d * d;
    ++count;
  }
  return std::sqrt(s / static_cast<double>(count));
}

/// 40 log-spaced magnitudes in [1e-3, 0.5], both signs.
inline std::vector<double> default_q_grid() {
  std::vector<double> out;
  constexpr int n = 40;
  const double lo = std::log(1e-3), hi = std::log(0.5);
  for (int i = 0; i < n; ++i) {
    const double mag = std::exp(lo + (hi - lo) * i / (n - 1));
    out.push_back(-mag);
    out.push_back(mag);
  }
  return out;
}

struct QChoice {
  double q = 0;
  double er = 0;
};

/// Grid search of ER(k, q). The payoff reconstruction does not involve the
/// law of X, so params only gate validity.
inline QChoice optimize_q(const GtsParams& p, double k, const std::vector<double>& q_grid = default_q_grid(),
                          const ErOptions& opt = {}) {
  validate(p);
  QChoice best{0.0, std::numeric_limits<double>::infinity()};
  for (double q : q_grid) {
    if (q == 0.0) continue;
    const double e = er(k, q, opt);
    if (e < best.er) best = {q, e};
  }
  if (!std::isfinite(best.er)) throw DomainError("optimize_q: empty q grid");
  return best;
}

/// Contour offset for the tail payoffs of p: |q*| from ER at the mean, held
/// inside half the analyticity strip. Cached per parameter set.
inline double contour_offset(const GtsParams& p) {
  static std::mutex mu;
  static std::map<std::array<double, kNumParams>, double> cache;
  const auto key = p.to_array();
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double k = cumulants(p, 1)(1);
  const double q = std::min(std::abs(optimize_q(p, k).q), 0.5 * std::min(p.lambda_plus, p.lambda_minus));
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, q);
  return q;
}

// ---------------------------------------------------------------- AVaR

/// Lower tail (alpha < 1/2): VaR_a + (1/a) E[(X - VaR_a)^-].
/// Upper tail (confidence c > 1/2): VaR_c + (1/(1-c)) E[(X - VaR_c)^+].
inline RiskReport avar(const GtsParams& p, const DensityTable& t, double level, Tail side,
                       std::optional<double> q = std::nullopt) {
  detail::check_level(level, "avar");
  if (side == Tail::kLower && !(level < 0.5)) throw DomainError("avar: lower-tail level must be below 1/2");
  if (side == Tail::kUpper && !(level > 0.5)) throw DomainError("avar: upper-tail confidence must exceed 1/2");
  RiskReport r;
  r.level = level;
  r.side = side;
  r.q_used = q.value_or(contour_offset(p));
  r.var = var(t, level);
  if (side == Tail::kLower) {
    r.avar = r.var + tail_payoff_fourier(p, r.var, r.q_used, Payoff::kPut) / level;
  } else {
    r.avar = r.var + tail_payoff_fourier(p, r.var, r.q_used, Payoff::kCall) / (1.0 - level);
  }
  return r;
}

/// Lower-tail alphas of the VaR/AVaR tables: 0.5%, 1%, 2%, ..., 10%.
inline std::vector<double> default_lower_levels() {
  std::vector<double> v{0.005};
  for (int i = 1; i <= 10; ++i) v.push_back(i / 100.0);
  return v;
}

/// Upper-tail confidences: 90%, 91%, ..., 99%, 99.5%.
inline std::vector<double> default_upper_levels() {
  std::vector<double> v;
  for (int i = 90; i <= 99; ++i) v.push_back(i / 100.0);
  v.push_back(0.995);
  return v;
}

/// Percent values, 17 significant digits; empirical columns blank when absent.
inline void write_risk_csv(std::ostream& os, const std::vector<RiskReport>& rows) {
  os << "side,level,empirical_var,var,empirical_avar,avar,q\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << tail_name(r.side) << ',' << r.level << ',';
    if (r.empirical_var) os << *r.empirical_var;
    os << ',' << r.var << ',';
    if (r.empirical_avar) os << *r.empirical_avar;
    os << ',' << r.avar << ',' << r.q_used << '\n';
  }
}

}  // namespace gts
