#pragma once

// Gamma, digamma and trigamma for real arguments.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "gts/error.hpp"

namespace gts {

namespace detail {

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

inline void check_pole(double x, const char* fn) {
  if (is_nonpositive_integer(x)) {
    throw PoleError(std::string(fn) + ": pole at non-positive integer " + std::to_string(x));
  }
}

// Lanczos coefficients for g = 7, n = 9.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace detail

inline double gamma_fn(double x) {
  using std::numbers::pi;
  detail::check_pole(x, "gamma_fn");
  if (x < 0.5) {
    return pi / (std::sin(pi * x) * gamma_fn(1.0 - x));
  }
  const double z = x - 1.0;
  double sum = detail::kLanczos[0];
  for (std::size_t i = 1; i < detail::kLanczos.size(); ++i) {
    sum += detail::kLanczos[i] / (z + static_cast<double>(i));
  }
  const double t = z + detail::kLanczosG + 0.5;
  // t^(z+0.5) split in two halves keeps the intermediate finite up to x ~ 170.
  const double half = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * pi) * half * (half * std::exp(-t)) * sum;
}

inline double digamma_fn(double x) {
  using std::numbers::pi;
  detail::check_pole(x, "digamma_fn");
  if (x < 0.0) {
    return digamma_fn(1.0 - x) - pi / std::tan(pi * x);
  }
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / (x * x);
  // Bernoulli tail: -sum B_2k / (2k x^2k)
  const double series =
      r * (1.0 / 12 -
           r * (1.0 / 120 -
                r * (1.0 / 252 -
                     r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12.0))))));
  return acc + std::log(x) - 0.5 / x - series;
}

inline double trigamma_fn(double x) {
  using std::numbers::pi;
  detail::check_pole(x, "trigamma_fn");
  if (x < 0.0) {
    const double s = std::sin(pi * x);
    return pi * pi / (s * s) - trigamma_fn(1.0 - x);
  }
  double acc = 0.0;
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double r = inv * inv;
  const double series =
      inv + 0.5 * r +
      inv * r *
          (1.0 / 6 -
           r * (1.0 / 30 -
                r * (1.0 / 42 -
                     r * (1.0 / 30 - r * (5.0 / 66 - r * (691.0 / 2730 - r * 7.0 / 6))))));
  return acc + series;
}

}  // namespace gts
