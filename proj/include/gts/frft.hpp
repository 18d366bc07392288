#pragma once

// Fractional Fourier transform
//
//   G_{k+s}(x, delta) = sum_{j=0}^{m-1} x_j exp(-2 pi i j (k+s) delta),   0 <= k < m
//
// via 2j(k+s) = j^2 + (k+s)^2 - (k+s-j)^2, which turns the sum into a circular
// convolution of length L = bit_ceil(2m). A bank shares the pre-chirped input
// transform across several shifts s, so each extra shift costs one inverse FFT.

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "gts/fft.hpp"

namespace gts {

namespace detail {

/// exp(i pi t); t is reduced modulo 2 first so large arguments keep their phase.
inline std::complex<double> half_turn(double t) {
  const double r = std::fmod(t, 2.0);
  const double ang = std::numbers::pi * r;
  return {std::cos(ang), std::sin(ang)};
}

}  // namespace detail

class FrftBank {
 public:
  FrftBank(std::size_t m, double delta, std::vector<double> shifts)
      : m_(m), delta_(delta), shifts_(std::move(shifts)), fft_(std::bit_ceil(2 * (m ? m : 1))),
        pre_(m) {
    const std::size_t len = fft_.size();
    for (std::size_t j = 0; j < m; ++j) {
      const double jd = static_cast<double>(j);
      pre_[j] = detail::half_turn(-jd * jd * delta);
    }
    chirp_hat_.reserve(shifts_.size());
    post_.reserve(shifts_.size());
    for (double s : shifts_) {
      std::vector<std::complex<double>> z(len);
      for (std::size_t t = 0; t < m; ++t) {
        const double ts = static_cast<double>(t) + s;
        z[t] = detail::half_turn(ts * ts * delta);
      }
      for (std::size_t t = 1; t < m; ++t) {
        const double ts = s - static_cast<double>(t);
        z[len - t] = detail::half_turn(ts * ts * delta);
      }
      fft_.forward(z);
      // fold the 1/L of the inverse transform into the chirp spectrum
      const double scale = 1.0 / static_cast<double>(len);
      for (auto& v : z) v *= scale;
      chirp_hat_.push_back(std::move(z));

      std::vector<std::complex<double>> post(m);
      for (std::size_t k = 0; k < m; ++k) {
        const double ks = static_cast<double>(k) + s;
        post[k] = detail::half_turn(-ks * ks * delta);
      }
      post_.push_back(std::move(post));
    }
  }

  std::size_t size() const { return m_; }
  double delta() const { return delta_; }
  const std::vector<double>& shifts() const { return shifts_; }

  /// One output sequence per shift, in the order the shifts were given.
  /// Inputs shorter than m are zero padded.
  std::vector<std::vector<std::complex<double>>> transform(
      std::span<const std::complex<double>> x) const {
    std::vector<std::vector<std::complex<double>>> out(shifts_.size());
    transform_into(x, out);
    return out;
  }

  void transform_into(std::span<const std::complex<double>> x,
                      std::vector<std::vector<std::complex<double>>>& out) const {
    const std::size_t len = fft_.size();
    std::vector<std::complex<double>> spec(len);
    const std::size_t count = std::min(x.size(), m_);
    for (std::size_t j = 0; j < count; ++j) spec[j] = x[j] * pre_[j];
    fft_.forward(spec);
    out.resize(shifts_.size());
    std::vector<std::complex<double>> work(len);
    for (std::size_t si = 0; si < shifts_.size(); ++si) {
      const auto& ch = chirp_hat_[si];
      for (std::size_t i = 0; i < len; ++i) work[i] = spec[i] * ch[i];
      fft_.backward(work);
      auto& o = out[si];
      o.resize(m_);
      const auto& post = post_[si];
      for (std::size_t k = 0; k < m_; ++k) o[k] = work[k] * post[k];
    }
  }

 private:
  std::size_t m_;
  double delta_;
  std::vector<double> shifts_;
  FftPlan fft_;
  std::vector<std::complex<double>> pre_;
  std::vector<std::vector<std::complex<double>>> chirp_hat_;
  std::vector<std::vector<std::complex<double>>> post_;
};

/// Single-shift plan; reusable across inputs of the same length.
class FrftPlan {
 public:
  FrftPlan(std::size_t m, double delta, double s = 0.0) : bank_(m, delta, {s}) {}
  std::size_t size() const { return bank_.size(); }
  std::vector<std::complex<double>> operator()(std::span<const std::complex<double>> x) const {
    return std::move(bank_.transform(x).front());
  }

 private:
  FrftBank bank_;
};

/// One-shot fractional Fourier transform of `seq` (m = seq.size()).
inline std::vector<std::complex<double>> frft(std::span<const std::complex<double>> seq,
                                              double delta, double s = 0.0) {
  if (seq.empty()) return {};
  return FrftPlan(seq.size(), delta, s)(seq);
}

}  // namespace gts
