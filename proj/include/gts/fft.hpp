#pragma once

// Thin RAII wrapper over FFTW for in-place complex transforms.
// Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED so they can be executed
// on any std::vector<std::complex<double>> buffer through the new-array API,
// which FFTW documents as safe to call concurrently. Plan creation is not.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace gts {

class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("FftPlan: empty length");
    std::vector<std::complex<double>> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_BACKWARD, flags);
    if (fwd_ == nullptr || bwd_ == nullptr) throw std::runtime_error("FftPlan: planning failed");
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& o) noexcept : n_(o.n_), fwd_(o.fwd_), bwd_(o.bwd_) {
    o.fwd_ = nullptr;
    o.bwd_ = nullptr;
  }
  ~FftPlan() {
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
  }

  std::size_t size() const { return n_; }

  /// X_k = sum_j x_j exp(-2 pi i jk/n), in place.
  void forward(std::span<std::complex<double>> x) const { exec(fwd_, x); }

  /// Unnormalized inverse: x_j = sum_k X_k exp(+2 pi i jk/n), in place.
  void backward(std::span<std::complex<double>> x) const { exec(bwd_, x); }

 private:
  void exec(fftw_plan plan, std::span<std::complex<double>> x) const {
    if (x.size() != n_) throw std::invalid_argument("FftPlan: length mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(plan, p, p);
  }

  std::size_t n_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace gts
