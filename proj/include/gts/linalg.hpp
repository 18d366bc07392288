#pragma once

// Small dense symmetric matrices: LDL^T solve with Bunch-Kaufman pivoting and
// cyclic Jacobi eigenvalues. Sized for the 7x7 likelihood Hessian.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>

#include "gts/error.hpp"

namespace gts {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
using Mat = std::array<std::array<double, N>, N>;

/// Symmetric N x N matrix. Entries (i,j) and (j,i) are always identical.
template <std::size_t N>
class SymMatrix {
 public:
  SymMatrix() : a_{} {}

  /// Symmetrizes `full` as (A + A^T) / 2.
  explicit SymMatrix(const Mat<N>& full) : a_{} {
    for (std::size_t i = 0; i < N; ++i) {
      a_[i][i] = full[i][i];
      for (std::size_t j = 0; j < i; ++j) {
        const double v = 0.5 * (full[i][j] + full[j][i]);
        a_[i][j] = v;
        a_[j][i] = v;
      }
    }
  }

  static SymMatrix identity() {
    SymMatrix m;
    for (std::size_t i = 0; i < N; ++i) m.a_[i][i] = 1.0;
    return m;
  }

  static SymMatrix diagonal(const Vec<N>& d) {
    SymMatrix m;
    for (std::size_t i = 0; i < N; ++i) m.a_[i][i] = d[i];
    return m;
  }

  static constexpr std::size_t size() { return N; }

  double operator()(std::size_t i, std::size_t j) const { return a_[i][j]; }

  void set(std::size_t i, std::size_t j, double v) {
    a_[i][j] = v;
    a_[j][i] = v;
  }

  const Mat<N>& data() const { return a_; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& row : a_)
      for (double v : row) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (const auto& row : a_)
      for (double v : row) s += v * v;
    return std::sqrt(s);
  }

  double trace() const {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += a_[i][i];
    return s;
  }

  Vec<N> operator*(const Vec<N>& x) const {
    Vec<N> y{};
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < N; ++j) s += a_[i][j] * x[j];
      y[i] = s;
    }
    return y;
  }

 private:
  Mat<N> a_;
};

using SymMatrix7 = SymMatrix<7>;
using Vec7 = Vec<7>;

namespace detail {

// P A P^T = L D L^T with D block diagonal (1x1 and 2x2 blocks).
template <std::size_t N>
struct LdltFactor {
  Mat<N> l{};
  Mat<N> d{};                       // only the block-diagonal part is populated
  std::array<std::size_t, N> perm{};  // row i of P A P^T is row perm[i] of A
  std::array<int, N> block{};       // 1 or 2 at the first index of each block, 0 inside a 2x2
};

template <std::size_t N>
LdltFactor<N> bunch_kaufman(const SymMatrix<N>& m) {
  constexpr double kAlpha = 0.6403882032022076;  // (1 + sqrt(17)) / 8
  const double tiny = 1e-14 * m.max_abs();
  if (m.max_abs() == 0.0) throw SingularMatrixError("solve_sym: zero matrix");

  LdltFactor<N> f;
  Mat<N> a = m.data();
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < N; ++i) f.l[i][i] = 1.0;

  auto sym_swap = [&](std::size_t p, std::size_t q) {
    if (p == q) return;
    std::swap(a[p], a[q]);
    for (auto& row : a) std::swap(row[p], row[q]);
    std::swap(f.perm[p], f.perm[q]);
    // Already-computed columns of L follow the row permutation.
    for (std::size_t c = 0; c < std::min(p, q); ++c) std::swap(f.l[p][c], f.l[q][c]);
  };

  std::size_t k = 0;
  while (k < N) {
    double lambda = 0.0;
    std::size_t r = k;
    for (std::size_t i = k + 1; i < N; ++i) {
      if (std::abs(a[i][k]) > lambda) {
        lambda = std::abs(a[i][k]);
        r = i;
      }
    }
    int step = 1;
    if (std::abs(a[k][k]) < kAlpha * lambda) {
      double sigma = 0.0;
      for (std::size_t j = k; j < N; ++j) {
        if (j != r) sigma = std::max(sigma, std::abs(a[r][j]));
      }
      if (std::abs(a[k][k]) * sigma >= kAlpha * lambda * lambda) {
        step = 1;
      } else if (std::abs(a[r][r]) >= kAlpha * sigma) {
        sym_swap(k, r);
        step = 1;
      } else {
        sym_swap(k + 1, r);
        step = 2;
      }
    }

    if (step == 1) {
      const double piv = a[k][k];
      if (std::abs(piv) < tiny) {
        throw SingularMatrixError("solve_sym: pivot " + std::to_string(piv) + " below threshold");
      }
      f.d[k][k] = piv;
      f.block[k] = 1;
      for (std::size_t i = k + 1; i < N; ++i) f.l[i][k] = a[i][k] / piv;
      for (std::size_t i = k + 1; i < N; ++i) {
        for (std::size_t j = k + 1; j < N; ++j) a[i][j] -= f.l[i][k] * piv * f.l[j][k];
      }
      k += 1;
    } else {
      const double e11 = a[k][k], e12 = a[k + 1][k], e22 = a[k + 1][k + 1];
      const double det = e11 * e22 - e12 * e12;
      if (std::abs(det) < tiny * std::max({std::abs(e11), std::abs(e12), std::abs(e22)})) {
        throw SingularMatrixError("solve_sym: singular 2x2 pivot block");
      }
      const double i11 = e22 / det, i12 = -e12 / det, i22 = e11 / det;
      f.d[k][k] = e11;
      f.d[k][k + 1] = e12;
      f.d[k + 1][k] = e12;
      f.d[k + 1][k + 1] = e22;
      f.block[k] = 2;
      f.block[k + 1] = 0;
      for (std::size_t i = k + 2; i < N; ++i) {
        f.l[i][k] = a[i][k] * i11 + a[i][k + 1] * i12;
        f.l[i][k + 1] = a[i][k] * i12 + a[i][k + 1] * i22;
      }
      for (std::size_t i = k + 2; i < N; ++i) {
        for (std::size_t j = k + 2; j < N; ++j) {
          a[i][j] -= f.l[i][k] * a[j][k] + f.l[i][k + 1] * a[j][k + 1];
        }
      }
      k += 2;
    }
  }
  return f;
}

template <std::size_t N>
Vec<N> ldlt_apply_inverse(const LdltFactor<N>& f, const Vec<N>& b) {
  Vec<N> y{};
  for (std::size_t i = 0; i < N; ++i) y[i] = b[f.perm[i]];
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < i; ++j) y[i] -= f.l[i][j] * y[j];
  }
  for (std::size_t i = 0; i < N;) {
    if (f.block[i] == 1) {
      y[i] /= f.d[i][i];
      i += 1;
    } else {
      const double e11 = f.d[i][i], e12 = f.d[i + 1][i], e22 = f.d[i + 1][i + 1];
      const double det = e11 * e22 - e12 * e12;
      const double y0 = y[i], y1 = y[i + 1];
      y[i] = (e22 * y0 - e12 * y1) / det;
      y[i + 1] = (e11 * y1 - e12 * y0) / det;
      i += 2;
    }
  }
  for (std::size_t ii = N; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < N; ++j) y[ii] -= f.l[j][ii] * y[j];
  }
  Vec<N> x{};
  for (std::size_t i = 0; i < N; ++i) x[f.perm[i]] = y[i];
  return x;
}

}  // namespace detail

/// Solves A x = b by LDL^T with symmetric Bunch-Kaufman pivoting followed by
/// one step of iterative refinement. Throws SingularMatrixError when a pivot
/// falls below 1e-14 * max|A|.
template <std::size_t N>
Vec<N> solve_sym(const SymMatrix<N>& a, const Vec<N>& b) {
  const auto f = detail::bunch_kaufman(a);
  Vec<N> x = detail::ldlt_apply_inverse(f, b);
  const Vec<N> ax = a * x;
  Vec<N> r{};
  for (std::size_t i = 0; i < N; ++i) r[i] = b[i] - ax[i];
  const Vec<N> dx = detail::ldlt_apply_inverse(f, r);
  for (std::size_t i = 0; i < N; ++i) x[i] += dx[i];
  return x;
}

struct EigenResult {
  int sweeps = 0;
  double off_diagonal = 0.0;  // max |off-diagonal| at exit
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// descending. Throws ConvergenceError after 100 sweeps.
template <std::size_t N>
Vec<N> eigen_sym(const SymMatrix<N>& m, EigenResult* info = nullptr) {
  Mat<N> a = m.data();
  const double norm = m.frobenius();
  const double target = 1e-12 * norm;
  auto max_off = [&] {
    double o = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) o = std::max(o, std::abs(a[i][j]));
    return o;
  };

  int sweep = 0;
  double off = max_off();
  while (off > target) {
    if (++sweep > 100) {
      throw ConvergenceError("eigen_sym: no convergence after 100 sweeps");
    }
    for (std::size_t p = 0; p + 1 < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const double apq = a[p][q];
        if (apq == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        a[p][q] = 0.0;
        a[q][p] = 0.0;
      }
    }
    off = max_off();
  }
  if (info != nullptr) {
    info->sweeps = sweep;
    info->off_diagonal = off;
  }
  Vec<N> ev{};
  for (std::size_t i = 0; i < N; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

}  // namespace gts
