#pragma once

// Density, CDF and parameter-derivative tables from a Fourier transform.
//
// f(x) = (1/2 pi) * integral exp(i x xi) F(xi) dxi is approximated by the
// composite 12-interval Newton-Cotes rule on the input nodes of a FourierGrid.
// Writing the node index as i = Q p + j and the output index as k = Q l + r,
// the panel-periodic weights split the sum into
//
//   inner:  G_{j,r}(l) = FRFT over p of b_{Qp+j}, parameter -delta Q^2, shift (r+s)/Q
//   outer:  sum_{j=0..Q} W_j exp(2 pi i delta (k+s) j) G_{j,r}(l)
//
// followed by the phase exp(-pi i delta m (k + s - (m-1)/2)) and beta_step/(2 pi).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gts/error.hpp"
#include "gts/frft.hpp"
#include "gts/grid.hpp"
#include "gts/model.hpp"
#include "gts/newton_cotes.hpp"

namespace gts {

/// Reusable two-stage evaluator for one grid.
class InverseFourier {
 public:
  explicit InverseFourier(const FourierGrid& g) : g_(g), bank_(g.n, -g.delta * double(g.Q * g.Q), shifts(g)) {
    const std::size_t m = g.m;
    const double k0 = 0.5 * static_cast<double>(m - 1);
    in_phase_.resize(m + 1);
    for (std::size_t i = 0; i < m + 1; ++i) {
      // exp(i c y_i) * exp(-2 pi i delta k0 i)
      const double ang = g.center * g.y(i);
      in_phase_[i] = cplx{std::cos(ang), std::sin(ang)} *
                     detail::half_turn(-2.0 * g.delta * k0 * static_cast<double>(i));
    }
    out_phase_.resize(m);
    twist_.resize(m);
    const double scale = g.beta_step / (2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < m; ++k) {
      const double ks = static_cast<double>(k) + g.s;
      out_phase_[k] = scale * detail::half_turn(-g.delta * static_cast<double>(m) * (ks - k0));
      twist_[k] = detail::half_turn(2.0 * g.delta * ks);
    }
  }

  const FourierGrid& grid() const { return g_; }

  /// `samples[i]` = F(y_i), i = 0..m. Returns f at the m output nodes.
  std::vector<cplx> operator()(std::span<const cplx> samples) const {
    const std::size_t m = g_.m, n = g_.n, Q = g_.Q;
    if (samples.size() != m + 1) throw GridError("InverseFourier: expected m+1 samples");
    std::vector<cplx> b(m + 1);
    for (std::size_t i = 0; i <= m; ++i) b[i] = samples[i] * in_phase_[i];

    const auto w = newton_cotes_weights();
    std::vector<cplx> acc(m, cplx{});
    std::vector<cplx> seq(n);
    std::vector<std::vector<cplx>> inner;
    std::vector<cplx> pw(m);
    for (std::size_t j = 0; j <= Q; ++j) {
      for (std::size_t p = 0; p < n; ++p) seq[p] = b[Q * p + j];
      bank_.transform_into(seq, inner);
      for (std::size_t k = 0; k < m; ++k) {
        pw[k] = (j == 0) ? cplx{1.0, 0.0} : pw[k] * twist_[k];
        acc[k] += w[j] * pw[k] * inner[k % Q][k / Q];
      }
    }
    for (std::size_t k = 0; k < m; ++k) acc[k] *= out_phase_[k];
    return acc;
  }

  /// Convenience overload evaluating a transform callable on the input nodes.
  std::vector<cplx> operator()(const std::function<cplx(double)>& transform) const {
    std::vector<cplx> s(g_.m + 1);
    for (std::size_t i = 0; i <= g_.m; ++i) s[i] = transform(g_.y(i));
    return (*this)(s);
  }

 private:
  static std::vector<double> shifts(const FourierGrid& g) {
    if (g.m != g.Q * g.n || g.n == 0) throw GridError("InverseFourier: grid requires m = Q n");
    std::vector<double> s(g.Q);
    for (std::size_t r = 0; r < g.Q; ++r) s[r] = (static_cast<double>(r) + g.s) / static_cast<double>(g.Q);
    return s;
  }

  FourierGrid g_;
  FrftBank bank_;
  std::vector<cplx> in_phase_;
  std::vector<cplx> out_phase_;
  std::vector<cplx> twist_;
};

/// One-shot evaluation of (1/2 pi) * integral exp(i x xi) F(xi) dxi on grid outputs.
inline std::vector<cplx> inverse_fourier(const FourierGrid& g, const std::function<cplx(double)>& transform) {
  return InverseFourier(g)(transform);
}

/// exp(i mean xi - sd^2 xi^2 / 2) conjugated to the exp(-i x xi) convention.
inline cplx normal_transform(double mean, double sd, double xi) {
  return std::exp(cplx{-0.5 * sd * sd * xi * xi, -mean * xi});
}

inline double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

enum class DerivativeOrder { kNone = 0, kFirst = 1, kSecond = 2 };

/// Index of (k, j), k <= j, in the packed upper triangle of a 7x7 matrix.
inline constexpr std::size_t packed_index(std::size_t k, std::size_t j) {
  if (k > j) std::swap(k, j);
  return k * kNumParams - k * (k + 1) / 2 + j;
}
inline constexpr std::size_t kPackedSize = kNumParams * (kNumParams + 1) / 2;

struct DensityTable {
  std::vector<double> x;
  std::vector<double> f;
  std::vector<double> F;
  std::array<std::vector<double>, kNumParams> df;  // empty unless requested
  std::vector<std::vector<double>> d2f;            // kPackedSize entries when requested
  double mass = 0;                                 // quadrature mass before CDF renormalization
  GtsParams params;
  FourierGrid grid;

  std::size_t size() const { return x.size(); }
  bool has_first() const { return !df[0].empty(); }
  bool has_second() const { return !d2f.empty(); }
  const std::vector<double>& hess(std::size_t k, std::size_t j) const { return d2f.at(packed_index(k, j)); }
};

namespace detail {

inline constexpr double kImagTol = 1e-8;
inline constexpr double kMassTol = 1e-4;

inline std::vector<double> real_part(const std::vector<cplx>& v, double imag_tol, const char* what) {
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k].real()) || !std::isfinite(v[k].imag())) {
      throw NumericError(std::string("density_table: non-finite value in ") + what);
    }
    if (std::abs(v[k].imag()) > imag_tol) {
      std::ostringstream os;
      os << "density_table: imaginary residue " << v[k].imag() << " in " << what << " at node " << k;
      throw NumericError(os.str());
    }
    out[k] = v[k].real();
  }
  return out;
}

inline double max_abs(const std::vector<cplx>& v) {
  double m = 0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace detail

/// CDF by cumulative Newton-Cotes integration from the left edge, renormalized
/// by the total mass, clamped to [0, 1] and made nondecreasing.
inline std::vector<double> cdf_from_density(std::span<const double> f, double h, double* mass_out = nullptr) {
  auto F = cumulative_integral(f, h);
  const double mass = F.back();
  if (mass_out) *mass_out = mass;
  if (!(std::abs(mass - 1.0) <= detail::kMassTol)) {
    std::ostringstream os;
    os << "density_table: total mass " << mass << " misses 1 by more than 1e-4; enlarge a or m";
    throw GridError(os.str());
  }
  double run = 0.0;
  for (double& v : F) {
    v = std::clamp(v / mass, 0.0, 1.0);
    run = std::max(run, v);
    v = run;
  }
  F.back() = 1.0;
  return F;
}

inline DensityTable density_table(const GtsParams& p, const FourierGrid& g,
                                  DerivativeOrder order = DerivativeOrder::kNone) {
  const CharacteristicFunction cf(p);
  const InverseFourier inv(g);
  const std::size_t m = g.m;

  DensityTable t;
  t.params = p;
  t.grid = g;
  t.x.resize(m);
  for (std::size_t k = 0; k < m; ++k) t.x[k] = g.x(k);

  std::vector<cplx> s0(m + 1);
  const bool first = order != DerivativeOrder::kNone;
  const bool second = order == DerivativeOrder::kSecond;
  std::vector<std::vector<cplx>> s1(first ? kNumParams : 0, std::vector<cplx>(m + 1));
  std::vector<std::vector<cplx>> s2(second ? kPackedSize : 0, std::vector<cplx>(m + 1));

  for (std::size_t i = 0; i <= m; ++i) {
    const double xi = g.y(i);
    const cplx zeta{-xi, 0.0};
    const cplx fv = cf.value(xi);
    s0[i] = fv;
    if (!first) continue;
    const auto d1 = cf.exponent_gradient(zeta);
    for (std::size_t j = 0; j < kNumParams; ++j) s1[j][i] = fv * d1[j];
    if (!second) continue;
    const auto d2 = cf.exponent_hessian(zeta);
    for (std::size_t k = 0; k < kNumParams; ++k) {
      for (std::size_t j = k; j < kNumParams; ++j) s2[packed_index(k, j)][i] = fv * (d1[k] * d1[j] + d2[k][j]);
    }
  }

  t.f = detail::real_part(inv(s0), detail::kImagTol, "f");
  t.F = cdf_from_density(t.f, g.gamma_step, &t.mass);
  // Derivative tables can be orders of magnitude larger than f; the residue
  // check is scaled accordingly.
  for (std::size_t j = 0; j < s1.size(); ++j) {
    const auto v = inv(s1[j]);
    t.df[j] = detail::real_part(v, detail::kImagTol * std::max(1.0, detail::max_abs(v)), "df");
  }
  t.d2f.resize(s2.size());
  for (std::size_t j = 0; j < s2.size(); ++j) {
    const auto v = inv(s2[j]);
    t.d2f[j] = detail::real_part(v, detail::kImagTol * std::max(1.0, detail::max_abs(v)), "d2f");
  }
  return t;
}

inline DensityTable density_table(const GtsParams& p, std::size_t m_target = 8192,
                                  DerivativeOrder order = DerivativeOrder::kNone) {
  return density_table(p, choose_grid(p, m_target), order);
}

/// Composite Newton-Cotes integral of f over the table (the same rule as the CDF).
inline double table_mass(const DensityTable& t) { return cumulative_integral(t.f, t.grid.gamma_step).back(); }

namespace detail {

inline void check_span(const DensityTable& t, double x, const char* fn) {
  if (t.x.size() < 4) throw GridError(std::string(fn) + ": table too small");
  if (!(x >= t.x.front() && x <= t.x.back())) {
    std::ostringstream os;
    os << fn << ": x = " << x << " outside table span [" << t.x.front() << ", " << t.x.back() << "]";
    throw SpanError(os.str());
  }
}

/// Four-point Lagrange stencil around x: first index and weights.
struct Stencil {
  std::size_t start = 0;
  std::array<double, 4> w{};
};

/// Fractional node index of x; snapped to the node when rounding is all that
/// separates them, so evaluation at a node returns the stored value.
inline double node_position(const DensityTable& t, double x) {
  const double u = (x - t.x.front()) / t.grid.gamma_step;
  const double r = std::round(u);
  return std::abs(u - r) < 1e-9 ? r : u;
}

inline Stencil lagrange4(const DensityTable& t, double x) {
  const double u = node_position(t, x);
  const std::size_t last = t.x.size() - 1;
  std::size_t i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(last)));
  std::size_t start = (i >= 1) ? i - 1 : 0;
  start = std::min(start, last - 3);
  Stencil s;
  s.start = start;
  const double v = u - static_cast<double>(start);  // nodes at 0,1,2,3
  for (std::size_t a = 0; a < 4; ++a) {
    double w = 1.0;
    for (std::size_t b = 0; b < 4; ++b) {
      if (a != b) w *= (v - static_cast<double>(b)) / (static_cast<double>(a) - static_cast<double>(b));
    }
    s.w[a] = w;
  }
  return s;
}

inline double apply(const Stencil& s, const std::vector<double>& y) {
  return s.w[0] * y[s.start] + s.w[1] * y[s.start + 1] + s.w[2] * y[s.start + 2] + s.w[3] * y[s.start + 3];
}

}  // namespace detail

/// f(x) by four-point Lagrange interpolation of the table.
inline double density_at(const DensityTable& t, double x) {
  detail::check_span(t, x, "density_at");
  return detail::apply(detail::lagrange4(t, x), t.f);
}

/// F(x) by cubic Hermite interpolation of the stored CDF using the density as
/// slope, with the Fritsch-Carlson limiter so the result is monotone between nodes.
inline double cdf_at(const DensityTable& t, double x) {
  detail::check_span(t, x, "cdf_at");
  const double h = t.grid.gamma_step;
  const std::size_t last = t.x.size() - 1;
  const double u = detail::node_position(t, x);
  std::size_t i = static_cast<std::size_t>(std::floor(u));
  if (i >= last) return t.F[last];
  const double y = u - static_cast<double>(i);
  if (y == 0.0) return t.F[i];
  const double f0 = t.F[i], f1 = t.F[i + 1];
  const double d = f1 - f0;
  double m0 = std::max(t.f[i], 0.0) * h;
  double m1 = std::max(t.f[i + 1], 0.0) * h;
  if (d <= 0.0) {
    m0 = m1 = 0.0;
  } else {
    const double a = m0 / d, b = m1 / d;
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      m0 = tau * a * d;
      m1 = tau * b * d;
    }
  }
  const double y2 = y * y, y3 = y2 * y;
  const double v = (2 * y3 - 3 * y2 + 1) * f0 + (y3 - 2 * y2 + y) * m0 + (-2 * y3 + 3 * y2) * f1 + (y3 - y2) * m1;
  return std::clamp(v, f0, f1);
}

/// CSV with header x,f,F,df_mu,...,df_lambda_minus (derivative columns only
/// when present), 17 significant digits.
inline void write_density_csv(std::ostream& os, const DensityTable& t,
                              const std::vector<std::pair<std::string, std::vector<double>>>& extra = {}) {
  os << "x,f,F";
  const bool d = t.has_first();
  if (d) {
    for (auto name : kParamNames) os << ",df_" << name;
  }
  for (const auto& [name, col] : extra) os << ',' << name;
  os << '\n';
  os << std::setprecision(17);
  for (std::size_t k = 0; k < t.size(); ++k) {
    os << t.x[k] << ',' << t.f[k] << ',' << t.F[k];
    if (d) {
      for (std::size_t j = 0; j < kNumParams; ++j) os << ',' << t.df[j][k];
    }
    for (const auto& [name, col] : extra) os << ',' << col.at(k);
    os << '\n';
  }
}

}  // namespace gts
