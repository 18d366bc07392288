#pragma once

// Generalized Tempered Stable distribution: parameters, Levy measure,
// characteristic exponent with analytic parameter derivatives, cumulants.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gts/error.hpp"
#include "gts/special.hpp"

namespace gts {

using cplx = std::complex<double>;

inline constexpr std::size_t kNumParams = 7;

/// Position of each parameter inside the flat vector V.
enum class Param : std::size_t {
  kMu = 0,
  kBetaPlus = 1,
  kBetaMinus = 2,
  kAlphaPlus = 3,
  kAlphaMinus = 4,
  kLambdaPlus = 5,
  kLambdaMinus = 6,
};

inline constexpr std::array<std::string_view, kNumParams> kParamNames = {
    "mu", "beta_plus", "beta_minus", "alpha_plus", "alpha_minus", "lambda_plus", "lambda_minus"};

/// Seven-parameter GTS law. Returns, mu and 1/lambda are in percent units.
struct GtsParams {
  double mu = 0.0;
  double beta_plus = 0.5;
  double beta_minus = 0.5;
  double alpha_plus = 1.0;
  double alpha_minus = 1.0;
  double lambda_plus = 1.0;
  double lambda_minus = 1.0;

  std::array<double, kNumParams> to_array() const {
    return {mu, beta_plus, beta_minus, alpha_plus, alpha_minus, lambda_plus, lambda_minus};
  }

  static GtsParams from_array(const std::array<double, kNumParams>& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
  }

  double operator[](Param p) const { return to_array()[static_cast<std::size_t>(p)]; }

  bool operator==(const GtsParams&) const = default;
};

/// Mirror image: the law of -X. Swaps the tails and negates mu.
inline GtsParams mirrored(const GtsParams& p) {
  return {-p.mu, p.beta_minus, p.beta_plus, p.alpha_minus, p.alpha_plus, p.lambda_minus,
          p.lambda_plus};
}

/// Throws DomainError naming the first parameter outside its open domain:
/// 0 < beta < 1, alpha > 0, lambda > 0, everything finite.
inline void validate(const GtsParams& p) {
  const auto v = p.to_array();
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (!std::isfinite(v[i])) {
      throw DomainError(std::string(kParamNames[i]) + " is not finite");
    }
  }
  auto open_unit = [](double b, std::string_view name) {
    if (!(b > 0.0 && b < 1.0)) {
      throw DomainError(std::string(name) + " = " + std::to_string(b) + " outside (0, 1)");
    }
  };
  auto positive = [](double x, std::string_view name) {
    if (!(x > 0.0)) {
      throw DomainError(std::string(name) + " = " + std::to_string(x) + " must be > 0");
    }
  };
  open_unit(p.beta_plus, "beta_plus");
  open_unit(p.beta_minus, "beta_minus");
  positive(p.alpha_plus, "alpha_plus");
  positive(p.alpha_minus, "alpha_minus");
  positive(p.lambda_plus, "lambda_plus");
  positive(p.lambda_minus, "lambda_minus");
}

inline bool is_valid(const GtsParams& p) {
  try {
    validate(p);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

/// Levy density: alpha e^{-lambda |x|} / |x|^{1+beta} on each half-line.
inline double levy_density(const GtsParams& p, double x) {
  if (x == 0.0) throw DomainError("levy_density: non-integrable pole at x = 0");
  if (x > 0.0) return p.alpha_plus * std::exp(-p.lambda_plus * x) / std::pow(x, 1.0 + p.beta_plus);
  const double ax = -x;
  return p.alpha_minus * std::exp(-p.lambda_minus * ax) / std::pow(ax, 1.0 + p.beta_minus);
}

enum class Activity { kFiniteActivity, kInfiniteActivity };

/// Infinite activity as soon as either stability index is non-negative.
inline Activity activity_class(const GtsParams& p) {
  return (p.beta_plus >= 0.0 || p.beta_minus >= 0.0) ? Activity::kInfiniteActivity
                                                     : Activity::kFiniteActivity;
}

using ParamGrad = std::array<cplx, kNumParams>;
using ParamHess = std::array<std::array<cplx, kNumParams>, kNumParams>;

/// Evaluates the characteristic exponent Psi and the Fourier transform
/// F(xi) = exp(Psi(-xi)) together with their first and second derivatives
/// in the parameters. Parameter-only factors (Gamma(-beta), digamma,
/// trigamma, lambda^beta) are cached at construction.
class CharacteristicFunction {
 public:
  explicit CharacteristicFunction(const GtsParams& p) : p_(p) {
    validate(p);
    plus_ = Tail(p.alpha_plus, p.beta_plus, p.lambda_plus);
    minus_ = Tail(p.alpha_minus, p.beta_minus, p.lambda_minus);
  }

  const GtsParams& params() const { return p_; }

  /// Psi(zeta) for complex zeta. Throws DomainError if zeta leaves the strip
  /// -lambda_minus < Im(zeta) < lambda_plus where the principal branch applies.
  cplx exponent(cplx zeta) const {
    const cplx i{0.0, 1.0};
    const cplx up = p_.lambda_plus - i * zeta;
    const cplx um = p_.lambda_minus + i * zeta;
    check_branch(up, um);
    return i * p_.mu * zeta + plus_.value(up) + minus_.value(um);
  }

  /// F(xi) = exp(Psi(-xi)).
  cplx value(double xi) const { return std::exp(exponent(cplx{-xi, 0.0})); }

  /// dF/dV_j at real xi.
  ParamGrad gradient(double xi) const {
    ParamGrad g{};
    const cplx f = value(xi);
    const auto d = exponent_gradient(cplx{-xi, 0.0});
    for (std::size_t j = 0; j < kNumParams; ++j) g[j] = f * d[j];
    return g;
  }

  /// d2F/dV_k dV_j at real xi. Symmetric.
  ParamHess hessian(double xi) const {
    const cplx zeta{-xi, 0.0};
    const cplx f = value(xi);
    const auto d1 = exponent_gradient(zeta);
    const auto d2 = exponent_hessian(zeta);
    ParamHess h{};
    for (std::size_t k = 0; k < kNumParams; ++k) {
      for (std::size_t j = k; j < kNumParams; ++j) {
        h[k][j] = f * (d1[k] * d1[j] + d2[k][j]);
        h[j][k] = h[k][j];
      }
    }
    return h;
  }

  /// dPsi/dV_j at complex zeta.
  ParamGrad exponent_gradient(cplx zeta) const {
    const cplx i{0.0, 1.0};
    const cplx up = p_.lambda_plus - i * zeta;
    const cplx um = p_.lambda_minus + i * zeta;
    check_branch(up, um);
    const auto tp = plus_.derivatives(up);
    const auto tm = minus_.derivatives(um);
    ParamGrad g{};
    g[0] = i * zeta;
    g[1] = tp.d_beta;
    g[2] = tm.d_beta;
    g[3] = tp.d_alpha;
    g[4] = tm.d_alpha;
    g[5] = tp.d_lambda;
    g[6] = tm.d_lambda;
    return g;
  }

  /// d2Psi/dV_k dV_j at complex zeta. The tails are additively separable, so
  /// all cross-tail entries and everything involving mu vanish.
  ParamHess exponent_hessian(cplx zeta) const {
    const cplx i{0.0, 1.0};
    const cplx up = p_.lambda_plus - i * zeta;
    const cplx um = p_.lambda_minus + i * zeta;
    check_branch(up, um);
    ParamHess h{};
    auto fill = [&h](const TailDerivatives& t, std::size_t ib, std::size_t ia, std::size_t il) {
      h[ib][ib] = t.d_beta_beta;
      h[ib][ia] = h[ia][ib] = t.d_alpha_beta;
      h[ib][il] = h[il][ib] = t.d_beta_lambda;
      h[ia][il] = h[il][ia] = t.d_alpha_lambda;
      h[il][il] = t.d_lambda_lambda;
    };
    fill(plus_.derivatives(up), 1, 3, 5);
    fill(minus_.derivatives(um), 2, 4, 6);
    return h;
  }

 private:
  struct TailDerivatives {
    cplx d_alpha, d_beta, d_lambda;
    cplx d_alpha_beta, d_alpha_lambda, d_beta_beta, d_beta_lambda, d_lambda_lambda;
  };

  // One tail: T(u) = alpha Gamma(-beta) (u^beta - lambda^beta).
  struct Tail {
    double alpha = 0, beta = 0, lambda = 0;
    double g = 0;       // Gamma(-beta)
    double dg = 0;      // d/dbeta Gamma(-beta) = -Gamma(-beta) psi(-beta)
    double d2g = 0;     // Gamma(-beta) (psi^2 + psi')(-beta)
    double lam_b = 0;   // lambda^beta
    double log_lam = 0;

    Tail() = default;
    Tail(double a, double b, double l) : alpha(a), beta(b), lambda(l) {
      g = gamma_fn(-b);
      const double psi = digamma_fn(-b);
      dg = -g * psi;
      d2g = g * (psi * psi + trigamma_fn(-b));
      lam_b = std::pow(l, b);
      log_lam = std::log(l);
    }

    cplx value(cplx u) const { return alpha * g * (std::pow(u, beta) - lam_b); }

    TailDerivatives derivatives(cplx u) const {
      const cplx lu = std::log(u);
      const cplx ub = std::exp(beta * lu);   // u^beta
      const cplx ub1 = ub / u;               // u^(beta-1)
      const cplx ub2 = ub1 / u;              // u^(beta-2)
      const double lb1 = lam_b / lambda;
      const double lb2 = lb1 / lambda;

      const cplx P = ub - lam_b;
      const cplx P_b = ub * lu - lam_b * log_lam;
      const cplx P_bb = ub * lu * lu - lam_b * log_lam * log_lam;
      const cplx P_l = beta * (ub1 - lb1);
      const cplx P_ll = beta * (beta - 1.0) * (ub2 - lb2);
      const cplx P_bl = ub1 * (1.0 + beta * lu) - lb1 * (1.0 + beta * log_lam);

      TailDerivatives t;
      t.d_alpha = g * P;
      t.d_beta = alpha * (dg * P + g * P_b);
      t.d_lambda = alpha * g * P_l;
      t.d_alpha_beta = dg * P + g * P_b;
      t.d_alpha_lambda = g * P_l;
      t.d_beta_beta = alpha * (d2g * P + 2.0 * dg * P_b + g * P_bb);
      t.d_beta_lambda = alpha * (dg * P_l + g * P_bl);
      t.d_lambda_lambda = alpha * g * P_ll;
      return t;
    }
  };

  static void check_branch(cplx up, cplx um) {
    if (!(up.real() > 0.0) || !(um.real() > 0.0)) {
      throw DomainError("char_exponent: argument crosses the principal branch cut");
    }
  }

  GtsParams p_;
  Tail plus_;
  Tail minus_;
};

inline cplx char_exponent(const GtsParams& p, cplx xi) {
  return CharacteristicFunction(p).exponent(xi);
}

inline cplx char_fn(const GtsParams& p, double xi) { return CharacteristicFunction(p).value(xi); }

inline ParamGrad char_fn_grad(const GtsParams& p, double xi) {
  return CharacteristicFunction(p).gradient(xi);
}

inline ParamHess char_fn_hess(const GtsParams& p, double xi) {
  return CharacteristicFunction(p).hessian(xi);
}

/// kappa[k-1] holds the k-th cumulant (percent^k).
struct CumulantSet {
  std::vector<double> kappa;

  double operator()(int k) const { return kappa.at(static_cast<std::size_t>(k - 1)); }
};

inline constexpr int kMaxCumulantOrder = 8;

inline CumulantSet cumulants(const GtsParams& p, int k_max) {
  validate(p);
  if (k_max < 1 || k_max > kMaxCumulantOrder) {
    throw DomainError("cumulants: k_max must lie in [1, 8]");
  }
  auto tail = [](double alpha, double beta, double lambda, int k) {
    return alpha * gamma_fn(k - beta) / std::pow(lambda, k - beta);
  };
  CumulantSet c;
  c.kappa.reserve(static_cast<std::size_t>(k_max));
  c.kappa.push_back(p.mu + tail(p.alpha_plus, p.beta_plus, p.lambda_plus, 1) -
                    tail(p.alpha_minus, p.beta_minus, p.lambda_minus, 1));
  for (int k = 2; k <= k_max; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    c.kappa.push_back(tail(p.alpha_plus, p.beta_plus, p.lambda_plus, k) +
                      sign * tail(p.alpha_minus, p.beta_minus, p.lambda_minus, k));
  }
  return c;
}

struct MomentStats {
  double mean = 0;      // percent
  double std_dev = 0;   // percent
  double cv = 0;
  double skewness = 0;
  double kurtosis = 0;  // 3 + excess
};

/// Throws DomainError when kappa_1 == 0 (CV undefined).
inline MomentStats moment_stats(const GtsParams& p) {
  const auto c = cumulants(p, 4);
  MomentStats m;
  m.mean = c(1);
  m.std_dev = std::sqrt(c(2));
  if (m.mean == 0.0) throw DomainError("moment_stats: coefficient of variation undefined for zero mean");
  m.cv = m.std_dev / m.mean;
  m.skewness = c(3) / std::pow(c(2), 1.5);
  m.kurtosis = 3.0 + c(4) / (c(2) * c(2));
  return m;
}

}  // namespace gts
