#pragma once

// Maximum likelihood for GTS parameters by Newton-Raphson on the tabulated
// density. Log-likelihood, score and observed Hessian are all read from one
// DensityTable through the same 4-point interpolation, so on a fixed grid the
// score and Hessian are exact derivatives of the discretized log-likelihood.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gts/density.hpp"
#include "gts/error.hpp"
#include "gts/grid.hpp"
#include "gts/linalg.hpp"
#include "gts/model.hpp"
#include "gts/special.hpp"

namespace gts {

inline constexpr double kDensityFloor = 1e-300;
inline constexpr double kBoundMargin = 1e-8;

struct FitOptions {
  int max_iter = 100;
  double grad_tol = 1e-6;   // on the Euclidean norm of the score
  int step_damping = 50;    // maximum number of step halvings
  std::size_t grid_m = 8192;
  double coverage = 40.0;   // initial output span in standard deviations
};

struct FitTraceRow {
  int iteration = 0;
  GtsParams params;
  double log_ml = 0;
  double grad_norm = 0;
  double max_eigenvalue = 0;
  double damping = 0;  // step fraction accepted after this row; 0 on the final row
};

struct FitTrace {
  std::vector<FitTraceRow> rows;
};

enum class FitStatus { kConverged, kMaxIter };

struct FitResult {
  GtsParams params;
  FitTrace trace;
  FitStatus status = FitStatus::kMaxIter;
  Vec7 score{};
  SymMatrix7 hessian;
  FourierGrid grid;
};

/// Raised when a fit cannot continue; carries the trace accumulated so far.
class FitError : public Error {
 public:
  FitError(const std::string& what, FitTrace trace) : Error(what), trace_(std::move(trace)) {}
  const FitTrace& trace() const { return trace_; }

 private:
  FitTrace trace_;
};

struct LikelihoodValue {
  double loglik = 0;
  Vec7 score{};
  SymMatrix7 hessian;
};

/// True when every observation lies inside the output span of g.
inline bool covers(const FourierGrid& g, std::span<const double> x) {
  if (x.empty()) return true;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *lo >= g.x_min() && *hi <= g.x_max();
}

/// Grid for likelihood work: choose_grid, with one coverage doubling when
/// observations fall outside the span.
inline FourierGrid likelihood_grid(const GtsParams& p, std::span<const double> x, std::size_t grid_m,
                                   double coverage = 40.0) {
  GridOptions opt;
  opt.coverage = coverage;
  FourierGrid g = choose_grid(p, grid_m, opt);
  if (covers(g, x)) return g;
  opt.coverage *= 2.0;
  g = choose_grid(p, grid_m, opt);
  if (covers(g, x)) return g;
  std::ostringstream os;
  os << "likelihood: observations outside the density span [" << g.x_min() << ", " << g.x_max()
     << "] even after doubling the coverage";
  throw SpanError(os.str());
}

/// Log-likelihood and, on request, score and observed Hessian on a fixed grid.
inline LikelihoodValue evaluate_likelihood(std::span<const double> x, const GtsParams& p, const FourierGrid& g,
                                           DerivativeOrder order) {
  if (x.empty()) throw DomainError("loglik: empty sample");
  if (!covers(g, x)) throw SpanError("loglik: observations outside the density-table span");
  const DensityTable t = density_table(p, g, order);
  LikelihoodValue out;
  Mat<kNumParams> h{};
  std::array<double, kNumParams> d1{};
  for (double xi : x) {
    const auto s = detail::lagrange4(t, xi);
    const double f = std::max(detail::apply(s, t.f), kDensityFloor);
    out.loglik += std::log(f);
    if (order == DerivativeOrder::kNone) continue;
    for (std::size_t j = 0; j < kNumParams; ++j) {
      d1[j] = detail::apply(s, t.df[j]) / f;
      out.score[j] += d1[j];
    }
    if (order != DerivativeOrder::kSecond) continue;
    for (std::size_t k = 0; k < kNumParams; ++k) {
      for (std::size_t j = k; j < kNumParams; ++j) {
        h[k][j] += detail::apply(s, t.hess(k, j)) / f - d1[k] * d1[j];
      }
    }
  }
  if (!std::isfinite(out.loglik)) throw NumericError("loglik: non-finite log-likelihood");
  if (order == DerivativeOrder::kSecond) {
    for (std::size_t k = 0; k < kNumParams; ++k)
      for (std::size_t j = 0; j < k; ++j) h[k][j] = h[j][k];
    out.hessian = SymMatrix7(h);
  }
  return out;
}

/// sum_j log f(x_j) with f interpolated from a density table on choose_grid(p, grid_m).
inline double loglik(std::span<const double> x, const GtsParams& p, std::size_t grid_m = 8192) {
  return evaluate_likelihood(x, p, likelihood_grid(p, x, grid_m), DerivativeOrder::kNone).loglik;
}

inline Vec7 score(std::span<const double> x, const GtsParams& p, std::size_t grid_m = 8192) {
  return evaluate_likelihood(x, p, likelihood_grid(p, x, grid_m), DerivativeOrder::kFirst).score;
}

inline SymMatrix7 observed_hessian(std::span<const double> x, const GtsParams& p, std::size_t grid_m = 8192) {
  return evaluate_likelihood(x, p, likelihood_grid(p, x, grid_m), DerivativeOrder::kSecond).hessian;
}

inline double norm2(const Vec7& v) {
  double s = 0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

/// Inside the open parameter domain with a 1e-8 margin on every bound.
inline bool within_bounds(const GtsParams& p) {
  const double e = kBoundMargin;
  for (double v : p.to_array())
    if (!std::isfinite(v)) return false;
  return p.beta_plus > e && p.beta_plus < 1 - e && p.beta_minus > e && p.beta_minus < 1 - e &&
         p.alpha_plus > e && p.alpha_minus > e && p.lambda_plus > e && p.lambda_minus > e;
}

/// Starting point: mu = sample mean, beta = 0.5, lambda = 2/sd, alpha from kappa_2.
inline GtsParams default_init(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("default_init: need at least two observations");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double var = ss / (n - 1);
  if (!(var > 0)) throw DomainError("default_init: zero sample variance");
  const double sd = std::sqrt(var);
  GtsParams p;
  p.mu = mean;
  p.beta_plus = p.beta_minus = 0.5;
  p.lambda_plus = p.lambda_minus = 2.0 / sd;
  // kappa_2 = 2 alpha Gamma(2 - beta) / lambda^(2 - beta) with equal tails
  const double lam = p.lambda_plus;
  p.alpha_plus = p.alpha_minus = var * std::pow(lam, 1.5) / (2.0 * gamma_fn(1.5));
  return p;
}

/// Newton direction -H^{-1} g. When H is not negative definite, or the Newton
/// direction is not an ascent direction, a Marquardt shift is applied:
/// (H - tau D) d = -g with D = diag(|H_ii|), tau just beyond the largest
/// eigenvalue of the diagonally scaled Hessian plus the adaptive term `lm`.
/// Returns the shift used (0 for a pure Newton step).
inline double newton_direction(const SymMatrix7& H, const Vec7& g, double max_eig, double lm, Vec7& d) {
  Vec7 rhs{};
  for (std::size_t i = 0; i < kNumParams; ++i) rhs[i] = -g[i];
  if (max_eig < 0.0) {
    d = solve_sym(H, rhs);
    double slope = 0;
    for (std::size_t i = 0; i < kNumParams; ++i) slope += d[i] * g[i];
    if (slope > 0.0) return 0.0;
  }
  Vec7 s{};
  for (std::size_t i = 0; i < kNumParams; ++i) s[i] = 1.0 / std::sqrt(std::max(std::abs(H(i, i)), 1e-12));
  Mat<kNumParams> a{};
  for (std::size_t i = 0; i < kNumParams; ++i)
    for (std::size_t j = 0; j < kNumParams; ++j) a[i][j] = s[i] * H(i, j) * s[j];
  const double mu_max = eigen_sym(SymMatrix7(a))[0];
  const double tau = std::max(mu_max, 0.0) * 1.01 + lm;
  for (std::size_t i = 0; i < kNumParams; ++i) a[i][i] -= tau;
  Vec7 r{};
  for (std::size_t i = 0; i < kNumParams; ++i) r[i] = s[i] * rhs[i];
  const Vec7 z = solve_sym(SymMatrix7(a), r);
  for (std::size_t i = 0; i < kNumParams; ++i) d[i] = s[i] * z[i];
  return tau;
}

/// Largest t <= 1 that moves each bounded parameter at most half of the way
/// to its bound.
inline double max_step_to_bounds(const GtsParams& p, const Vec7& d) {
  const auto v = p.to_array();
  double t = 1.0;
  for (std::size_t i = 1; i < kNumParams; ++i) {
    if (d[i] < 0.0) t = std::min(t, 0.5 * v[i] / -d[i]);
    const bool beta = (i == 1 || i == 2);
    if (beta && d[i] > 0.0) t = std::min(t, 0.5 * (1.0 - v[i]) / d[i]);
  }
  return t;
}

namespace detail {

/// The frozen grid stays usable while the tails still vanish at +-a/2 and the
/// current law still sits well inside the span.
inline bool grid_still_valid(const FourierGrid& g, const GtsParams& p, std::span<const double> x) {
  const CharacteristicFunction cf(p);
  const GridOptions opt;
  if (std::abs(cf.value(0.5 * g.a)) >= opt.tail_tol || std::abs(cf.value(-0.5 * g.a)) >= opt.tail_tol) return false;
  const auto c = cumulants(p, 2);
  const double sd = std::sqrt(c(2));
  if (c(1) - 10.0 * sd < g.x_min() || c(1) + 10.0 * sd > g.x_max()) return false;
  if (g.m < alias_free_m(g.a, 0.5 * opt.coverage * sd)) return false;
  return covers(g, x);
}

}  // namespace detail

/// Newton-Raphson with step halving. Each row records the point, its log ML,
/// the score norm and the largest Hessian eigenvalue; the fit converges when
/// the score norm is at most grad_tol and that eigenvalue is non-positive.
inline FitResult fit(std::span<const double> x, const GtsParams& init, const FitOptions& opt = {}) {
  validate(init);
  if (opt.max_iter <= 0 || !(opt.grad_tol > 0) || opt.step_damping <= 0 || opt.grid_m == 0) {
    throw DomainError("fit: options must be positive");
  }
  FitResult res;
  GtsParams v = init;
  FourierGrid g = likelihood_grid(v, x, opt.grid_m, opt.coverage);
  double lm = 1e-3;  // adaptive part of the Marquardt shift

  for (int it = 1; it <= opt.max_iter; ++it) {
    if (!detail::grid_still_valid(g, v, x)) g = likelihood_grid(v, x, opt.grid_m, opt.coverage);
    LikelihoodValue cur;
    Vec7 ev{};
    try {
      cur = evaluate_likelihood(x, v, g, DerivativeOrder::kSecond);
      ev = eigen_sym(cur.hessian);
    } catch (const Error& e) {
      throw FitError(std::string("fit: ") + e.what(), res.trace);
    }
    FitTraceRow row;
    row.iteration = it;
    row.params = v;
    row.log_ml = cur.loglik;
    row.grad_norm = norm2(cur.score);
    row.max_eigenvalue = ev[0];
    res.params = v;
    res.score = cur.score;
    res.hessian = cur.hessian;
    res.grid = g;

    if (row.grad_norm <= opt.grad_tol && row.max_eigenvalue <= 0.0) {
      res.trace.rows.push_back(row);
      res.status = FitStatus::kConverged;
      return res;
    }

    Vec7 d{};
    double shift = 0.0;
    try {
      shift = newton_direction(cur.hessian, cur.score, ev[0], lm, d);
    } catch (const SingularMatrixError& e) {
      res.trace.rows.push_back(row);
      throw FitError(std::string("fit: ") + e.what(), res.trace);
    }

    // Rounding-level decreases are tolerated so a converging iterate is not
    // rejected on noise.
    const double slack = 1e-11 * std::max(1.0, std::abs(cur.loglik));
    double t = max_step_to_bounds(v, d);
    bool accepted = false;
    GtsParams cand;
    for (int h = 0; h <= opt.step_damping; ++h, t *= 0.5) {
      auto a = v.to_array();
      for (std::size_t i = 0; i < kNumParams; ++i) a[i] += t * d[i];
      cand = GtsParams::from_array(a);
      if (!within_bounds(cand)) continue;
      try {
        const double ll = evaluate_likelihood(x, cand, g, DerivativeOrder::kNone).loglik;
        if (ll >= cur.loglik - slack) {
          accepted = true;
          break;
        }
      } catch (const Error&) {
        // candidate not representable on the frozen grid; shorten the step
      }
    }
    row.damping = accepted ? t : 0.0;
    if (shift > 0.0) lm = (accepted && t == 1.0) ? 0.25 * lm : std::max(4.0 * lm, 1e-3);
    res.trace.rows.push_back(row);
    if (!accepted || cand.to_array() == v.to_array()) {
      // No admissible ascent step, or the step underflowed: the iterate is
      // stationary up to rounding.
      res.status = FitStatus::kMaxIter;
      return res;
    }
    v = cand;
  }
  res.status = FitStatus::kMaxIter;
  return res;
}

/// Iteration, the seven parameters, Log(ML), score norm, max eigenvalue.
inline void write_trace_csv(std::ostream& os, const FitTrace& trace) {
  os << "iteration";
  for (auto name : kParamNames) os << ',' << name;
  os << ",log_ml,grad_norm,max_eigenvalue\n";
  os << std::setprecision(17);
  for (const auto& r : trace.rows) {
    os << r.iteration;
    for (double v : r.params.to_array()) os << ',' << v;
    os << ',' << r.log_ml << ',' << r.grad_norm << ',' << r.max_eigenvalue << '\n';
  }
}

}  // namespace gts
