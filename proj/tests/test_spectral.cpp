#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gts/density.hpp"

using namespace gts;
using gts::testing::kBitcoin;
using gts::testing::kSp500;
using gts::testing::kSymmetric;
using std::numbers::pi;

namespace {

std::vector<cplx> direct_frft(const std::vector<cplx>& x, double delta, double s) {
  const std::size_t m = x.size();
  std::vector<cplx> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    cplx acc{0, 0};
    for (std::size_t j = 0; j < m; ++j) acc += x[j] * std::polar(1.0, -2 * pi * j * (k + s) * delta);
    out[k] = acc;
  }
  return out;
}

std::vector<cplx> random_seq(std::size_t m, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<cplx> v(m);
  for (auto& c : v) c = {n(rng), n(rng)};
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double max_abs(const std::vector<cplx>& a) {
  double d = 0;
  for (const auto& c : a) d = std::max(d, std::abs(c));
  return d;
}

}  // namespace

// ---------------------------------------------------------------- quadrature

TEST(NewtonCotes, WeightsSymmetricAndSumToTwelve) {
  const auto w = newton_cotes_weights();
  double s = 0;
  for (std::size_t j = 0; j < kPanelNodes; ++j) {
    s += w[j];
    EXPECT_EQ(w[j], w[12 - j]);
  }
  EXPECT_NEAR(s, 12.0, 1e-14);
}

TEST(NewtonCotes, ConstantOnUnitInterval) {
  std::vector<double> y(13, 1.0);
  EXPECT_NEAR(integrate_samples(y, 1.0 / 12.0), 1.0, 1e-15);
}

TEST(NewtonCotes, ExactThroughDegreeThirteen) {
  std::vector<double> y(13);
  for (std::size_t j = 0; j < 13; ++j) y[j] = std::pow(j / 12.0, 13);
  EXPECT_NEAR(integrate_samples(y, 1.0 / 12.0), 1.0 / 14.0, 1e-12);
}

TEST(NewtonCotes, SineOverFullPeriod) {
  const std::size_t m = 48;
  std::vector<double> y(m + 1);
  const double h = 2 * pi / m;
  for (std::size_t j = 0; j <= m; ++j) y[j] = std::sin(j * h);
  EXPECT_NEAR(integrate_samples(y, h), 0.0, 1e-12);
}

TEST(NewtonCotes, CompositeRejectsBadLength) {
  EXPECT_THROW(composite_weights(10), std::invalid_argument);
}

TEST(NewtonCotes, PartialPanelRowsAreExactForCubics) {
  const auto& pw = partial_panel_weights();
  for (std::size_t i = 0; i < kPanelNodes; ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < kPanelNodes; ++j) acc += pw[i][j] * std::pow(double(j), 3);
    EXPECT_NEAR(acc, std::pow(double(i), 4) / 4.0, 1e-9 * (1 + std::pow(double(i), 4)));
  }
}

TEST(NewtonCotes, CumulativeIntegralOfExponential) {
  const std::size_t n = 101;  // not a multiple of 12 plus one: exercises the trailing partial panel
  const double h = 0.02;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(i * h);
  const auto c = cumulative_integral(y, h);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(c[i], std::exp(i * h) - 1.0, 1e-12) << i;
}

// ---------------------------------------------------------------- FRFT

TEST(Frft, SingleTerm) {
  const std::vector<cplx> x{{2.5, -1.0}};
  const auto y = frft(x, 0.37, 0.0);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_NEAR(std::abs(y[0] - x[0]), 0.0, 1e-15);
}

TEST(Frft, Zeros) {
  const std::vector<cplx> x(24, cplx{0, 0});
  for (const auto& c : frft(x, 0.013, 0.5)) EXPECT_EQ(std::abs(c), 0.0);
}

TEST(Frft, MatchesDftAtUnitFraction) {
  std::mt19937_64 rng(1);
  for (std::size_t m : {12u, 24u, 48u}) {
    const auto x = random_seq(m, rng);
    const auto y = frft(x, 1.0 / m, 0.0);
    const auto ref = direct_frft(x, 1.0 / m, 0.0);
    EXPECT_LE(max_diff(y, ref), 1e-10 * max_abs(ref)) << m;
  }
}

TEST(Frft, GeneralDeltaAndShift) {
  std::mt19937_64 rng(2);
  for (std::size_t m : {7u, 36u, 100u, 500u}) {
    const auto x = random_seq(m, rng);
    for (double delta : {1e-4, 0.0371, -0.21}) {
      for (double s : {0.0, 0.5, -3.25}) {
        EXPECT_LE(max_diff(frft(x, delta, s), direct_frft(x, delta, s)), 1e-10 * std::sqrt(double(m)) * m)
            << m << " " << delta << " " << s;
      }
    }
  }
}

TEST(Frft, Linearity) {
  std::mt19937_64 rng(3);
  const auto u = random_seq(60, rng), v = random_seq(60, rng);
  const cplx a{1.5, -0.5}, b{-2.0, 0.25};
  std::vector<cplx> w(60);
  for (std::size_t i = 0; i < 60; ++i) w[i] = a * u[i] + b * v[i];
  const auto fu = frft(u, 0.011, 0.3), fv = frft(v, 0.011, 0.3), fw = frft(w, 0.011, 0.3);
  std::vector<cplx> lin(60);
  for (std::size_t i = 0; i < 60; ++i) lin[i] = a * fu[i] + b * fv[i];
  EXPECT_LE(max_diff(fw, lin), 1e-12 * max_abs(fw));
}

TEST(Frft, BankSharesInputAcrossShifts) {
  std::mt19937_64 rng(4);
  const auto x = random_seq(40, rng);
  const FrftBank bank(40, 0.02, {0.0, 0.25, 1.0});
  const auto out = bank.transform(x);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_LE(max_diff(out[r], direct_frft(x, 0.02, bank.shifts()[r])), 1e-11);
}

// ---------------------------------------------------------------- grid

TEST(Grid, TailToleranceMet) {
  const FourierGrid g = choose_grid(kSp500, 8192);
  EXPECT_LT(std::abs(char_fn(kSp500, 0.5 * g.a)), 1e-12);
  EXPECT_LT(std::abs(char_fn(kSp500, -0.5 * g.a)), 1e-12);
  EXPECT_EQ(g.m % 12, 0u);
  EXPECT_GE(g.m, 8192u);
  EXPECT_NEAR(g.delta, g.beta_step * g.gamma_step / (2 * pi), 1e-18);
  EXPECT_NEAR(g.gamma_step * double(g.m), 40.0 * moment_stats(kSp500).std_dev, 1e-9 * 40.0);
}

TEST(Grid, LargerTargetShrinksBetaStep) {
  const FourierGrid a = choose_grid(kSp500, 24000);
  const FourierGrid b = choose_grid(kSp500, 48000);
  EXPECT_DOUBLE_EQ(a.a, b.a);
  EXPECT_NEAR(a.beta_step / b.beta_step, double(b.m) / double(a.m), 1e-12);
}

TEST(Grid, SymmetricParamsGiveSymmetricSpan) {
  const FourierGrid g = choose_grid(kSymmetric, 8192);
  EXPECT_NEAR(g.x_min(), -g.x_max(), 1e-12);
}

TEST(Grid, MakeGridRoundsUp) {
  const FourierGrid g = make_grid(10.0, 100, 0.1);
  EXPECT_EQ(g.m, 108u);
  EXPECT_EQ(g.n, 9u);
  EXPECT_THROW(make_grid(-1.0, 100, 0.1), GridError);
}

// ---------------------------------------------------------------- scheme

TEST(Scheme, NormalRoundTrip) {
  // |F| < 1e-17 beyond |xi| = 9; output span 24 covers [-6, 6] with margin.
  const double a = 18.0, span = 24.0;
  const std::size_t m = round_up_to_panels(alias_free_m(a, span));
  const FourierGrid g = make_grid(a, m, span / m, 0.0);
  const auto v = inverse_fourier(g, [](double xi) { return normal_transform(0.0, 1.0, xi); });
  double err = 0;
  for (std::size_t k = 0; k < g.m; ++k) {
    const double x = g.x(k);
    if (std::abs(x) <= 6.0) err = std::max(err, std::abs(v[k] - normal_pdf(x, 0.0, 1.0)));
  }
  EXPECT_LT(err, 1e-10);
}

TEST(Scheme, ShiftedScaledNormal) {
  const double mean = 0.7, sd = 2.0;
  const double a = 9.0, span = 48.0;
  const std::size_t m = round_up_to_panels(alias_free_m(a, span));
  const FourierGrid g = make_grid(a, m, span / m, mean, 0.5);
  const auto v = inverse_fourier(g, [&](double xi) { return normal_transform(mean, sd, xi); });
  double err = 0;
  for (std::size_t k = 0; k < g.m; ++k) err = std::max(err, std::abs(v[k] - normal_pdf(g.x(k), mean, sd)));
  EXPECT_LT(err, 1e-10);
}

TEST(Scheme, Parseval) {
  const FourierGrid g = choose_grid(kSymmetric, 8192);
  const DensityTable t = density_table(kSymmetric, g);
  std::vector<double> f2(t.f.size());
  for (std::size_t k = 0; k < f2.size(); ++k) f2[k] = t.f[k] * t.f[k];
  const double lhs = cumulative_integral(f2, g.gamma_step).back();
  std::vector<double> p2(g.m + 1);
  for (std::size_t i = 0; i <= g.m; ++i) p2[i] = std::norm(char_fn(kSymmetric, g.y(i))) / (2 * pi);
  const double rhs = integrate_samples(p2, g.beta_step);
  EXPECT_NEAR(lhs / rhs, 1.0, 1e-6);
}

// ---------------------------------------------------------------- density table

TEST(DensityTable, Normalization) {
  for (const GtsParams& p : {kSp500, kBitcoin}) {
    const DensityTable t = density_table(p, 8192);
    EXPECT_NEAR(table_mass(t), 1.0, 1e-6);
    EXPECT_NEAR(t.mass, 1.0, 1e-6);
    EXPECT_LE(t.F.front(), 1e-6);
    EXPECT_GE(t.F.back(), 1.0 - 1e-6);
    for (std::size_t k = 0; k < t.size(); ++k) {
      EXPECT_GE(t.f[k], -1e-10);
      if (k) EXPECT_GE(t.F[k], t.F[k - 1]);
    }
  }
}

TEST(DensityTable, MeanMatchesFirstCumulant) {
  const DensityTable t = density_table(kSp500, 8192);
  std::vector<double> xf(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) xf[k] = t.x[k] * t.f[k];
  EXPECT_NEAR(cumulative_integral(xf, t.grid.gamma_step).back(), 0.0401, 1e-3);
  EXPECT_NEAR(cumulative_integral(xf, t.grid.gamma_step).back(), cumulants(kSp500, 1)(1), 1e-6);
}

TEST(DensityTable, MuDerivativeIsMinusSpatialDerivative) {
  const DensityTable t = density_table(kSp500, 8192, DerivativeOrder::kFirst);
  const double h = t.grid.gamma_step;
  double err = 0;
  for (std::size_t k = 2; k + 2 < t.size(); ++k) {
    // Fourth-order central difference.
    const double fp = (-t.f[k + 2] + 8 * t.f[k + 1] - 8 * t.f[k - 1] + t.f[k - 2]) / (12 * h);
    if (std::abs(t.x[k] - t.params.mu) < 0.05) continue;  // cusp-like peak at mu where differencing loses accuracy
    err = std::max(err, std::abs(t.df[0][k] + fp));
  }
  EXPECT_LT(err, 1e-5);
}

TEST(DensityTable, DerivativeColumnsMatchFiniteDifferences) {
  const DensityTable t = density_table(kBitcoin, 8192, DerivativeOrder::kFirst);
  for (std::size_t j = 1; j < kNumParams; ++j) {
    auto v = kBitcoin.to_array();
    const double h = 1e-5 * v[j];
    v[j] += h;
    const DensityTable up = density_table(GtsParams::from_array(v), t.grid);
    v[j] -= 2 * h;
    const DensityTable dn = density_table(GtsParams::from_array(v), t.grid);
    double err = 0, scale = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      err = std::max(err, std::abs(t.df[j][k] - (up.f[k] - dn.f[k]) / (2 * h)));
      scale = std::max(scale, std::abs(t.df[j][k]));
    }
    EXPECT_LT(err, 1e-5 * scale) << kParamNames[j];
  }
}

TEST(DensityTable, InvariantsForRandomParams) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    const GtsParams p = gts::testing::random_params(rng);
    const DensityTable t = density_table(p, 1200);
    ASSERT_NEAR(t.mass, 1.0, 1e-6) << i;
    for (std::size_t k = 1; k < t.size(); ++k) ASSERT_GE(t.F[k], t.F[k - 1]);
  }
}

TEST(DensityTable, CsvLayout) {
  const DensityTable t = density_table(kSymmetric, 1200, DerivativeOrder::kFirst);
  std::ostringstream os;
  write_density_csv(os, t, {{"normal", std::vector<double>(t.size(), 0.0)}});
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header,
            "x,f,F,df_mu,df_beta_plus,df_beta_minus,df_alpha_plus,df_alpha_minus,df_lambda_plus,df_lambda_minus,"
            "normal");
}

// ---------------------------------------------------------------- interpolation

TEST(CdfAt, NodesAreExact) {
  const DensityTable t = density_table(kSp500, 8192);
  for (std::size_t k : {10u, 4000u, 8000u}) EXPECT_EQ(cdf_at(t, t.x[k]), t.F[k]);
  EXPECT_EQ(density_at(t, t.x[500]), t.f[500]);
}

TEST(CdfAt, SymmetricMidpoint) {
  const DensityTable t = density_table(kSymmetric, 8192);
  EXPECT_NEAR(cdf_at(t, 0.0), 0.5, 1e-6);
}

TEST(CdfAt, BoundedByNeighbours) {
  const DensityTable t = density_table(kBitcoin, 8192);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(t.x.front(), t.x.back());
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    const std::size_t k = static_cast<std::size_t>((x - t.x.front()) / t.grid.gamma_step);
    const double v = cdf_at(t, x);
    EXPECT_GE(v, t.F[k]);
    EXPECT_LE(v, t.F[std::min(k + 1, t.size() - 1)]);
  }
}

TEST(CdfAt, OutOfSpanThrows) {
  const DensityTable t = density_table(kSp500, 8192);
  EXPECT_THROW(cdf_at(t, t.x.back() + 1.0), SpanError);
  EXPECT_THROW(density_at(t, t.x.front() - 1.0), SpanError);
}
