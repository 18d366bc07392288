#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "gts/data.hpp"

using namespace gts;
using namespace std::chrono;

namespace {

PriceSeries parse(const std::string& text) {
  std::istringstream is(text);
  return parse_price_csv(is);
}

ReturnSeries series(const std::vector<double>& r) {
  ReturnSeries s;
  s.returns = r;
  sys_days d = sys_days{year{2020} / 1 / 1};
  for (std::size_t i = 0; i < r.size(); ++i) s.dates.push_back(year_month_day{d + days{static_cast<int>(i)}});
  return s;
}

}  // namespace

TEST(ParseDate, Formats) {
  EXPECT_EQ(parse_date("2023-06-16"), year_month_day{year{2023} / 6 / 16});
  EXPECT_EQ(parse_date("2023-06-16T00:00:00Z"), year_month_day{year{2023} / 6 / 16});
  EXPECT_EQ(parse_date(" 2010-01-04 16:00"), year_month_day{year{2010} / 1 / 4});
  EXPECT_THROW(parse_date("2023-02-30"), ParseError);
  EXPECT_THROW(parse_date("16/06/2023"), ParseError);
  EXPECT_EQ(format_date(parse_date("2001-09-07")), "2001-09-07");
}

TEST(PriceCsv, MinimalFile) {
  const auto s = parse("Date,Adj Close\n2020-01-02,100\n2020-01-03,101\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.prices[1], 101.0);
  EXPECT_EQ(s.dropped, 0u);
}

TEST(PriceCsv, SortsDropsAndDeduplicates) {
  const auto s = parse(
      "\xEF\xBB\xBF"
      "Date,Open,Adj Close\r\n"
      "2020-01-05,1,103\r\n"
      "2020-01-02,1,100\r\n"
      "2020-01-03,1,N/A\r\n"
      "2020-01-04,1,\"102\"\r\n"
      "2020-01-04,1,102.5\r\n"
      "\r\n");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.dropped, 1u);
  EXPECT_EQ(format_date(s.dates[0]), "2020-01-02");
  EXPECT_EQ(s.prices[1], 102.5);
  EXPECT_EQ(s.prices[2], 103.0);
}

TEST(PriceCsv, Errors) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("Date,Close\n2020-01-02,1\n"), ParseError);
  EXPECT_THROW(parse("Date,Adj Close\n2020-01-02\n"), ParseError);
  EXPECT_THROW(parse("Date,Adj Close\nyesterday,5\n"), ParseError);
  EXPECT_THROW(parse("Date,Adj Close\n2020-01-02,-5\n"), ParseError);
  try {
    parse("Date,Adj Close\n2020-01-02,1\nbad,1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(PriceCsv, CustomColumns) {
  std::istringstream is2("when,close\n2020-01-02,5\n");
  const auto s = parse_price_csv(is2, ColumnSpec{"when", "close"});
  EXPECT_EQ(s.prices.front(), 5.0);
}

TEST(LogReturns, Values) {
  PriceSeries p;
  p.prices = {100, 100, 101, 95.5, 120};
  for (int i = 0; i < 5; ++i) p.dates.push_back(year_month_day{sys_days{year{2020} / 1 / 1} + days{i}});
  const auto r = log_returns(p);
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r.returns[0], 0.0);
  EXPECT_NEAR(r.returns[1], 0.99503308531681, 1e-12);
  double s = 0;
  for (double v : r.returns) s += v;
  EXPECT_NEAR(s, 100.0 * std::log(120.0 / 100.0), 1e-12);
  EXPECT_EQ(r.dates[0], p.dates[1]);
  PriceSeries one;
  one.prices = {1};
  one.dates = {p.dates[0]};
  EXPECT_THROW(log_returns(one), DomainError);
}

TEST(RealizedVol, ZeroAndConstant) {
  for (const auto& v : realized_vol(series(std::vector<double>(40, 0.0)), 21)) EXPECT_EQ(v.vol, 0.0);
  const double c = -0.8;
  const int T = 21;
  const auto out = realized_vol(series(std::vector<double>(60, c)), T);
  EXPECT_EQ(out.size(), 60u - T);
  for (const auto& v : out) EXPECT_NEAR(v.vol, std::sqrt(252.0 * (T + 1) / T) * std::abs(c), 1e-12);
}

TEST(RealizedVol, RollingMatchesBruteForce) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0, 2);
  std::vector<double> r(10000);
  for (auto& v : r) v = n(rng);
  for (int T : {kWindowMonth, kWindowYear}) {
    const auto out = realized_vol(series(r), T);
    ASSERT_EQ(out.size(), r.size() - T);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const std::size_t k = i + T;
      double acc = 0;
      for (std::size_t j = k - T; j <= k; ++j) acc += r[j] * r[j];
      ASSERT_NEAR(out[i].vol, std::sqrt(252.0 / T * acc), 1e-12 * out[i].vol) << i;
    }
  }
}

TEST(RealizedVol, ScalesLinearly) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> r(300), r5(300);
  for (std::size_t i = 0; i < r.size(); ++i) r5[i] = 5.0 * (r[i] = n(rng));
  const auto a = realized_vol(series(r), 21), b = realized_vol(series(r5), 21);
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i].vol;
    sb += b[i].vol;
  }
  EXPECT_NEAR(sb / sa, 5.0, 1e-12);
}

TEST(RealizedVol, ShortSeries) {
  EXPECT_THROW(realized_vol(series({1, 2, 3}), 21), DomainError);
  EXPECT_THROW(realized_vol(series({1, 2, 3}), 0), DomainError);
}

TEST(SummaryStats, HandComputed) {
  const auto s = summary_stats(std::vector<double>{0, 0, 0, 1});
  EXPECT_DOUBLE_EQ(s.mean, 0.25);
  EXPECT_DOUBLE_EQ(s.std_dev, 0.5);
  EXPECT_DOUBLE_EQ(s.cv, 2.0);
  EXPECT_NEAR(s.skewness, 2.0 / std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(s.kurtosis, 7.0 / 3.0, 1e-14);
  EXPECT_EQ(s.min, 0.0);
  EXPECT_EQ(s.max, 1.0);
}

TEST(SummaryStats, TenValues) {
  // 1..10: mean 5.5, sample sd sqrt(55/6), zero skew, kurtosis 293/165.
  std::vector<double> x;
  for (int i = 1; i <= 10; ++i) x.push_back(i);
  const auto s = summary_stats(x);
  EXPECT_DOUBLE_EQ(s.mean, 5.5);
  EXPECT_NEAR(s.std_dev, std::sqrt(55.0 / 6.0), 1e-14);
  EXPECT_NEAR(s.skewness, 0.0, 1e-14);
  EXPECT_NEAR(s.kurtosis, 293.0 / 165.0, 1e-13);
}

TEST(SummaryStats, SymmetricAndNormal) {
  const auto s = summary_stats(std::vector<double>{-1, 1, -1, 1});
  EXPECT_EQ(s.mean, 0.0);
  EXPECT_EQ(s.skewness, 0.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> x(200000);
  for (auto& v : x) v = n(rng);
  EXPECT_NEAR(summary_stats(x).kurtosis, 3.0, 0.2);
  EXPECT_THROW(summary_stats(std::vector<double>(10, 1.0)), DomainError);
}

TEST(SeriesCsv, Layout) {
  std::ostringstream os;
  write_vol_csv(os, realized_vol(series(std::vector<double>(25, 1.0)), 21));
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, 11), "date,value\n");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}
