#pragma once

// Price ingestion, log returns (percent), realized volatility and sample
// summary statistics.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gts/error.hpp"

namespace gts {

using Date = std::chrono::year_month_day;

struct ColumnSpec {
  std::string date = "Date";
  std::string price = "Adj Close";
};

struct PriceSeries {
  std::vector<Date> dates;
  std::vector<double> prices;
  std::size_t dropped = 0;  // rows removed for a missing or non-positive price
  std::size_t size() const { return prices.size(); }
};

struct ReturnSeries {
  std::vector<Date> dates;     // date of the later price of each pair
  std::vector<double> returns;  // percent
  std::size_t size() const { return returns.size(); }
};

inline std::string format_date(const Date& d) {
  std::ostringstream os;
  os << std::setfill('0') << std::setw(4) << static_cast<int>(d.year()) << '-' << std::setw(2)
     << static_cast<unsigned>(d.month()) << '-' << std::setw(2) << static_cast<unsigned>(d.day());
  return os.str();
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// One CSV record; double quotes may wrap fields and "" escapes a quote.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.emplace_back(trim(cur));
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

/// YYYY-MM-DD, optionally followed by an ISO-8601 time part ("T..." or " ...").
inline Date parse_date(std::string_view s) {
  s = detail::trim(s);
  if (s.size() > 10 && (s[10] == 'T' || s[10] == ' ')) s = s.substr(0, 10);
  int y = 0;
  unsigned m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !detail::parse_number(s.substr(0, 4), y) ||
      !detail::parse_number(s.substr(5, 2), m) || !detail::parse_number(s.substr(8, 2), d)) {
    throw ParseError("invalid date '" + std::string(s) + "'");
  }
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw ParseError("invalid calendar date '" + std::string(s) + "'");
  return date;
}

/// Reads a header row, then one price per row. Rows whose price is missing,
/// non-numeric or non-positive are dropped and counted; dates are sorted and a
/// repeated date keeps its last occurrence in file order.
inline PriceSeries parse_price_csv(std::istream& in, const ColumnSpec& spec = {}) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!detail::trim(line).empty()) {
      header = detail::split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw ParseError("price file: missing header row");
  if (!header.empty() && header[0].size() >= 3 && header[0].compare(0, 3, "\xEF\xBB\xBF") == 0) {
    header[0].erase(0, 3);
  }
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("price file: column '" + name + "' not found in header");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t dc = column(spec.date);
  const std::size_t pc = column(spec.price);

  struct Row {
    Date date;
    double price;
    std::size_t order;
  };
  std::vector<Row> rows;
  std::size_t dropped = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() <= std::max(dc, pc)) {
      throw ParseError("price file line " + std::to_string(lineno) + ": too few fields");
    }
    Date d;
    try {
      d = parse_date(f[dc]);
    } catch (const ParseError& e) {
      throw ParseError("price file line " + std::to_string(lineno) + ": " + e.what());
    }
    double p = 0;
    if (!detail::parse_number(f[pc], p) || !std::isfinite(p) || !(p > 0.0)) {
      ++dropped;
      continue;
    }
    rows.push_back({d, p, rows.size()});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
  PriceSeries s;
  s.dropped = dropped;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i + 1 < rows.size() && rows[i + 1].date == rows[i].date) continue;  // later duplicate wins
    s.dates.push_back(rows[i].date);
    s.prices.push_back(rows[i].price);
  }
  if (s.prices.empty()) throw ParseError("price file: no usable rows after cleaning");
  return s;
}

inline PriceSeries load_price_csv(const std::string& path, const ColumnSpec& spec = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open price file '" + path + "'");
  return parse_price_csv(in, spec);
}

/// 100 * ln(S_j / S_{j-1}).
inline ReturnSeries log_returns(const PriceSeries& s) {
  if (s.size() < 2) throw DomainError("log_returns: need at least two prices");
  ReturnSeries r;
  r.dates.assign(s.dates.begin() + 1, s.dates.end());
  r.returns.resize(s.size() - 1);
  for (std::size_t j = 1; j < s.size(); ++j) r.returns[j - 1] = 100.0 * std::log(s.prices[j] / s.prices[j - 1]);
  return r;
}

inline constexpr int kWindowMonth = 21;
inline constexpr int kWindowYear = 252;

struct VolPoint {
  Date date;
  double vol = 0;  // annualized, percent
};

/// vol_k = sqrt((252/T) * sum_{j=0..T} y_{k-j}^2) for k = T..N-1; the sum has
/// T+1 terms, not T. Rolling sum, N - T rows.
inline std::vector<VolPoint> realized_vol(const ReturnSeries& r, int window) {
  if (window <= 0) throw DomainError("realized_vol: window must be positive");
  const std::size_t T = static_cast<std::size_t>(window);
  const std::size_t n = r.size();
  if (n <= T) throw DomainError("realized_vol: series not longer than the window");
  std::vector<VolPoint> out;
  out.reserve(n - T);
  const double scale = 252.0 / static_cast<double>(T);
  double acc = 0.0;
  for (std::size_t j = 0; j <= T; ++j) acc += r.returns[j] * r.returns[j];
  for (std::size_t k = T;; ++k) {
    out.push_back({r.dates[k], std::sqrt(scale * std::max(acc, 0.0))});
    if (k + 1 >= n) break;
    acc += r.returns[k + 1] * r.returns[k + 1] - r.returns[k - T] * r.returns[k - T];
    // Re-sum periodically so the rolling update cannot drift.
    if ((k + 1) % 4096 == 0) {
      acc = 0.0;
      for (std::size_t j = k + 1 - T; j <= k + 1; ++j) acc += r.returns[j] * r.returns[j];
    }
  }
  return out;
}

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0;
  double std_dev = 0;  // divisor n - 1
  double cv = 0;
  double skewness = 0;  // m3 / m2^1.5, central moments with divisor n
  double kurtosis = 0;  // m4 / m2^2
  double min = 0;
  double max = 0;
};

inline SummaryStats summary_stats(const std::vector<double>& x) {
  if (x.size() < 4) throw DomainError("summary_stats: need at least 4 observations");
  SummaryStats s;
  s.n = x.size();
  const double n = static_cast<double>(s.n);
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - s.mean, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  if (!(m2 > 0)) throw DomainError("summary_stats: degenerate sample (zero variance)");
  s.std_dev = std::sqrt(m2 / (n - 1));
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.cv = s.std_dev / s.mean;
  s.skewness = m3 / std::pow(m2, 1.5);
  s.kurtosis = m4 / (m2 * m2);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

inline SummaryStats summary_stats(const ReturnSeries& r) { return summary_stats(r.returns); }

/// `date,value` rows, 17 significant digits, LF endings.
inline void write_series_csv(std::ostream& os, const std::vector<Date>& dates, const std::vector<double>& values) {
  os << "date,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i) os << format_date(dates.at(i)) << ',' << values[i] << '\n';
}

inline void write_vol_csv(std::ostream& os, const std::vector<VolPoint>& v) {
  os << "date,value\n" << std::setprecision(17);
  for (const auto& p : v) os << format_date(p.date) << ',' << p.vol << '\n';
}

}  // namespace gts
