#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ordx/error.hpp"

// Token return statistics. The arithmetic is templated on the scalar so the
// same code runs over double and over exact rationals.

namespace ordx::metrics {

using json = nlohmann::json;

/// Dated values: prices, or per-period returns keyed by the period's end date.
template <typename T>
struct basic_series {
  std::string symbol;
  std::vector<std::string> dates;
  std::vector<T> values;

  std::size_t size() const { return values.size(); }
};

using series = basic_series<double>;

inline bool iso_date(std::string_view d) {
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (d[i] < '0' || d[i] > '9') return false;
  const int month = (d[5] - '0') * 10 + (d[6] - '0');
  const int day = (d[8] - '0') * 10 + (d[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

/// Dates strictly increasing, prices strictly positive.
template <typename T>
void validate_prices(const basic_series<T>& s) {
  if (s.dates.size() != s.values.size()) fail(errc::bad_series, s.symbol + ": dates and prices differ in length");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!iso_date(s.dates[i])) fail(errc::bad_series, s.symbol + ": bad date '" + s.dates[i] + "'");
    if (!(s.values[i] > T(0))) fail(errc::bad_series, s.symbol + ": non-positive price on " + s.dates[i]);
    if (i > 0 && !(s.dates[i - 1] < s.dates[i]))
      fail(errc::bad_series, s.symbol + ": dates not strictly increasing at " + s.dates[i]);
  }
}

/// r_i = (p_{i+1} - p_i) / p_i
template <typename T>
basic_series<T> daily_returns(const basic_series<T>& prices) {
  validate_prices(prices);
  if (prices.size() < 2) fail(errc::too_few_points, prices.symbol + ": need at least two prices");
  basic_series<T> r{prices.symbol, {}, {}};
  for (std::size_t i = 1; i < prices.size(); ++i) {
    r.dates.push_back(prices.dates[i]);
    r.values.push_back((prices.values[i] - prices.values[i - 1]) / prices.values[i - 1]);
  }
  return r;
}

template <typename T>
T average_return(const basic_series<T>& returns) {
  if (returns.size() < 1) fail(errc::too_few_points, returns.symbol + ": no returns");
  T sum(0);
  for (const auto& v : returns.values) sum += v;
  return sum / T(static_cast<long>(returns.size()));
}

/// Sample variance, n - 1 denominator.
template <typename T>
T sample_variance(const basic_series<T>& returns) {
  if (returns.size() < 2) fail(errc::too_few_points, returns.symbol + ": need at least two returns");
  const T mean = average_return(returns);
  T ss(0);
  for (const auto& v : returns.values) ss += (v - mean) * (v - mean);
  return ss / T(static_cast<long>(returns.size() - 1));
}

inline double volatility(const series& returns) { return std::sqrt(sample_variance(returns)); }

template <typename T>
T sharpe_ratio(const T& avg, const T& risk_free, const T& stdev) {
  if (stdev == T(0)) fail(errc::zero_volatility, "standard deviation is zero");
  return (avg - risk_free) / stdev;
}

/// Return over the whole series, last / first - 1.
template <typename T>
T period_return(const basic_series<T>& prices) {
  validate_prices(prices);
  if (prices.size() < 2) fail(errc::too_few_points, prices.symbol + ": need at least two prices");
  return prices.values.back() / prices.values.front() - T(1);
}

inline constexpr std::size_t min_overlap = 3;

/// Pearson coefficient over the dates both series share.
inline double correlation(const series& a, const series& b) {
  std::map<std::string, double> by_date;
  for (std::size_t i = 0; i < a.size(); ++i) by_date[a.dates[i]] = a.values[i];
  std::vector<double> x, y;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (auto it = by_date.find(b.dates[i]); it != by_date.end()) {
      x.push_back(it->second);
      y.push_back(b.values[i]);
    }
  if (x.size() < min_overlap)
    fail(errc::insufficient_overlap, a.symbol + "/" + b.symbol + " share " + std::to_string(x.size()) + " dates");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) fail(errc::zero_variance, a.symbol + "/" + b.symbol + ": constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct correlation_matrix_result {
  std::vector<std::string> symbols;
  std::vector<std::vector<std::optional<double>>> cells;  // nullopt where undefined
  std::map<std::pair<std::size_t, std::size_t>, std::string> missing;
};

/// Pairwise-complete correlation; undefined cells are left empty with a reason.
inline correlation_matrix_result correlation_matrix(const std::vector<series>& returns) {
  correlation_matrix_result m;
  const auto n = returns.size();
  for (const auto& r : returns) m.symbols.push_back(r.symbol);
  m.cells.assign(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      try {
        double c = correlation(returns[i], returns[j]);
        if (i == j) c = 1.0;
        m.cells[i][j] = m.cells[j][i] = c;
      } catch (const error& e) {
        m.missing[{i, j}] = e.what();
      }
    }
  }
  return m;
}

inline double parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    fail(errc::bad_series, "bad number '" + std::string(s) + "'");
  return v;
}

/// CSV with header `date,price`, one ISO-8601 date per row.
inline series read_price_csv(std::istream& in, const std::string& symbol) {
  series s{symbol, {}, {}};
  std::string line;
  auto trim = [](std::string& l) {
    while (!l.empty() && (l.back() == '\r' || l.back() == ' ')) l.pop_back();
  };
  if (!std::getline(in, line)) fail(errc::bad_series, symbol + ": empty file");
  trim(line);
  if (line != "date,price") fail(errc::bad_series, symbol + ": header must be 'date,price'");
  while (std::getline(in, line)) {
    trim(line);
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) fail(errc::bad_series, symbol + ": malformed row '" + line + "'");
    s.dates.push_back(line.substr(0, comma));
    s.values.push_back(parse_double(std::string_view(line).substr(comma + 1)));
  }
  validate_prices(s);
  return s;
}

inline json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Per-symbol statistics plus the correlation matrix of daily returns.
inline json report(const std::vector<series>& prices, double risk_free = 0.0) {
  json per_symbol = json::object();
  std::vector<series> rets;
  for (const auto& p : prices) {
    auto r = daily_returns(p);
    json row{{"points", p.size()}, {"avg", average_return(r)}, {"period_return", period_return(p)}};
    std::optional<double> vol, sharpe;
    if (r.size() >= 2) {
      vol = volatility(r);
      if (*vol > 0) sharpe = sharpe_ratio(average_return(r), risk_free, *vol);
    }
    row["vol"] = nullable(vol);
    row["sharpe"] = nullable(sharpe);
    per_symbol[p.symbol] = row;
    rets.push_back(std::move(r));
  }
  auto m = correlation_matrix(rets);
  json pairs = json::object();
  json matrix = json::array();
  for (std::size_t i = 0; i < m.symbols.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.symbols.size(); ++j) {
      row.push_back(nullable(m.cells[i][j]));
      if (j > i) pairs[m.symbols[i] + "/" + m.symbols[j]] = nullable(m.cells[i][j]);
    }
    matrix.push_back(std::move(row));
  }
  return {{"risk_free", risk_free},
          {"symbols", per_symbol},
          {"correlation", {{"symbols", m.symbols}, {"matrix", matrix}, {"pairs", pairs}}}};
}

}  // namespace ordx::metrics
