#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mvvar/errors.hpp"

namespace mvvar {

/// Per-period out-of-sample performance measures. Ratios whose denominator
/// vanishes are left unset rather than reported as NaN.
struct MetricsReport {
  double mean = 0.0;
  double std_dev = 0.0;
  std::optional<double> sharpe;
  double max_drawdown = 0.0;  // in (-1, 0]
  double ulcer = 0.0;
  double turnover = 0.0;
  std::optional<double> sortino;
  std::optional<double> rachev_5;
  std::optional<double> rachev_10;
};

namespace metrics_detail {

inline std::optional<double> rachev_ratio(const Eigen::VectorXd& sorted, double alpha) {
  const Eigen::Index n = sorted.size();
  const Eigen::Index m = static_cast<Eigen::Index>(
      std::ceil(alpha * static_cast<double>(n) - 1e-9));
  const double lo = sorted.head(m).mean();
  const double hi = sorted.tail(m).mean();
  if (lo == 0.0) return std::nullopt;
  return hi / std::abs(lo);
}

}  // namespace metrics_detail

inline MetricsReport compute_metrics(const Eigen::VectorXd& oos,
                                     const std::vector<Eigen::VectorXd>& weight_history,
                                     std::pair<double, double> rachev_levels = {0.05, 0.10}) {
  const Eigen::Index n = oos.size();
  if (n < 2) throw DomainError("need at least 2 return observations, got " +
                               std::to_string(n));
  if (weight_history.empty()) throw DomainError("empty weight history");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(oos(i))) throw DomainError("non-finite return at index " +
                                                  std::to_string(i));
    if (oos(i) <= -1.0) throw DomainError("return at index " + std::to_string(i) +
                                          " is a total loss or worse");
  }
  const Eigen::Index assets = weight_history.front().size();
  for (const auto& x : weight_history)
    if (x.size() != assets) throw DomainError("ragged weight history");

  MetricsReport rep;
  rep.mean = oos.mean();
  rep.std_dev = std::sqrt((oos.array() - rep.mean).square().mean());
  if (rep.std_dev > 0.0) rep.sharpe = rep.mean / rep.std_dev;

  double wealth = 1.0, peak = 1.0, sum_d2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    wealth *= 1.0 + oos(i);
    peak = std::max(peak, wealth);
    const double d = wealth / peak - 1.0;
    rep.max_drawdown = std::min(rep.max_drawdown, d);
    sum_d2 += d * d;
  }
  rep.ulcer = std::sqrt(sum_d2 / static_cast<double>(n));

  const double downside = std::sqrt(oos.array().min(0.0).square().mean());
  if (downside > 0.0) rep.sortino = rep.mean / downside;

  Eigen::VectorXd sorted = oos;
  std::sort(sorted.data(), sorted.data() + n);
  rep.rachev_5 = metrics_detail::rachev_ratio(sorted, rachev_levels.first);
  rep.rachev_10 = metrics_detail::rachev_ratio(sorted, rachev_levels.second);

  const std::size_t r = weight_history.size();
  if (r > 1) {
    double total = 0.0;
    for (std::size_t j = 1; j < r; ++j)
      total += (weight_history[j] - weight_history[j - 1]).cwiseAbs().sum();
    rep.turnover = total / static_cast<double>(r - 1);
  }
  return rep;
}

inline const std::array<std::string, 9>& metric_names() {
  static const std::array<std::string, 9> names = {
      "mean",  "std_dev",  "sharpe",   "max_drawdown", "ulcer",
      "turnover", "sortino", "rachev_5", "rachev_10"};
  return names;
}

inline std::optional<double> metric_value(const MetricsReport& r, std::size_t metric) {
  switch (metric) {
    case 0: return r.mean;
    case 1: return r.std_dev;
    case 2: return r.sharpe;
    case 3: return r.max_drawdown;
    case 4: return r.ulcer;
    case 5: return r.turnover;
    case 6: return r.sortino;
    case 7: return r.rachev_5;
    case 8: return r.rachev_10;
    default: throw DomainError("metric index out of range");
  }
}

/// max_drawdown is non-positive, so "closer to zero" and "higher" coincide.
inline bool metric_higher_is_better(std::size_t metric) {
  switch (metric) {
    case 0: case 2: case 3: case 6: case 7: case 8: return true;
    default: return false;
  }
}

struct RankTable {
  std::vector<std::string> metrics;
  std::vector<std::string> strategies;
  Eigen::MatrixXi ranks;  // metrics x strategies, competition ranking from 1
};

/// Competition ranks per metric: tied values share a rank, undefined values
/// tie below every defined one.
inline RankTable rank_report(
    const std::vector<std::pair<std::string, MetricsReport>>& reports) {
  if (reports.size() < 2) throw DomainError("ranking needs at least 2 strategies");
  RankTable table;
  table.metrics.assign(metric_names().begin(), metric_names().end());
  for (const auto& [id, rep] : reports) table.strategies.push_back(id);
  const std::size_t s = reports.size(), m = table.metrics.size();
  table.ranks.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(s));

  std::vector<std::optional<double>> adjusted(s);
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = metric_higher_is_better(i) ? 1.0 : -1.0;
    std::size_t defined = 0;
    for (std::size_t j = 0; j < s; ++j) {
      auto v = metric_value(reports[j].second, i);
      adjusted[j] = v ? std::optional<double>(sign * *v) : std::nullopt;
      if (v) ++defined;
    }
    for (std::size_t j = 0; j < s; ++j) {
      int rank;
      if (!adjusted[j]) {
        rank = static_cast<int>(defined) + 1;
      } else {
        int better = 0;
        for (std::size_t l = 0; l < s; ++l)
          if (adjusted[l] && *adjusted[l] > *adjusted[j]) ++better;
        rank = better + 1;
      }
      table.ranks(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rank;
    }
  }
  return table;
}

}  // namespace mvvar
