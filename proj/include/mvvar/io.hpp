#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mvvar/backtest.hpp"
#include "mvvar/errors.hpp"
#include "mvvar/frontier.hpp"
#include "mvvar/metrics.hpp"
#include "mvvar/miqp.hpp"
#include "mvvar/util.hpp"

namespace mvvar {

using ordered_json = nlohmann::ordered_json;

/// FNV-1a 64-bit hash of a file's bytes, as 16 hex digits. Pins the dataset
/// in run manifests.
inline std::string fnv1a64_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[65536];
  for (;;) {
    f.read(buf, sizeof(buf));
    const std::streamsize got = f.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (got < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

namespace io_detail {

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  return f;
}

/// CSV-quotes a field, doubling embedded quotes.
inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string weights_cell(const Eigen::VectorXd& w) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (i > 0) s += ',';
    s += fmt12(w(i));
  }
  s += ']';
  return s;
}

}  // namespace io_detail

/// JSON value for a double: finite values rounded to the 12-digit output
/// precision, infinities as strings so they survive serialization.
inline ordered_json json_num(double v) {
  if (std::isfinite(v)) return round12(v);
  return fmt12(v);
}

inline void write_json_file(const std::string& path, const ordered_json& j) {
  auto f = io_detail::open_output(path);
  f << j.dump(2) << '\n';
}

inline ordered_json solver_options_json(const SolverOptions& o) {
  ordered_json j;
  j["tol_gap"] = json_num(o.tol_gap);
  j["rel_gap"] = json_num(o.rel_gap);
  j["node_limit"] = o.node_limit;
  j["time_limit_sec"] = json_num(o.time_limit_sec);
  j["workers"] = o.workers;
  return j;
}

inline ordered_json solution_json(const MiqpSolution& s,
                                  const std::vector<std::string>& asset_names) {
  ordered_json j;
  j["status"] = to_string(s.status);
  j["objective"] = json_num(s.objective);
  j["r_eps"] = json_num(s.r_eps);
  j["var_risk"] = json_num(-s.r_eps);
  j["bound_gap"] = json_num(s.bound_gap);
  ordered_json w;
  for (Eigen::Index i = 0; i < s.x.size(); ++i)
    w[asset_names[static_cast<std::size_t>(i)]] = json_num(s.x(i));
  j["weights"] = std::move(w);
  j["exceedance_scenarios"] = ordered_json::array();
  for (Eigen::Index i = 0; i < s.y.size(); ++i)
    if (s.y(i) == 0) j["exceedance_scenarios"].push_back(i);
  ordered_json t;
  t["nodes"] = s.tree_stats.nodes;
  t["incumbent_updates"] = s.tree_stats.incumbent_updates;
  t["root_bound"] = json_num(s.tree_stats.root_bound);
  j["tree"] = std::move(t);
  return j;
}

inline void write_frontier_csv(const std::string& path,
                               const std::vector<FrontierPoint>& points) {
  auto f = io_detail::open_output(path);
  f << "alpha,beta,eta,z,variance,var_risk,exp_return,n_assets,weights\n";
  for (const auto& p : points) {
    f << fmt12(p.alpha) << ',' << fmt12(p.beta) << ',' << fmt12(p.eta) << ','
      << fmt12(p.z) << ',' << fmt12(p.variance) << ',' << fmt12(p.var_risk) << ','
      << fmt12(p.exp_return) << ',' << p.n_assets << ','
      << io_detail::csv_quote(io_detail::weights_cell(p.weights)) << '\n';
  }
}

inline ordered_json frontier_json(const std::vector<FrontierPoint>& points,
                                  const std::vector<std::string>& asset_names) {
  ordered_json j;
  j["asset_names"] = asset_names;
  j["points"] = ordered_json::array();
  for (const auto& p : points) {
    ordered_json e;
    e["alpha"] = json_num(p.alpha);
    e["beta"] = json_num(p.beta);
    e["eta"] = json_num(p.eta);
    e["z"] = json_num(p.z);
    e["variance"] = json_num(p.variance);
    e["var_risk"] = json_num(p.var_risk);
    e["exp_return"] = json_num(p.exp_return);
    e["n_assets"] = p.n_assets;
    e["weights"] = ordered_json::array();
    for (Eigen::Index i = 0; i < p.weights.size(); ++i)
      e["weights"].push_back(json_num(p.weights(i)));
    j["points"].push_back(std::move(e));
  }
  return j;
}

inline void write_series_csv(const std::string& path,
                             const std::vector<BacktestResult>& results) {
  auto f = io_detail::open_output(path);
  f << "period";
  for (const auto& r : results) f << ',' << r.strategy_id;
  f << '\n';
  const Eigen::Index n = results.empty() ? 0 : results.front().oos_returns.size();
  for (Eigen::Index t = 0; t < n; ++t) {
    f << t;
    for (const auto& r : results) f << ',' << fmt12(r.oos_returns(t));
    f << '\n';
  }
}

inline void write_weights_csv(const std::string& path,
                              const std::vector<BacktestResult>& results,
                              const std::vector<std::string>& asset_names) {
  auto f = io_detail::open_output(path);
  f << "strategy,window,asset,weight\n";
  for (const auto& r : results)
    for (std::size_t w = 0; w < r.weight_history.size(); ++w)
      for (Eigen::Index k = 0; k < r.weight_history[w].size(); ++k)
        f << r.strategy_id << ',' << w << ',' << asset_names[static_cast<std::size_t>(k)]
          << ',' << fmt12(r.weight_history[w](k)) << '\n';
}

inline void write_diagnostics_csv(const std::string& path,
                                  const std::vector<BacktestResult>& results) {
  auto f = io_detail::open_output(path);
  f << "strategy,window,status,gap,nodes,complete,detail\n";
  for (const auto& r : results)
    for (const auto& d : r.solve_diagnostics)
      f << r.strategy_id << ',' << d.window << ',' << d.status << ',' << fmt12(d.gap)
        << ',' << d.nodes << ',' << (r.complete ? 1 : 0) << ','
        << io_detail::csv_quote(d.detail) << '\n';
}

inline void write_metrics_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, MetricsReport>>& reports) {
  auto f = io_detail::open_output(path);
  f << "metric";
  for (const auto& [id, rep] : reports) f << ',' << id;
  f << '\n';
  for (std::size_t m = 0; m < metric_names().size(); ++m) {
    f << metric_names()[m];
    for (const auto& [id, rep] : reports) {
      auto v = metric_value(rep, m);
      f << ',';
      if (v) f << fmt12(*v);
    }
    f << '\n';
  }
}

inline ordered_json metrics_json(
    const std::vector<std::pair<std::string, MetricsReport>>& reports) {
  ordered_json j;
  for (const auto& [id, rep] : reports) {
    ordered_json e;
    for (std::size_t m = 0; m < metric_names().size(); ++m) {
      auto v = metric_value(rep, m);
      e[metric_names()[m]] = v ? json_num(*v) : ordered_json(nullptr);
    }
    j[id] = std::move(e);
  }
  return j;
}

inline void write_ranks_csv(const std::string& path, const RankTable& table) {
  auto f = io_detail::open_output(path);
  f << "metric";
  for (const auto& s : table.strategies) f << ',' << s;
  f << '\n';
  for (std::size_t m = 0; m < table.metrics.size(); ++m) {
    f << table.metrics[m];
    for (Eigen::Index jcol = 0; jcol < table.ranks.cols(); ++jcol)
      f << ',' << table.ranks(static_cast<Eigen::Index>(m), jcol);
    f << '\n';
  }
}

/// Reads a series CSV written by write_series_csv (or any CSV whose first
/// column is an index and whose remaining columns are return series).
inline std::vector<std::pair<std::string, Eigen::VectorXd>> read_series_csv(
    const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw ParseError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> ids;
  {
    std::size_t start = line.find(',');
    if (start == std::string::npos) throw ParseError(path + ": header has no series columns");
    ++start;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      ids.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  std::vector<std::vector<double>> cols(ids.size());
  std::size_t row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t start = line.find(',');
    if (start == std::string::npos)
      throw ParseError(path + ": row " + std::to_string(row) + " has no series columns");
    ++start;
    for (std::size_t c = 0; c < ids.size(); ++c) {
      const std::size_t comma = line.find(',', start);
      const std::string cell =
          line.substr(start, comma == std::string::npos ? comma : comma - start);
      try {
        std::size_t used = 0;
        cols[c].push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError(path + ": row " + std::to_string(row) + ", column " +
                         std::to_string(c + 2) + ": bad number '" + cell + "'");
      }
      if (comma == std::string::npos) {
        if (c + 1 != ids.size())
          throw ParseError(path + ": row " + std::to_string(row) + " has " +
                           std::to_string(c + 2) + " columns, expected " +
                           std::to_string(ids.size() + 1));
        start = line.size() + 1;
      } else {
        start = comma + 1;
      }
    }
  }
  std::vector<std::pair<std::string, Eigen::VectorXd>> out;
  for (std::size_t c = 0; c < ids.size(); ++c) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(cols[c].size()));
    for (std::size_t i = 0; i < cols[c].size(); ++i)
      v(static_cast<Eigen::Index>(i)) = cols[c][i];
    out.emplace_back(ids[c], std::move(v));
  }
  return out;
}

/// Reads a tall weights CSV written by write_weights_csv; returns per-strategy
/// weight histories with assets in file order within each window.
inline std::map<std::string, std::vector<Eigen::VectorXd>> read_weights_csv(
    const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw ParseError(path + ": empty file");
  std::map<std::string, std::map<long, std::vector<double>>> acc;
  std::size_t row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 4)
      throw ParseError(path + ": row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " columns, expected 4");
    try {
      acc[cells[0]][std::stol(cells[1])].push_back(std::stod(cells[3]));
    } catch (const std::exception&) {
      throw ParseError(path + ": row " + std::to_string(row) + ": bad number");
    }
  }
  std::map<std::string, std::vector<Eigen::VectorXd>> out;
  for (auto& [id, windows] : acc) {
    for (auto& [w, vals] : windows) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
      for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
      out[id].push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace mvvar
