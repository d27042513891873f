#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <vector>

#include "mvvar/errors.hpp"
#include "mvvar/frontier.hpp"
#include "mvvar/market_data.hpp"
#include "mvvar/miqp.hpp"
#include "mvvar/util.hpp"

namespace mvvar {

/// Half-open row ranges of one rolling window.
struct Window {
  Eigen::Index in_start = 0;
  Eigen::Index in_end = 0;
  Eigen::Index out_start = 0;
  Eigen::Index out_end = 0;
};

struct WindowSchedule {
  Eigen::Index in_sample_len = 0;
  Eigen::Index holding_len = 0;
  std::vector<Window> windows;
};

/// Rolls windows forward by holding_len until the data runs out; a final
/// partial holding period is kept when non-empty.
inline WindowSchedule make_schedule(Eigen::Index total_t, Eigen::Index in_sample_len,
                                    Eigen::Index holding_len) {
  if (in_sample_len < 2) throw DomainError("in-sample length must be at least 2");
  if (holding_len < 1) throw DomainError("holding length must be at least 1");
  if (total_t <= in_sample_len)
    throw DomainError("no out-of-sample rows: total " + std::to_string(total_t) +
                      " <= in-sample " + std::to_string(in_sample_len));
  WindowSchedule s;
  s.in_sample_len = in_sample_len;
  s.holding_len = holding_len;
  for (Eigen::Index start = 0;; start += holding_len) {
    const Eigen::Index in_end = start + in_sample_len;
    if (in_end >= total_t) break;
    s.windows.push_back({start, in_end, in_end, std::min(in_end + holding_len, total_t)});
  }
  return s;
}

struct WindowDiagnostic {
  Eigen::Index window = 0;
  std::string status;  // "optimal", "incumbent", or "failed"
  double gap = 0.0;
  long nodes = 0;
  std::string detail;
};

struct BacktestResult {
  std::string strategy_id;
  Eigen::VectorXd oos_returns;
  std::vector<Eigen::VectorXd> weight_history;
  std::vector<WindowDiagnostic> solve_diagnostics;
  bool complete = true;
};

struct BacktestConfig {
  ConfidenceLevel epsilon{0.05};
  std::vector<double> alphas{0.0, 0.25, 0.5, 0.75};
  std::vector<double> betas{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  Eigen::Index in_sample_len = 104;
  Eigen::Index holding_len = 4;
  SolverOptions solver{};
};

inline std::string grid_strategy_id(double alpha, double beta) {
  return "eta_" + format_grid_coord(alpha) + ":z_" + format_grid_coord(beta);
}

/// Runs the rolling-window evaluation: per window, estimate moments on the
/// in-sample rows, sweep the grid, then hold each portfolio's fixed target
/// weights across the out-of-sample rows. The equally weighted benchmark
/// comes first, followed by the grid strategies in row-major (alpha, beta)
/// order. A window whose solve hits a resource limit keeps the incumbent and
/// its gap; a window with no usable solution falls back to the previous
/// target weights and marks the strategy incomplete.
inline std::vector<BacktestResult> run_backtest(const ScenarioMatrix& s,
                                                const BacktestConfig& cfg) {
  if (cfg.alphas.empty() || cfg.betas.empty()) throw DomainError("empty sweep grid");
  for (double a : cfg.alphas)
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("alpha " + fmt12(a) + " outside [0, 1]");
  for (double b : cfg.betas)
    if (!(b >= 0.0 && b <= 1.0)) throw DomainError("beta " + fmt12(b) + " outside [0, 1]");
  const WindowSchedule schedule = make_schedule(s.periods(), cfg.in_sample_len, cfg.holding_len);

  const Eigen::Index n = s.assets();
  const std::size_t na = cfg.alphas.size(), nb = cfg.betas.size();
  const Eigen::Index oos_total = s.periods() - cfg.in_sample_len;

  std::vector<BacktestResult> results(1 + na * nb);
  results[0].strategy_id = "EW";
  for (std::size_t ia = 0; ia < na; ++ia)
    for (std::size_t ib = 0; ib < nb; ++ib)
      results[1 + ia * nb + ib].strategy_id = grid_strategy_id(cfg.alphas[ia], cfg.betas[ib]);
  for (auto& r : results) r.oos_returns.resize(oos_total);

  const Eigen::VectorXd x_ew = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  std::vector<Eigen::VectorXd> carried(results.size(), x_ew);

  struct PointOutcome {
    bool ok = false;
    Eigen::VectorXd x;
    std::string status = "failed";
    double gap = 0.0;
    long nodes = 0;
    std::string detail;
  };

  Eigen::Index cursor = 0;
  for (std::size_t w = 0; w < schedule.windows.size(); ++w) {
    const Window& win = schedule.windows[w];
    const ScenarioMatrix insc = s.window(win.in_start, win.in_end);
    const AssetStats st = compute_stats(insc);

    bool window_ok = true;
    bool degenerate = false;
    std::string window_detail;
    std::vector<double> etas;
    std::vector<ZRange> zr;
    try {
      const EtaRange er = eta_range(st, insc, cfg.epsilon, cfg.solver);
      degenerate = er.eta_max - er.eta_min <= 1e-14 * (1.0 + std::abs(er.eta_max));
      const std::vector<double> eff_alphas = degenerate ? std::vector<double>{0.0} : cfg.alphas;
      etas.resize(eff_alphas.size());
      zr.resize(eff_alphas.size());
      for (std::size_t i = 0; i < eff_alphas.size(); ++i) {
        etas[i] = er.eta_min + eff_alphas[i] * (er.eta_max - er.eta_min);
        zr[i] = frontier_detail::z_range_at(etas[i], st, insc, cfg.epsilon, cfg.solver);
      }
    } catch (const Error& e) {
      window_ok = false;
      window_detail = e.what();
    }

    std::vector<PointOutcome> outcomes;
    if (window_ok) {
      outcomes.resize(etas.size() * nb);
      parallel_for_indexed(outcomes.size(), cfg.solver.workers, [&](std::size_t idx) {
        const std::size_t ia = idx / nb, ib = idx % nb;
        PointOutcome& o = outcomes[idx];
        try {
          const double z = zr[ia].z_min + cfg.betas[ib] * (zr[ia].z_max - zr[ia].z_min);
          auto model =
              build_model(st, insc, etas[ia], z, cfg.epsilon, MiqpObjective::min_variance);
          auto sol = solve_miqp(model, cfg.solver);
          if (sol.status == MiqpStatus::optimal) {
            o.ok = true;
            o.x = sol.x;
            o.status = "optimal";
            o.gap = sol.bound_gap;
            o.nodes = sol.tree_stats.nodes;
          } else {
            o.detail = "grid point reported infeasible";
          }
        } catch (const MiqpResourceError& e) {
          if (e.incumbent) {
            o.ok = true;
            o.x = e.incumbent->x;
            o.status = "incumbent";
            o.gap = e.gap;
            o.nodes = e.incumbent->tree_stats.nodes;
          }
          o.detail = e.what();
        } catch (const Error& e) {
          o.detail = e.what();
        }
      });
    }

    const Eigen::Index olen = win.out_end - win.out_start;
    const auto out_block = s.returns().middleRows(win.out_start, olen);
    auto apply = [&](std::size_t sidx, const Eigen::VectorXd& x) {
      results[sidx].weight_history.push_back(x);
      results[sidx].oos_returns.segment(cursor, olen) = out_block * x;
      carried[sidx] = x;
    };

    results[0].solve_diagnostics.push_back(
        {static_cast<Eigen::Index>(w), "optimal", 0.0, 0, ""});
    apply(0, x_ew);

    for (std::size_t ia = 0; ia < na; ++ia) {
      for (std::size_t ib = 0; ib < nb; ++ib) {
        const std::size_t sidx = 1 + ia * nb + ib;
        WindowDiagnostic d;
        d.window = static_cast<Eigen::Index>(w);
        if (!window_ok) {
          d.status = "failed";
          d.detail = window_detail;
          results[sidx].complete = false;
          apply(sidx, carried[sidx]);
        } else {
          const PointOutcome& o = outcomes[(degenerate ? 0 : ia) * nb + ib];
          d.status = o.status;
          d.gap = o.gap;
          d.nodes = o.nodes;
          d.detail = o.detail;
          if (o.ok) {
            apply(sidx, o.x);
          } else {
            results[sidx].complete = false;
            apply(sidx, carried[sidx]);
          }
        }
        results[sidx].solve_diagnostics.push_back(std::move(d));
      }
    }
    cursor += olen;
  }
  return results;
}

}  // namespace mvvar
