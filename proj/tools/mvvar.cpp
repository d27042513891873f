#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvvar/backtest.hpp"
#include "mvvar/frontier.hpp"
#include "mvvar/io.hpp"
#include "mvvar/market_data.hpp"
#include "mvvar/metrics.hpp"
#include "mvvar/miqp.hpp"

namespace fs = std::filesystem;
using namespace mvvar;

namespace {

// Exit codes: 0 solved/completed, 1 internal failure, 2 bad input,
// 3 infeasible model, 4 resource limit hit.
constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitLimit = 4;

struct CommonOpts {
  std::string data;
  std::string period = "weekly";
  double epsilon = 0.05;
  std::string out = "out";
  double tol_gap = 1e-8;
  long node_limit = 0;
  double time_limit = 0.0;
  int workers = 1;
  long seed = 0;
};

SolverOptions solver_options(const CommonOpts& o) {
  SolverOptions s;
  s.tol_gap = o.tol_gap;
  s.node_limit = o.node_limit;
  s.time_limit_sec = o.time_limit;
  s.workers = o.workers;
  return s;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_data) {
  auto* data = cmd->add_option("--data", o.data, "returns CSV (header row; optional date column)")
                   ->envname("MVVAR_DATA")
                   ->check(CLI::ExistingFile);
  if (needs_data) data->required();
  cmd->add_option("--period", o.period, "row frequency")
      ->envname("MVVAR_PERIOD")
      ->check(CLI::IsMember({"weekly", "daily"}));
  cmd->add_option("--epsilon", o.epsilon, "VaR confidence level in (0, 0.5]")
      ->envname("MVVAR_EPSILON");
  cmd->add_option("--out", o.out, "output directory")->envname("MVVAR_OUT");
  cmd->add_option("--tol-gap", o.tol_gap, "absolute branch-and-bound gap tolerance")
      ->envname("MVVAR_TOL_GAP");
  cmd->add_option("--node-limit", o.node_limit, "node budget per solve (0 = unlimited)")
      ->envname("MVVAR_NODE_LIMIT");
  cmd->add_option("--time-limit", o.time_limit, "seconds per solve (0 = unlimited)")
      ->envname("MVVAR_TIME_LIMIT");
  cmd->add_option("--workers", o.workers, "worker threads for grid sweeps")
      ->envname("MVVAR_WORKERS");
  cmd->add_option("--seed", o.seed, "recorded in the manifest for reproducibility")
      ->envname("MVVAR_SEED");
}

ScenarioMatrix load_data(const CommonOpts& o) {
  return load_returns(o.data, period_kind_from_string(o.period));
}

/// Parses a comma-separated grid list; empty input or empty tokens are domain
/// errors so that an explicitly empty grid fails loudly instead of silently
/// becoming 0.
std::vector<double> parse_grid_list(const std::string& s, const char* name) {
  std::vector<double> out;
  if (s.empty()) return out;  // downstream validation reports the empty grid
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string tok =
        s.substr(start, comma == std::string::npos ? comma : comma - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok.empty())
      throw DomainError(std::string(name) + ": bad grid value '" + tok + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

ordered_json manifest_base(const std::string& command, const CommonOpts& o,
                           const ScenarioMatrix& sc) {
  ordered_json j;
  j["command"] = command;
  ordered_json d;
  d["path"] = o.data;
  d["fnv1a64"] = fnv1a64_file(o.data);
  d["period"] = to_string(sc.period_kind());
  d["rows"] = sc.periods();
  d["assets"] = sc.assets();
  j["dataset"] = std::move(d);
  j["epsilon"] = json_num(o.epsilon);
  j["seed"] = o.seed;
  j["solver"] = solver_options_json(solver_options(o));
  return j;
}

std::string out_path(const CommonOpts& o, const std::string& name) {
  fs::create_directories(o.out);
  return (fs::path(o.out) / name).string();
}

int cmd_solve(const CommonOpts& o, double eta, double z) {
  auto sc = load_data(o);
  auto st = compute_stats(sc);
  auto model = build_model(st, sc, eta, z, ConfidenceLevel(o.epsilon),
                           MiqpObjective::min_variance);
  ordered_json manifest = manifest_base("solve", o, sc);
  manifest["eta"] = json_num(eta);
  manifest["z"] = json_num(z);
  manifest["outputs"] = {"solution.json"};
  write_json_file(out_path(o, "manifest.json"), manifest);

  MiqpSolution sol;
  try {
    sol = solve_miqp(model, solver_options(o));
  } catch (const MiqpResourceError& e) {
    ordered_json j;
    j["status"] = "limit";
    j["detail"] = e.what();
    if (e.incumbent) {
      j["gap"] = json_num(e.gap);
      j["incumbent"] = solution_json(*e.incumbent, sc.asset_names());
    }
    write_json_file(out_path(o, "solution.json"), j);
    std::cerr << "mvvar: " << e.what() << "\n";
    return kExitLimit;
  }
  write_json_file(out_path(o, "solution.json"), solution_json(sol, sc.asset_names()));
  if (sol.status == MiqpStatus::infeasible) {
    std::cerr << "mvvar: model infeasible at eta " << fmt12(eta) << ", z " << fmt12(z)
              << "\n";
    return kExitInfeasible;
  }
  std::cout << "objective " << fmt12(sol.objective) << " var_risk " << fmt12(-sol.r_eps)
            << "\n";
  return kExitOk;
}

int cmd_frontier(const CommonOpts& o, const std::vector<double>& alphas,
                 const std::vector<double>& betas) {
  auto sc = load_data(o);
  auto st = compute_stats(sc);
  ordered_json manifest = manifest_base("frontier", o, sc);
  manifest["alphas"] = alphas;
  manifest["betas"] = betas;
  manifest["outputs"] = {"frontier.csv", "frontier.json"};
  auto points = sweep_surface(st, sc, ConfidenceLevel(o.epsilon), alphas, betas,
                              solver_options(o));
  write_json_file(out_path(o, "manifest.json"), manifest);
  write_frontier_csv(out_path(o, "frontier.csv"), points);
  write_json_file(out_path(o, "frontier.json"), frontier_json(points, sc.asset_names()));
  std::cout << points.size() << " frontier points written to " << o.out << "\n";
  return kExitOk;
}

int cmd_backtest(const CommonOpts& o, const std::vector<double>& alphas,
                 const std::vector<double>& betas, long in_sample, long holding) {
  auto sc = load_data(o);
  BacktestConfig cfg;
  cfg.epsilon = ConfidenceLevel(o.epsilon);
  cfg.alphas = alphas;
  cfg.betas = betas;
  // "one financial month": 4 weekly rows or 20 daily rows
  const bool daily = sc.period_kind() == PeriodKind::daily;
  cfg.in_sample_len = in_sample > 0 ? in_sample : (daily ? 200 : 104);
  cfg.holding_len = holding > 0 ? holding : (daily ? 20 : 4);
  cfg.solver = solver_options(o);

  ordered_json manifest = manifest_base("backtest", o, sc);
  manifest["alphas"] = alphas;
  manifest["betas"] = betas;
  manifest["in_sample_len"] = cfg.in_sample_len;
  manifest["holding_len"] = cfg.holding_len;
  manifest["outputs"] = {"series.csv", "weights.csv", "diagnostics.csv", "metrics.csv",
                         "ranks.csv"};
  // validate the schedule before committing any file
  make_schedule(sc.periods(), cfg.in_sample_len, cfg.holding_len);
  write_json_file(out_path(o, "manifest.json"), manifest);

  auto results = run_backtest(sc, cfg);
  write_series_csv(out_path(o, "series.csv"), results);
  write_weights_csv(out_path(o, "weights.csv"), results, sc.asset_names());
  write_diagnostics_csv(out_path(o, "diagnostics.csv"), results);

  if (results.front().oos_returns.size() >= 2) {
    std::vector<std::pair<std::string, MetricsReport>> reports;
    for (const auto& r : results)
      reports.emplace_back(r.strategy_id, compute_metrics(r.oos_returns, r.weight_history));
    write_metrics_csv(out_path(o, "metrics.csv"), reports);
    if (reports.size() >= 2) write_ranks_csv(out_path(o, "ranks.csv"), rank_report(reports));
  } else {
    std::cerr << "mvvar: out-of-sample series too short for metrics\n";
  }
  std::cout << results.size() << " strategy reports written to " << o.out << "\n";
  return kExitOk;
}

int cmd_metrics(const CommonOpts& o, const std::string& series_path,
                const std::string& weights_path) {
  auto series = read_series_csv(series_path);
  if (series.empty()) throw ParseError(series_path + ": no series columns");
  std::map<std::string, std::vector<Eigen::VectorXd>> weights;
  if (!weights_path.empty()) weights = read_weights_csv(weights_path);
  const std::vector<Eigen::VectorXd> dummy = {Eigen::VectorXd::Ones(1)};
  std::vector<std::pair<std::string, MetricsReport>> reports;
  for (const auto& [id, r] : series) {
    auto it = weights.find(id);
    reports.emplace_back(id, compute_metrics(r, it == weights.end() ? dummy : it->second));
  }
  write_metrics_csv(out_path(o, "metrics.csv"), reports);
  if (reports.size() >= 2) write_ranks_csv(out_path(o, "ranks.csv"), rank_report(reports));
  std::cout << reports.size() << " metric reports written to " << o.out << "\n";
  return kExitOk;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const MiqpResourceError& e) {
    std::cerr << "mvvar: " << e.what() << "\n";
    return kExitLimit;
  } catch (const ResourceLimitError& e) {
    std::cerr << "mvvar: " << e.what() << "\n";
    return kExitLimit;
  } catch (const ModelError& e) {
    std::cerr << "mvvar: infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InternalError& e) {
    std::cerr << "mvvar: internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const Error& e) {
    std::cerr << "mvvar: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "mvvar: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-Variance-VaR portfolio engine"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "",
                 "config file with a [solve]/[frontier]/[backtest]/[metrics] section; "
                 "command-line flags win")
      ->envname("MVVAR_CONFIG");

  CommonOpts solve_o, frontier_o, backtest_o, metrics_o;
  double eta = 0.0, z = kInf;
  const std::vector<double> default_alphas = {0.0, 0.25, 0.5, 0.75};
  const std::vector<double> default_betas = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  std::string f_alphas_s, f_betas_s, b_alphas_s, b_betas_s;
  long in_sample = 0, holding = 0;
  std::string series_path, weights_path;

  auto* solve = app.add_subcommand("solve", "solve one min-variance problem at (eta, z)");
  add_common(solve, solve_o, true);
  solve->add_option("--eta", eta, "return floor")->required()->envname("MVVAR_ETA");
  solve->add_option("--z", z, "VaR cap (default +inf)")->envname("MVVAR_Z");

  auto* frontier = app.add_subcommand("frontier", "sweep the efficient surface grid");
  add_common(frontier, frontier_o, true);
  auto* f_alphas_opt =
      frontier->add_option("--alphas", f_alphas_s, "return-target grid in [0,1], comma-separated")
          ->envname("MVVAR_ALPHAS");
  auto* f_betas_opt =
      frontier->add_option("--betas", f_betas_s, "VaR-cap grid in [0,1], comma-separated")
          ->envname("MVVAR_BETAS");

  auto* backtest = app.add_subcommand("backtest", "rolling-window out-of-sample evaluation");
  add_common(backtest, backtest_o, true);
  auto* b_alphas_opt =
      backtest->add_option("--alphas", b_alphas_s, "return-target grid in [0,1], comma-separated")
          ->envname("MVVAR_ALPHAS");
  auto* b_betas_opt =
      backtest->add_option("--betas", b_betas_s, "VaR-cap grid in [0,1], comma-separated")
          ->envname("MVVAR_BETAS");
  backtest->add_option("--in-sample", in_sample,
                       "estimation window rows (default 104 weekly / 200 daily)")
      ->envname("MVVAR_IN_SAMPLE");
  backtest->add_option("--holding", holding, "holding rows (default 4 weekly / 20 daily)")
      ->envname("MVVAR_HOLDING");

  auto* metrics = app.add_subcommand("metrics", "performance metrics over a series CSV");
  add_common(metrics, metrics_o, false);
  metrics->add_option("--series", series_path, "series CSV (period column + strategies)")
      ->required()
      ->check(CLI::ExistingFile)
      ->envname("MVVAR_SERIES");
  metrics->add_option("--weights", weights_path, "tall weights CSV for turnover")
      ->check(CLI::ExistingFile)
      ->envname("MVVAR_WEIGHTS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  if (solve->parsed()) return run_guarded([&] { return cmd_solve(solve_o, eta, z); });
  if (frontier->parsed())
    return run_guarded([&] {
      const auto alphas =
          f_alphas_opt->count() ? parse_grid_list(f_alphas_s, "--alphas") : default_alphas;
      const auto betas =
          f_betas_opt->count() ? parse_grid_list(f_betas_s, "--betas") : default_betas;
      return cmd_frontier(frontier_o, alphas, betas);
    });
  if (backtest->parsed())
    return run_guarded([&] {
      const auto alphas =
          b_alphas_opt->count() ? parse_grid_list(b_alphas_s, "--alphas") : default_alphas;
      const auto betas =
          b_betas_opt->count() ? parse_grid_list(b_betas_s, "--betas") : default_betas;
      return cmd_backtest(backtest_o, alphas, betas, in_sample, holding);
    });
  return run_guarded([&] { return cmd_metrics(metrics_o, series_path, weights_path); });
}
