#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mvvar/errors.hpp"
#include "mvvar/market_data.hpp"
#include "mvvar/miqp.hpp"
#include "mvvar/qp.hpp"
#include "mvvar/risk.hpp"
#include "mvvar/util.hpp"

namespace mvvar {

/// Attainable return-target interval. The lower end is the larger of the two
/// anchor portfolios' expected returns (global minimum-variance and global
/// minimum-VaR), the upper end the best single-asset mean.
struct EtaRange {
  double eta_min = 0.0;
  double eta_max = 0.0;
  double eta_minV = 0.0;
  double eta_minVaR = 0.0;
};

struct ZRange {
  double z_min = 0.0;
  double z_max = 0.0;
};

inline EtaRange eta_range(const AssetStats& stats, const ScenarioMatrix& scenarios,
                          ConfidenceLevel eps, const SolverOptions& opts = {}) {
  EtaRange r;
  r.eta_max = stats.mu.maxCoeff();
  auto gmv = solve_markowitz(stats, -kInf);
  if (gmv.status != QpStatus::optimal)
    throw InternalError("unconstrained minimum-variance solve returned " +
                        to_string(gmv.status));
  r.eta_minV = stats.mu.dot(gmv.x);
  auto min_var = solve_min_var_risk(stats, scenarios, -kInf, eps, opts);
  r.eta_minVaR = stats.mu.dot(min_var.first);
  // both anchors are feasible portfolios, so their means cannot exceed
  // eta_max beyond rounding; the clamp keeps the interval well ordered
  r.eta_min = std::min(std::max(r.eta_minV, r.eta_minVaR), r.eta_max);
  return r;
}

namespace frontier_detail {

/// z interval at a return floor assumed to lie inside the eta interval.
inline ZRange z_range_at(double eta, const AssetStats& stats, const ScenarioMatrix& scenarios,
                         ConfidenceLevel eps, const SolverOptions& opts) {
  ZRange z;
  z.z_min = solve_min_var_risk(stats, scenarios, eta, eps, opts).second.value;
  auto mk = solve_markowitz(stats, eta);
  if (mk.status != QpStatus::optimal)
    throw InternalError("return floor " + fmt12(eta) +
                        " inside the eta interval but Markowitz solve returned " +
                        to_string(mk.status));
  z.z_max = empirical_var(portfolio_returns(scenarios, mk.x), eps).value;
  if (z.z_min > z.z_max + 1e-9)
    throw InternalError("z interval inverted at eta " + fmt12(eta) + ": z_min " +
                        fmt12(z.z_min) + " > z_max " + fmt12(z.z_max));
  z.z_min = std::min(z.z_min, z.z_max);
  return z;
}

}  // namespace frontier_detail

inline ZRange z_range(double eta, const AssetStats& stats, const ScenarioMatrix& scenarios,
                      ConfidenceLevel eps, const SolverOptions& opts = {}) {
  auto er = eta_range(stats, scenarios, eps, opts);
  if (!(eta >= er.eta_min - 1e-12) || !(eta <= er.eta_max + 1e-12))
    throw DomainError("eta " + fmt12(eta) + " outside [" + fmt12(er.eta_min) + ", " +
                      fmt12(er.eta_max) + "]");
  return frontier_detail::z_range_at(eta, stats, scenarios, eps, opts);
}

/// One swept grid portfolio.
struct FrontierPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double eta = 0.0;
  double z = 0.0;
  Eigen::VectorXd weights;
  double variance = 0.0;
  double var_risk = 0.0;
  double exp_return = 0.0;
  Eigen::Index n_assets = 0;
};

/// Sweeps the efficient surface over eta_alpha = eta_min + alpha (eta_max -
/// eta_min) and z_beta = z_min(eta) + beta (z_max(eta) - z_min(eta)), one
/// minimum-variance MIQP per grid point, returned in row-major (alpha, beta)
/// order. A degenerate market (eta_min = eta_max) collapses the sweep to a
/// single eta, reported with alpha = 0. Grid points are solved concurrently
/// when opts.workers > 1; results and tie-breaks do not depend on the worker
/// count.
inline std::vector<FrontierPoint> sweep_surface(const AssetStats& stats,
                                                const ScenarioMatrix& scenarios,
                                                ConfidenceLevel eps,
                                                std::vector<double> alphas,
                                                std::vector<double> betas,
                                                const SolverOptions& opts = {}) {
  if (alphas.empty() || betas.empty()) throw DomainError("empty sweep grid");
  for (double a : alphas)
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("alpha " + fmt12(a) + " outside [0, 1]");
  for (double b : betas)
    if (!(b >= 0.0 && b <= 1.0)) throw DomainError("beta " + fmt12(b) + " outside [0, 1]");

  const EtaRange er = eta_range(stats, scenarios, eps, opts);
  if (er.eta_max - er.eta_min <= 1e-14 * (1.0 + std::abs(er.eta_max))) alphas = {0.0};

  std::vector<double> etas(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i)
    etas[i] = er.eta_min + alphas[i] * (er.eta_max - er.eta_min);

  std::vector<ZRange> zr(alphas.size());
  parallel_for_indexed(alphas.size(), opts.workers, [&](std::size_t i) {
    zr[i] = frontier_detail::z_range_at(etas[i], stats, scenarios, eps, opts);
  });

  std::vector<FrontierPoint> points(alphas.size() * betas.size());
  parallel_for_indexed(points.size(), opts.workers, [&](std::size_t idx) {
    const std::size_t ia = idx / betas.size(), ib = idx % betas.size();
    const double eta = etas[ia];
    const double z = zr[ia].z_min + betas[ib] * (zr[ia].z_max - zr[ia].z_min);
    auto model = build_model(stats, scenarios, eta, z, eps, MiqpObjective::min_variance);
    auto sol = solve_miqp(model, opts);
    if (sol.status != MiqpStatus::optimal)
      throw InternalError("grid point alpha " + fmt12(alphas[ia]) + ", beta " +
                          fmt12(betas[ib]) +
                          " reported infeasible; the z interval guarantees feasibility");
    FrontierPoint& p = points[idx];
    p.alpha = alphas[ia];
    p.beta = betas[ib];
    p.eta = eta;
    p.z = z;
    p.weights = sol.x;
    p.variance = sol.objective;
    p.var_risk = -sol.r_eps;
    p.exp_return = stats.mu.dot(sol.x);
    p.n_assets = (sol.x.array() > 1e-6).count();
  });
  return points;
}

}  // namespace mvvar
