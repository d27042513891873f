#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "mvvar/errors.hpp"
#include "mvvar/market_data.hpp"
#include "mvvar/qp.hpp"
#include "mvvar/risk.hpp"
#include "mvvar/util.hpp"

namespace mvvar {

enum class MiqpObjective { min_variance, min_var_risk };
enum class MiqpStatus { optimal, infeasible };

inline std::string to_string(MiqpStatus s) {
  return s == MiqpStatus::optimal ? "optimal" : "infeasible";
}

struct TreeStats {
  long nodes = 0;
  long incumbent_updates = 0;
  double root_bound = -kInf;
};

struct SolverOptions {
  double tol_gap = 1e-8;        // absolute objective gap at which nodes prune
  double rel_gap = 1e-6;        // relative counterpart
  long node_limit = 0;          // 0: unlimited
  double time_limit_sec = 0.0;  // 0: unlimited
  int workers = 1;              // consumed by grid sweeps; a single solve is sequential
};

/// The mixed-integer model: minimize variance (or maximize the quantile
/// variable) over the simplex subject to a return floor, the VaR cap
/// -r_eps <= z, per-scenario indicator rows r_eps <= R_t(x) + M_t(1-y_t),
/// and the counting row sum(y) >= T - K.
struct MiqpModel {
  AssetStats stats;
  ScenarioMatrix scenarios;
  double eta;    // -inf drops the return floor
  double z_cap;  // +inf drops the VaR cap
  ConfidenceLevel epsilon;
  Eigen::VectorXd big_m;
  MiqpObjective objective_kind;
};

struct MiqpSolution {
  MiqpStatus status = MiqpStatus::optimal;
  Eigen::VectorXd x;
  double r_eps = 0.0;
  Eigen::VectorXi y;
  double objective = kInf;
  double bound_gap = 0.0;
  TreeStats tree_stats;
};

/// Thrown when a node or time limit stops the search; carries the best
/// incumbent found so far (if any) and its proven gap.
class MiqpResourceError : public ResourceLimitError {
 public:
  MiqpResourceError(const std::string& msg, std::optional<MiqpSolution> best, double gap)
      : ResourceLimitError(msg), incumbent(std::move(best)), gap(gap) {}
  std::optional<MiqpSolution> incumbent;
  double gap;
};

/// Per-scenario big-M: M_t = r_max_global - min_k r_kt. Valid because any
/// feasible quantile variable satisfies r_eps <= max_t R_t(x) <= r_max_global
/// while every portfolio return satisfies R_t(x) >= min_k r_kt.
inline Eigen::VectorXd compute_big_m(const ScenarioMatrix& s) {
  const double rmax = s.returns().maxCoeff();
  return (rmax - s.returns().rowwise().minCoeff().array()).matrix();
}

inline MiqpModel build_model(const AssetStats& stats, const ScenarioMatrix& scenarios,
                             double eta, double z_cap, ConfidenceLevel eps,
                             MiqpObjective kind) {
  if (stats.assets() != scenarios.assets())
    throw DimensionError("stats cover " + std::to_string(stats.assets()) +
                         " assets but the scenario matrix has " +
                         std::to_string(scenarios.assets()));
  if (std::isnan(eta) || eta == kInf) throw DomainError("eta must be finite or -inf");
  if (std::isnan(z_cap) || z_cap == -kInf) throw DomainError("z cap must be finite or +inf");
  if (kind == MiqpObjective::min_var_risk) z_cap = kInf;  // the cap is what we optimize
  return MiqpModel{stats, scenarios, eta, z_cap, eps, compute_big_m(scenarios), kind};
}

namespace miqp_detail {

struct Node {
  double bound;
  long id;
  std::vector<std::int8_t> lo, hi;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MiqpModel& m, const SolverOptions& opts)
      : m_(m),
        opts_(opts),
        n_(m.stats.assets()),
        t_(m.scenarios.periods()),
        k_(exceedance_count(m.epsilon, m.scenarios.periods())) {
    build_base();
  }

  MiqpSolution run() {
    const auto t0 = std::chrono::steady_clock::now();

    // The x-projection of the feasible set is contained in the Markowitz
    // feasible set, so Markowitz infeasibility settles the MIQP immediately;
    // a Markowitz optimum that happens to respect the cap seeds the incumbent.
    auto markowitz = solve_markowitz(m_.stats, m_.eta);
    if (markowitz.status == QpStatus::infeasible) return infeasible_solution();
    if (markowitz.status != QpStatus::optimal)
      throw InternalError("Markowitz relaxation returned " + to_string(markowitz.status));
    try_incumbent(markowitz.x);

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(root_node());
    long next_id = 1;
    double final_lower = -kInf;
    bool emptied_naturally = true;

    while (!open.empty()) {
      const Node node = open.top();

      if (incumbent_ && node.bound >= incumbent_->objective - gap_threshold()) {
        // best-bound order: every remaining node carries the same or a
        // larger bound, so the whole tree is pruned at once
        final_lower = node.bound;
        emptied_naturally = false;
        break;
      }
      open.pop();
      ++stats_.nodes;

      if (opts_.node_limit > 0 && stats_.nodes > opts_.node_limit)
        throw limit_error("node limit " + std::to_string(opts_.node_limit) + " exceeded",
                          node.bound);
      if (opts_.time_limit_sec > 0.0) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
        if (elapsed.count() > opts_.time_limit_sec)
          throw limit_error("time limit " + fmt12(opts_.time_limit_sec) + "s exceeded",
                            node.bound);
      }

      auto rel = solve_relaxation(node);
      if (rel.status == QpStatus::infeasible) continue;
      if (rel.status != QpStatus::optimal)
        throw InternalError("node relaxation returned " + to_string(rel.status));
      const double v = rel.objective;
      try_incumbent(rel.x.head(n_));
      if (node.id == 0) {
        stats_.root_bound = v;
        if (k_ > 0 && std::isfinite(m_.z_cap)) dive(rel.x.head(n_));
      }
      if (incumbent_ && v >= incumbent_->objective - gap_threshold()) continue;

      // branch on the most fractional scenario boolean
      Eigen::Index branch_t = -1;
      double worst = 1e-6;
      for (Eigen::Index t = 0; t < t_; ++t) {
        if (node.lo[static_cast<std::size_t>(t)] == node.hi[static_cast<std::size_t>(t)])
          continue;
        const double y = rel.x(n_ + 1 + t);
        const double frac = std::min(y, 1.0 - y);
        if (frac > worst) {
          worst = frac;
          branch_t = t;
        }
      }
      if (branch_t < 0) continue;  // integral; the heuristic above recorded it

      Node off = node;
      off.bound = v;
      off.id = next_id++;
      off.hi[static_cast<std::size_t>(branch_t)] = 0;
      if (std::count(off.hi.begin(), off.hi.end(), 0) <= k_) open.push(std::move(off));

      Node on = node;
      on.bound = v;
      on.id = next_id++;
      on.lo[static_cast<std::size_t>(branch_t)] = 1;
      open.push(std::move(on));
    }

    if (!incumbent_) return infeasible_solution();
    MiqpSolution sol = *incumbent_;
    sol.status = MiqpStatus::optimal;
    if (emptied_naturally) final_lower = sol.objective;
    sol.bound_gap = std::max(0.0, sol.objective - final_lower);
    sol.tree_stats = stats_;
    return sol;
  }

 private:
  double gap_threshold() const {
    return std::max(opts_.tol_gap, opts_.rel_gap * std::abs(incumbent_->objective));
  }

  MiqpSolution infeasible_solution() const {
    MiqpSolution sol;
    sol.status = MiqpStatus::infeasible;
    sol.x = Eigen::VectorXd::Zero(n_);
    sol.y = Eigen::VectorXi::Zero(t_);
    sol.tree_stats = stats_;
    return sol;
  }

  MiqpResourceError limit_error(const std::string& what, double open_bound) {
    std::optional<MiqpSolution> best;
    double gap = kInf;
    if (incumbent_) {
      best = *incumbent_;
      best->status = MiqpStatus::optimal;
      best->tree_stats = stats_;
      gap = std::max(0.0, best->objective - open_bound);
      best->bound_gap = gap;
    }
    return MiqpResourceError("MIQP " + what, std::move(best), gap);
  }

  Node root_node() const {
    Node root;
    root.bound = -kInf;
    root.id = 0;
    root.lo.assign(static_cast<std::size_t>(t_), 0);
    root.hi.assign(static_cast<std::size_t>(t_), 1);
    // M_t = 0 certifies r_eps <= R_t(x) for every candidate portfolio, so the
    // indicator is free and y_t = 1 costs nothing
    for (Eigen::Index t = 0; t < t_; ++t)
      if (m_.big_m(t) <= 1e-15) root.lo[static_cast<std::size_t>(t)] = 1;
    return root;
  }

  void build_base() {
    const Eigen::Index nv = n_ + 1 + t_;
    base_ = make_qp(nv);
    if (m_.objective_kind == MiqpObjective::min_variance)
      base_.Q.topLeftCorner(n_, n_) = m_.stats.sigma;
    else
      base_.c(n_) = -1.0;  // maximize r_eps

    base_.A_eq.setZero(1, nv);
    base_.A_eq.leftCols(n_).setOnes();
    base_.b_eq = Eigen::VectorXd::Ones(1);

    Eigen::Index rows = t_ + 1;
    if (std::isfinite(m_.eta)) ++rows;
    if (std::isfinite(m_.z_cap)) ++rows;
    base_.A_in.setZero(rows, nv);
    base_.b_in.resize(rows);
    Eigen::Index r = 0;
    if (std::isfinite(m_.eta)) {
      base_.A_in.row(r).head(n_) = -m_.stats.mu.transpose();
      base_.b_in(r) = -m_.eta;
      ++r;
    }
    if (std::isfinite(m_.z_cap)) {
      base_.A_in(r, n_) = -1.0;
      base_.b_in(r) = m_.z_cap;
      ++r;
    }
    for (Eigen::Index t = 0; t < t_; ++t, ++r) {
      base_.A_in.row(r).head(n_) = -m_.scenarios.returns().row(t);
      base_.A_in(r, n_) = 1.0;
      base_.A_in(r, n_ + 1 + t) = m_.big_m(t);
      base_.b_in(r) = m_.big_m(t);
    }
    base_.A_in.row(r).tail(t_).setConstant(-1.0);
    base_.b_in(r) = static_cast<double>(k_ - t_);

    base_.lb.head(n_).setZero();  // long-only simplex; r_eps stays free
  }

  /// One-shot rounding dive: fix the K scenarios with the smallest portfolio
  /// returns (under the root relaxation weights) as the exceedances and solve
  /// that single leaf. For mid-range caps, where neither the Markowitz seed
  /// nor fractional-node roundings respect the cap, this plants a feasible
  /// incumbent before the tree search starts.
  void dive(const Eigen::VectorXd& x) {
    const Eigen::VectorXd r = m_.scenarios.returns() * x;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(t_));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return r(a) != r(b) ? r(a) < r(b) : a < b;
    });
    Node leaf;
    leaf.lo.assign(static_cast<std::size_t>(t_), 1);
    leaf.hi.assign(static_cast<std::size_t>(t_), 1);
    for (Eigen::Index j = 0; j < k_; ++j) {
      leaf.lo[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] = 0;
      leaf.hi[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] = 0;
    }
    auto sol = solve_relaxation(leaf);
    if (sol.status == QpStatus::optimal) try_incumbent(sol.x.head(n_));
  }

  QpSolution solve_relaxation(const Node& node) {
    QpProblem p = base_;
    for (Eigen::Index t = 0; t < t_; ++t) {
      p.lb(n_ + 1 + t) = static_cast<double>(node.lo[static_cast<std::size_t>(t)]);
      p.ub(n_ + 1 + t) = static_cast<double>(node.hi[static_cast<std::size_t>(t)]);
    }
    QpOptions qopts;
    qopts.validate = false;  // base problem is validated once at build time
    return solve_qp(p, qopts);
  }

  /// Rounds a relaxation portfolio into a feasible integer solution: the K
  /// scenarios with the smallest portfolio returns (ties by index) are the
  /// exceedances, and r_eps becomes the exact (K+1)-th smallest return via
  /// the same order-statistic routine the VaR measure uses, which keeps the
  /// reported quantile bit-identical to empirical_var of the weights.
  void try_incumbent(const Eigen::VectorXd& x) {
    const Eigen::VectorXd r = m_.scenarios.returns() * x;
    const double r_eps = kth_smallest(r, k_);
    if (-r_eps > m_.z_cap + 1e-10) return;

    const double obj =
        m_.objective_kind == MiqpObjective::min_variance ? x.dot(m_.stats.sigma * x) : -r_eps;
    if (incumbent_ && obj >= incumbent_->objective - 1e-14) return;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(t_));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return r(a) != r(b) ? r(a) < r(b) : a < b;
    });

    MiqpSolution inc;
    inc.x = x;
    inc.r_eps = r_eps;
    inc.y = Eigen::VectorXi::Ones(t_);
    for (Eigen::Index j = 0; j < k_; ++j) inc.y(order[static_cast<std::size_t>(j)]) = 0;
    inc.objective = obj;
    incumbent_ = std::move(inc);
    ++stats_.incumbent_updates;
  }

  const MiqpModel& m_;
  SolverOptions opts_;
  Eigen::Index n_, t_, k_;
  QpProblem base_;
  std::optional<MiqpSolution> incumbent_;
  TreeStats stats_;
};

}  // namespace miqp_detail

/// Exact branch-and-bound over the scenario booleans: best-bound node order
/// with deterministic (bound, id) tie-breaks, most-fractional branching with
/// smallest-index ties, per-node rounding heuristic, and pruning against the
/// incumbent at max(tol_gap, rel_gap * |incumbent|).
inline MiqpSolution solve_miqp(const MiqpModel& m, const SolverOptions& opts = {}) {
  return miqp_detail::BranchAndBound(m, opts).run();
}

/// Minimum-VaR portfolio at return floor eta: maximizes the quantile
/// variable through the same tree with a linear objective and no cap.
inline std::pair<Eigen::VectorXd, VaRValue> solve_min_var_risk(const AssetStats& stats,
                                                               const ScenarioMatrix& scenarios,
                                                               double eta, ConfidenceLevel eps,
                                                               const SolverOptions& opts = {}) {
  auto model = build_model(stats, scenarios, eta, kInf, eps, MiqpObjective::min_var_risk);
  auto sol = solve_miqp(model, opts);
  if (sol.status != MiqpStatus::optimal)
    throw ModelError("min-VaR problem infeasible: eta " + fmt12(eta) +
                     " exceeds every attainable expected return");
  return {sol.x, VaRValue{-sol.r_eps}};
}

}  // namespace mvvar
