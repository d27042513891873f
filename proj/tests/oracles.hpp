#pragma once

// Brute-force reference solvers used only by tests. They avoid the big-M
// indicator formulation entirely: exceedance sets are enumerated outright and
// the quantile variable is eliminated (min-variance) or reduced to a plain
// maximin auxiliary (min-VaR), so agreement with the branch-and-bound is a
// genuine cross-check of the combinatorial search.

#include <functional>
#include <vector>

#include "mvvar/market_data.hpp"
#include "mvvar/qp.hpp"
#include "mvvar/risk.hpp"

namespace mvvar::testing {

struct OracleResult {
  bool feasible = false;
  double objective = kInf;
  Eigen::VectorXd x;
};

inline void for_each_subset(Eigen::Index t, Eigen::Index max_size,
                            const std::function<void(const std::vector<Eigen::Index>&)>& fn) {
  std::vector<Eigen::Index> subset;
  std::function<void(Eigen::Index)> rec = [&](Eigen::Index next) {
    fn(subset);
    if (static_cast<Eigen::Index>(subset.size()) == max_size) return;
    for (Eigen::Index i = next; i < t; ++i) {
      subset.push_back(i);
      rec(i + 1);
      subset.pop_back();
    }
  };
  rec(0);
}

/// min x'Sigma x over the simplex with mu'x >= eta and R_t(x) >= -z for every
/// scenario outside the exceedance set; minimized over all sets of size <= K.
inline OracleResult enum_min_variance(const AssetStats& st, const ScenarioMatrix& sc,
                                      double eta, double z, ConfidenceLevel eps) {
  const Eigen::Index n = st.assets(), t = sc.periods();
  const Eigen::Index k = exceedance_count(eps, t);
  OracleResult best;

  for_each_subset(t, k, [&](const std::vector<Eigen::Index>& s) {
    std::vector<char> excluded(static_cast<std::size_t>(t), 0);
    for (auto i : s) excluded[static_cast<std::size_t>(i)] = 1;

    QpProblem p = make_qp(n);
    p.Q = st.sigma;
    p.A_eq = Eigen::MatrixXd::Ones(1, n);
    p.b_eq = Eigen::VectorXd::Ones(1);
    p.lb.setZero();
    const Eigen::Index rows = (std::isfinite(eta) ? 1 : 0) + t - static_cast<Eigen::Index>(s.size());
    p.A_in.setZero(rows, n);
    p.b_in.resize(rows);
    Eigen::Index r = 0;
    if (std::isfinite(eta)) {
      p.A_in.row(r) = -st.mu.transpose();
      p.b_in(r) = -eta;
      ++r;
    }
    for (Eigen::Index i = 0; i < t; ++i) {
      if (excluded[static_cast<std::size_t>(i)]) continue;
      p.A_in.row(r) = -sc.returns().row(i);
      p.b_in(r) = z;
      ++r;
    }
    auto sol = solve_qp(p);
    if (sol.status != QpStatus::optimal) return;
    if (!best.feasible || sol.objective < best.objective) {
      best.feasible = true;
      best.objective = sol.objective;
      best.x = sol.x;
    }
  });
  return best;
}

/// min over exceedance sets of the maximin LP: maximize theta subject to
/// theta <= R_t(x) outside the set, simplex, mu'x >= eta. Objective is the
/// resulting VaR (= -theta*).
inline OracleResult enum_min_var_risk(const AssetStats& st, const ScenarioMatrix& sc,
                                      double eta, ConfidenceLevel eps) {
  const Eigen::Index n = st.assets(), t = sc.periods();
  const Eigen::Index k = exceedance_count(eps, t);
  OracleResult best;

  for_each_subset(t, k, [&](const std::vector<Eigen::Index>& s) {
    std::vector<char> excluded(static_cast<std::size_t>(t), 0);
    for (auto i : s) excluded[static_cast<std::size_t>(i)] = 1;

    QpProblem p = make_qp(n + 1);  // (x, theta)
    p.c(n) = -1.0;
    p.A_eq.setZero(1, n + 1);
    p.A_eq.leftCols(n).setOnes();
    p.b_eq = Eigen::VectorXd::Ones(1);
    p.lb.head(n).setZero();
    const Eigen::Index rows = (std::isfinite(eta) ? 1 : 0) + t - static_cast<Eigen::Index>(s.size());
    p.A_in.setZero(rows, n + 1);
    p.b_in.resize(rows);
    Eigen::Index r = 0;
    if (std::isfinite(eta)) {
      p.A_in.row(r).head(n) = -st.mu.transpose();
      p.b_in(r) = -eta;
      ++r;
    }
    for (Eigen::Index i = 0; i < t; ++i) {
      if (excluded[static_cast<std::size_t>(i)]) continue;
      p.A_in.row(r).head(n) = -sc.returns().row(i);
      p.A_in(r, n) = 1.0;
      p.b_in(r) = 0.0;
      ++r;
    }
    auto sol = solve_qp(p);
    if (sol.status != QpStatus::optimal) return;
    const double var_s = sol.objective;  // == -theta*
    if (!best.feasible || var_s < best.objective) {
      best.feasible = true;
      best.objective = var_s;
      best.x = sol.x.head(n);
    }
  });
  return best;
}

}  // namespace mvvar::testing
