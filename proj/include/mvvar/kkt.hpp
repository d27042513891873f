#pragma once

#include <cmath>

#include "mvvar/qp.hpp"

namespace mvvar {

/// Independent KKT audit of a claimed-optimal QP solution. Deliberately
/// written as plain per-row scalar loops rather than matrix algebra so it
/// shares no code path with the solver or with qp_residuals.
struct KktReport {
  double feasibility = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;
  double dual_negativity = 0.0;  // worst violation of dual sign constraints
  bool ok(double feas_tol = 1e-8, double stat_tol = 1e-6, double comp_tol = 1e-8) const {
    return feasibility <= feas_tol && stationarity <= stat_tol &&
           complementarity <= comp_tol && dual_negativity <= 1e-9;
  }
};

inline KktReport kkt_check(const QpProblem& p, const QpSolution& s) {
  KktReport rep;
  const Eigen::Index n = p.c.size();

  for (Eigen::Index i = 0; i < p.A_eq.rows(); ++i) {
    double lhs = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) lhs += p.A_eq(i, k) * s.x(k);
    rep.feasibility = std::max(rep.feasibility, std::abs(lhs - p.b_eq(i)));
  }
  for (Eigen::Index i = 0; i < p.A_in.rows(); ++i) {
    double lhs = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) lhs += p.A_in(i, k) * s.x(k);
    const double slack = p.b_in(i) - lhs;
    rep.feasibility = std::max(rep.feasibility, -slack);
    rep.complementarity = std::max(rep.complementarity, std::abs(s.dual_in(i) * slack));
    rep.dual_negativity = std::max(rep.dual_negativity, -s.dual_in(i));
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::isfinite(p.lb(k))) {
      rep.feasibility = std::max(rep.feasibility, p.lb(k) - s.x(k));
      rep.complementarity =
          std::max(rep.complementarity, std::abs(s.dual_lb(k) * (s.x(k) - p.lb(k))));
      rep.dual_negativity = std::max(rep.dual_negativity, -s.dual_lb(k));
    }
    if (std::isfinite(p.ub(k))) {
      rep.feasibility = std::max(rep.feasibility, s.x(k) - p.ub(k));
      rep.complementarity =
          std::max(rep.complementarity, std::abs(s.dual_ub(k) * (p.ub(k) - s.x(k))));
      rep.dual_negativity = std::max(rep.dual_negativity, -s.dual_ub(k));
    }
  }

  for (Eigen::Index k = 0; k < n; ++k) {
    double grad = p.c(k);
    for (Eigen::Index j = 0; j < n; ++j) grad += 2.0 * p.Q(k, j) * s.x(j);
    for (Eigen::Index i = 0; i < p.A_eq.rows(); ++i) grad += p.A_eq(i, k) * s.dual_eq(i);
    for (Eigen::Index i = 0; i < p.A_in.rows(); ++i) grad += p.A_in(i, k) * s.dual_in(i);
    if (std::isfinite(p.lb(k))) grad -= s.dual_lb(k);
    if (std::isfinite(p.ub(k))) grad += s.dual_ub(k);
    rep.stationarity = std::max(rep.stationarity, std::abs(grad));
  }
  return rep;
}

/// Validates a Farkas infeasibility certificate carried by an infeasible
/// QpSolution: the dual combination must cancel in variable space while the
/// combined right-hand side is strictly negative.
inline bool farkas_certificate_ok(const QpProblem& p, const QpSolution& s,
                                  double tol = 1e-7) {
  const Eigen::Index n = p.c.size();
  double scale = 1.0;
  double rhs = 0.0;
  for (Eigen::Index i = 0; i < p.A_eq.rows(); ++i) {
    scale = std::max(scale, std::abs(s.dual_eq(i)));
    rhs += p.b_eq(i) * s.dual_eq(i);
  }
  for (Eigen::Index i = 0; i < p.A_in.rows(); ++i) {
    if (s.dual_in(i) < -1e-9) return false;
    scale = std::max(scale, s.dual_in(i));
    rhs += p.b_in(i) * s.dual_in(i);
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (s.dual_lb(k) < -1e-9 || s.dual_ub(k) < -1e-9) return false;
    if (s.dual_lb(k) > 1e-9 && !std::isfinite(p.lb(k))) return false;
    if (s.dual_ub(k) > 1e-9 && !std::isfinite(p.ub(k))) return false;
    scale = std::max(scale, std::max(s.dual_lb(k), s.dual_ub(k)));
    if (std::isfinite(p.lb(k))) rhs -= p.lb(k) * s.dual_lb(k);
    if (std::isfinite(p.ub(k))) rhs += p.ub(k) * s.dual_ub(k);
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    double combo = 0.0;
    for (Eigen::Index i = 0; i < p.A_eq.rows(); ++i) combo += p.A_eq(i, k) * s.dual_eq(i);
    for (Eigen::Index i = 0; i < p.A_in.rows(); ++i) combo += p.A_in(i, k) * s.dual_in(i);
    combo -= s.dual_lb(k);
    combo += s.dual_ub(k);
    if (std::abs(combo) > tol * scale) return false;
  }
  return rhs < 0.0;
}

}  // namespace mvvar
