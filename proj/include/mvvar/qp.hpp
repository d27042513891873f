#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mvvar/errors.hpp"
#include "mvvar/market_data.hpp"
#include "mvvar/util.hpp"

namespace mvvar {

enum class QpStatus { optimal, infeasible, unbounded };

inline std::string to_string(QpStatus s) {
  switch (s) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::infeasible: return "infeasible";
    case QpStatus::unbounded: return "unbounded";
  }
  return "?";
}

/// Convex QP in the half-free convention: minimize x'Qx + c'x subject to
/// A_eq x = b_eq, A_in x <= b_in, lb <= x <= ub (entries of lb/ub may be
/// +-infinity).
struct QpProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;
  Eigen::VectorXd b_in;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
};

/// Empty problem skeleton over n variables: zero objective, no constraints,
/// free bounds.
inline QpProblem make_qp(Eigen::Index n) {
  QpProblem p;
  p.Q = Eigen::MatrixXd::Zero(n, n);
  p.c = Eigen::VectorXd::Zero(n);
  p.A_eq.resize(0, n);
  p.b_eq.resize(0);
  p.A_in.resize(0, n);
  p.b_in.resize(0);
  p.lb = Eigen::VectorXd::Constant(n, -kInf);
  p.ub = Eigen::VectorXd::Constant(n, kInf);
  return p;
}

/// Solver output. When status == optimal the duals satisfy the KKT system
/// with the documented residual bounds and the sign convention
///   2Qx + c + A_eq'dual_eq + A_in'dual_in - dual_lb + dual_ub = 0,
/// dual_in, dual_lb, dual_ub >= 0. When status == infeasible the same fields
/// carry a Farkas ray y of the constraint system instead: the combination
/// A_eq'y_eq + A_in'y_in - y_lb + y_ub vanishes while
/// b_eq'y_eq + b_in'y_in - lb'y_lb + ub'y_ub < 0.
struct QpSolution {
  QpStatus status = QpStatus::optimal;
  Eigen::VectorXd x;
  double objective = 0.0;
  Eigen::VectorXd dual_eq;
  Eigen::VectorXd dual_in;
  Eigen::VectorXd dual_lb;
  Eigen::VectorXd dual_ub;
  long iterations = 0;
};

struct QpOptions {
  long max_iterations = 0;  // 0: scaled from problem size
  bool validate = true;
  Eigen::VectorXd x_hint;   // optional warm start; used only if feasible
};

namespace qp_detail {

/// One uniform row system: rows [0, m_eq) are equalities a'x = b, the rest
/// are a'x <= b. Bounds are materialized as rows so the active-set core only
/// ever sees one constraint kind.
struct Rows {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::Index m_eq = 0;
  std::vector<int> group;            // 0 eq, 1 in, 2 ub, 3 lb
  std::vector<Eigen::Index> index;   // position within the group
};

inline Rows build_rows(const QpProblem& p) {
  const Eigen::Index n = p.c.size();
  Eigen::Index m = p.A_eq.rows() + p.A_in.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(p.ub(i))) ++m;
    if (std::isfinite(p.lb(i))) ++m;
  }
  Rows r;
  r.A.setZero(m, n);
  r.b.resize(m);
  r.m_eq = p.A_eq.rows();
  r.group.reserve(static_cast<std::size_t>(m));
  r.index.reserve(static_cast<std::size_t>(m));
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < p.A_eq.rows(); ++i, ++row) {
    r.A.row(row) = p.A_eq.row(i);
    r.b(row) = p.b_eq(i);
    r.group.push_back(0);
    r.index.push_back(i);
  }
  for (Eigen::Index i = 0; i < p.A_in.rows(); ++i, ++row) {
    r.A.row(row) = p.A_in.row(i);
    r.b(row) = p.b_in(i);
    r.group.push_back(1);
    r.index.push_back(i);
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::isfinite(p.ub(i))) {
      r.A(row, i) = 1.0;
      r.b(row) = p.ub(i);
      r.group.push_back(2);
      r.index.push_back(i);
      ++row;
    }
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::isfinite(p.lb(i))) {
      r.A(row, i) = -1.0;
      r.b(row) = -p.lb(i);
      r.group.push_back(3);
      r.index.push_back(i);
      ++row;
    }
  return r;
}

/// Greedy scan keeping only rows that are linearly independent of the ones
/// already kept; candidate order is preserved, so listing equality rows first
/// guarantees they survive.
inline std::vector<Eigen::Index> prune_independent(const Eigen::MatrixXd& A,
                                                   const std::vector<Eigen::Index>& cand) {
  const Eigen::Index n = A.cols();
  std::vector<Eigen::Index> kept;
  if (cand.empty()) return kept;
  Eigen::MatrixXd basis(n, std::min<Eigen::Index>(n, static_cast<Eigen::Index>(cand.size())));
  Eigen::Index k = 0;
  for (Eigen::Index i : cand) {
    if (k == n) break;
    basis.col(k) = A.row(i).transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis.leftCols(k + 1));
    if (qr.rank() == k + 1) {
      kept.push_back(i);
      ++k;
    }
  }
  return kept;
}

struct CoreResult {
  QpStatus status = QpStatus::optimal;
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;                // per uniform row, 0 off the final set
  std::vector<Eigen::Index> final_work;
  long iterations = 0;
  bool hit_limit = false;
};

/// Primal active-set method on the uniform row system, null-space variant.
/// Starts from a feasible x with an independent working set and maintains
/// feasibility throughout. Handles PSD-singular Q (including Q = 0, i.e.
/// pure LPs) by eigen-splitting the reduced Hessian into curved and flat
/// subspaces: flat descent directions trigger ray steps, flat zero-gradient
/// directions are ignored. Falls back to Bland's smallest-index rule after a
/// stretch of non-improving iterations to break degenerate cycles.
inline CoreResult active_set_min(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c,
                                 const Rows& rows, Eigen::VectorXd x,
                                 std::vector<Eigen::Index> work, long max_iters) {
  const Eigen::Index n = x.size();
  const Eigen::Index m = rows.A.rows();
  std::vector<char> in_work(static_cast<std::size_t>(m), 0);
  for (Eigen::Index i : work) in_work[static_cast<std::size_t>(i)] = 1;

  CoreResult res;
  res.lambda = Eigen::VectorXd::Zero(m);
  bool bland = false;
  int no_progress = 0;
  double best_obj = kInf;

  for (long iter = 1; iter <= max_iters; ++iter) {
    res.iterations = iter;
    const Eigen::Index mw = static_cast<Eigen::Index>(work.size());

    Eigen::MatrixXd awt(n, mw);
    for (Eigen::Index j = 0; j < mw; ++j) awt.col(j) = rows.A.row(work[static_cast<std::size_t>(j)]).transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(awt);
    const Eigen::Index rank = mw == 0 ? 0 : qr.rank();
    Eigen::MatrixXd z;
    if (mw == 0) {
      z = Eigen::MatrixXd::Identity(n, n);
    } else {
      Eigen::MatrixXd qfull = qr.householderQ();
      z = qfull.rightCols(n - rank);
    }

    Eigen::VectorXd g = 2.0 * (Q * x) + c;
    const double g_scale = 1.0 + g.cwiseAbs().maxCoeff();

    bool ray = false;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    if (z.cols() > 0) {
      Eigen::VectorXd gz = z.transpose() * g;
      Eigen::MatrixXd hz = 2.0 * (z.transpose() * Q * z);
      hz = 0.5 * (hz + hz.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hz);
      const Eigen::VectorXd& lam = es.eigenvalues();
      const Eigen::MatrixXd& v = es.eigenvectors();
      const double eig_tol = 1e-10 * std::max(1.0, lam.cwiseAbs().maxCoeff());
      Eigen::VectorXd gt = v.transpose() * gz;
      const double flat_tol = 1e-10 * g_scale;

      Eigen::VectorXd dir_t = Eigen::VectorXd::Zero(gt.size());
      bool have_flat_descent = false;
      for (Eigen::Index i = 0; i < gt.size(); ++i)
        if (lam(i) <= eig_tol && std::abs(gt(i)) > flat_tol) {
          dir_t(i) = -gt(i);
          have_flat_descent = true;
        }
      if (have_flat_descent) {
        ray = true;
        p = z * (v * dir_t);
        p /= p.cwiseAbs().maxCoeff();
      } else {
        for (Eigen::Index i = 0; i < gt.size(); ++i)
          dir_t(i) = lam(i) > eig_tol ? -gt(i) / lam(i) : 0.0;
        p = z * (v * dir_t);
      }
    }

    const double p_norm = p.size() == 0 ? 0.0 : p.cwiseAbs().maxCoeff();
    const double x_scale = 1.0 + x.cwiseAbs().maxCoeff();

    if (!ray && p_norm <= 1e-11 * x_scale) {
      Eigen::VectorXd lam_w = mw == 0 ? Eigen::VectorXd() : Eigen::VectorXd(qr.solve(-g));
      const double dual_tol = 1e-9 * g_scale;
      Eigen::Index drop = -1;
      double most_neg = -dual_tol;
      for (Eigen::Index j = 0; j < mw; ++j) {
        if (work[static_cast<std::size_t>(j)] < rows.m_eq) continue;
        const double v = lam_w(j);
        if (bland) {
          if (v < -dual_tol) {
            drop = j;
            break;
          }
        } else if (v < most_neg) {
          most_neg = v;
          drop = j;
        }
      }
      if (drop < 0) {
        res.status = QpStatus::optimal;
        res.x = x;
        for (Eigen::Index j = 0; j < mw; ++j) {
          const Eigen::Index row = work[static_cast<std::size_t>(j)];
          double v = lam_w(j);
          if (row >= rows.m_eq && v < 0.0) v = 0.0;
          res.lambda(row) = v;
        }
        res.final_work = work;
        return res;
      }
      in_work[static_cast<std::size_t>(work[static_cast<std::size_t>(drop)])] = 0;
      work.erase(work.begin() + drop);
      continue;
    }

    double alpha = ray ? kInf : 1.0;
    Eigen::Index block = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (in_work[static_cast<std::size_t>(i)]) continue;
      const double api = rows.A.row(i).dot(p);
      if (api <= 1e-12 * (1.0 + p_norm)) continue;
      double slack = rows.b(i) - rows.A.row(i).dot(x);
      if (slack < 0.0) slack = 0.0;
      const double ai = slack / api;
      if (ai < alpha - 1e-14) {
        alpha = ai;
        block = i;
      }
    }

    if (ray && block < 0) {
      res.status = QpStatus::unbounded;
      res.x = x;
      res.final_work = work;
      return res;
    }
    if (alpha > 0.0) x += alpha * p;
    if (block >= 0) {
      work.push_back(block);
      in_work[static_cast<std::size_t>(block)] = 1;
    }

    const double f = x.dot(Q * x) + c.dot(x);
    if (f < best_obj - 1e-14 * (1.0 + std::abs(best_obj))) {
      best_obj = f;
      no_progress = 0;
    } else if (++no_progress > 60) {
      bland = true;
    }
  }

  res.hit_limit = true;
  res.x = x;
  res.final_work = work;
  return res;
}

/// Working-set candidates at x: equality rows first (always), then rows
/// active within tol, pruned to a linearly independent set.
inline std::vector<Eigen::Index> initial_work(const Rows& rows, const Eigen::VectorXd& x,
                                              double tol) {
  std::vector<Eigen::Index> cand;
  for (Eigen::Index i = 0; i < rows.m_eq; ++i) cand.push_back(i);
  for (Eigen::Index i = rows.m_eq; i < rows.A.rows(); ++i) {
    const double resid = rows.A.row(i).dot(x) - rows.b(i);
    if (std::abs(resid) <= tol * (1.0 + std::abs(rows.b(i)))) cand.push_back(i);
  }
  return prune_independent(rows.A, cand);
}

struct Phase1Result {
  bool feasible = false;
  Eigen::VectorXd x;
  Eigen::VectorXd farkas;  // per original uniform row, when infeasible
  long iterations = 0;
  bool hit_limit = false;
};

/// Feasibility restoration via an artificial-variable LP, min sum(s), run
/// through the same active-set core. Violated equality rows get a signed
/// artificial column, violated inequality rows a slack-like one; the start
/// point (clamped zero, artificial magnitudes) is feasible by construction.
inline Phase1Result phase1(const QpProblem& p, const Rows& rows, long max_iters) {
  const Eigen::Index n = p.c.size();
  const Eigen::Index m = rows.A.rows();

  Eigen::VectorXd x0(n);
  for (Eigen::Index i = 0; i < n; ++i) x0(i) = std::clamp(0.0, p.lb(i), p.ub(i));

  std::vector<Eigen::Index> art_row;
  std::vector<double> art_sign;
  std::vector<double> art_val;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double resid = rows.b(i) - rows.A.row(i).dot(x0);
    if (i < rows.m_eq) {
      if (std::abs(resid) > 1e-12) {
        art_row.push_back(i);
        art_sign.push_back(resid > 0 ? 1.0 : -1.0);
        art_val.push_back(std::abs(resid));
      }
    } else if (resid < -1e-12) {
      art_row.push_back(i);
      art_sign.push_back(-1.0);
      art_val.push_back(-resid);
    }
  }
  const Eigen::Index na = static_cast<Eigen::Index>(art_row.size());

  Phase1Result out;
  if (na == 0) {
    out.feasible = true;
    out.x = x0;
    return out;
  }

  Rows ext;
  ext.m_eq = rows.m_eq;
  ext.A.setZero(m + na, n + na);
  ext.A.topLeftCorner(m, n) = rows.A;
  ext.b.resize(m + na);
  ext.b.head(m) = rows.b;
  for (Eigen::Index j = 0; j < na; ++j) {
    ext.A(art_row[static_cast<std::size_t>(j)], n + j) = art_sign[static_cast<std::size_t>(j)];
    ext.A(m + j, n + j) = -1.0;  // s_j >= 0
    ext.b(m + j) = 0.0;
  }

  Eigen::MatrixXd q0 = Eigen::MatrixXd::Zero(n + na, n + na);
  Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + na);
  c1.tail(na).setOnes();

  Eigen::VectorXd x0e(n + na);
  x0e.head(n) = x0;
  for (Eigen::Index j = 0; j < na; ++j) x0e(n + j) = art_val[static_cast<std::size_t>(j)];

  auto w0 = initial_work(ext, x0e, 1e-12);
  auto core = active_set_min(q0, c1, ext, x0e, w0, max_iters);
  out.iterations = core.iterations;
  if (core.hit_limit) {
    out.hit_limit = true;
    return out;
  }
  if (core.status == QpStatus::unbounded)
    throw InternalError("phase-1 LP reported unbounded; its objective is bounded below by 0");

  const double infeas = core.x.tail(na).sum();
  if (infeas > 1e-9 * (1.0 + rows.b.cwiseAbs().maxCoeff())) {
    out.feasible = false;
    out.farkas = core.lambda.head(m);
    return out;
  }
  out.feasible = true;
  out.x = core.x.head(n);
  return out;
}

}  // namespace qp_detail

/// Feasibility / stationarity / complementarity residuals used by the solver
/// contract, computed from the grouped problem form.
struct QpResiduals {
  double feasibility = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;
};

inline QpResiduals qp_residuals(const QpProblem& p, const QpSolution& s) {
  QpResiduals r;
  const Eigen::VectorXd& x = s.x;
  Eigen::VectorXd grad = 2.0 * (p.Q * x) + p.c;
  if (p.A_eq.rows() > 0) {
    Eigen::VectorXd resid = p.A_eq * x - p.b_eq;
    r.feasibility = std::max(r.feasibility, resid.cwiseAbs().maxCoeff());
    grad += p.A_eq.transpose() * s.dual_eq;
  }
  if (p.A_in.rows() > 0) {
    Eigen::VectorXd resid = p.A_in * x - p.b_in;
    for (Eigen::Index i = 0; i < resid.size(); ++i) {
      r.feasibility = std::max(r.feasibility, resid(i));
      r.complementarity = std::max(r.complementarity, std::abs(s.dual_in(i) * resid(i)));
    }
    grad += p.A_in.transpose() * s.dual_in;
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::isfinite(p.lb(i))) {
      r.feasibility = std::max(r.feasibility, p.lb(i) - x(i));
      r.complementarity =
          std::max(r.complementarity, std::abs(s.dual_lb(i) * (x(i) - p.lb(i))));
      grad(i) -= s.dual_lb(i);
    }
    if (std::isfinite(p.ub(i))) {
      r.feasibility = std::max(r.feasibility, x(i) - p.ub(i));
      r.complementarity =
          std::max(r.complementarity, std::abs(s.dual_ub(i) * (x(i) - p.ub(i))));
      grad(i) += s.dual_ub(i);
    }
  }
  r.stationarity = grad.cwiseAbs().maxCoeff();
  return r;
}

inline QpSolution solve_qp(const QpProblem& p, const QpOptions& opts = {}) {
  const Eigen::Index n = p.c.size();
  if (p.Q.rows() != n || p.Q.cols() != n || p.lb.size() != n || p.ub.size() != n ||
      p.A_eq.cols() != n || p.A_in.cols() != n || p.b_eq.size() != p.A_eq.rows() ||
      p.b_in.size() != p.A_in.rows())
    throw DimensionError("inconsistent QP dimensions");
  if (n == 0) throw DimensionError("QP over zero variables");

  if (opts.validate) {
    if (!p.Q.allFinite() || !p.c.allFinite() || !p.A_eq.allFinite() || !p.b_eq.allFinite() ||
        !p.A_in.allFinite() || !p.b_in.allFinite())
      throw DomainError("non-finite QP data");
    const double asym = (p.Q - p.Q.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) throw ModelError("Q asymmetry " + fmt12(asym) + " exceeds 1e-12");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.Q, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-9 * std::max(p.Q.trace(), 0.0) - 1e-300)
      throw ModelError("Q is not positive semidefinite (min eigenvalue " + fmt12(min_eig) + ")");
  }

  QpSolution sol;
  sol.dual_eq = Eigen::VectorXd::Zero(p.A_eq.rows());
  sol.dual_in = Eigen::VectorXd::Zero(p.A_in.rows());
  sol.dual_lb = Eigen::VectorXd::Zero(n);
  sol.dual_ub = Eigen::VectorXd::Zero(n);

  for (Eigen::Index i = 0; i < n; ++i)
    if (p.lb(i) > p.ub(i)) {
      sol.status = QpStatus::infeasible;
      sol.x = Eigen::VectorXd::Zero(n);
      sol.dual_lb(i) = 1.0;  // Farkas ray: ub_i - lb_i < 0
      sol.dual_ub(i) = 1.0;
      return sol;
    }

  const qp_detail::Rows rows = qp_detail::build_rows(p);
  const long budget =
      opts.max_iterations > 0 ? opts.max_iterations
                              : std::max<long>(500, 60 * static_cast<long>(n + rows.A.rows()));

  auto scatter_duals = [&](const Eigen::VectorXd& lambda) {
    for (Eigen::Index i = 0; i < rows.A.rows(); ++i) {
      switch (rows.group[static_cast<std::size_t>(i)]) {
        case 0: sol.dual_eq(rows.index[static_cast<std::size_t>(i)]) = lambda(i); break;
        case 1: sol.dual_in(rows.index[static_cast<std::size_t>(i)]) = lambda(i); break;
        case 2: sol.dual_ub(rows.index[static_cast<std::size_t>(i)]) = lambda(i); break;
        default: sol.dual_lb(rows.index[static_cast<std::size_t>(i)]) = lambda(i); break;
      }
    }
  };

  // Starting point: a feasible warm start if one was supplied, otherwise the
  // phase-1 artificial LP.
  Eigen::VectorXd x0;
  long used_iters = 0;
  bool have_start = false;
  if (opts.x_hint.size() == n) {
    double viol = 0.0;
    for (Eigen::Index i = 0; i < rows.A.rows(); ++i) {
      const double resid = rows.A.row(i).dot(opts.x_hint) - rows.b(i);
      viol = std::max(viol, i < rows.m_eq ? std::abs(resid) : resid);
    }
    if (viol <= 1e-9) {
      x0 = opts.x_hint;
      have_start = true;
    }
  }
  if (!have_start) {
    auto p1 = qp_detail::phase1(p, rows, budget);
    used_iters = p1.iterations;
    if (p1.hit_limit)
      throw ResourceLimitError("QP phase-1 iteration limit " + std::to_string(budget) +
                               " exceeded");
    if (!p1.feasible) {
      sol.status = QpStatus::infeasible;
      sol.x = Eigen::VectorXd::Zero(n);
      scatter_duals(p1.farkas);
      sol.iterations = p1.iterations;
      return sol;
    }
    x0 = p1.x;
  }

  auto w0 = qp_detail::initial_work(rows, x0, 1e-10);
  auto core = qp_detail::active_set_min(p.Q, p.c, rows, x0, w0, budget);
  sol.iterations = used_iters + core.iterations;
  if (core.hit_limit)
    throw ResourceLimitError("QP iteration limit " + std::to_string(budget) + " exceeded");
  if (core.status == QpStatus::unbounded) {
    sol.status = QpStatus::unbounded;
    sol.x = core.x;
    sol.objective = -kInf;
    return sol;
  }

  // Least-norm restoration onto the final active rows wipes out drift from
  // the accumulated steps (budget rows land at ~1e-15 residual).
  Eigen::VectorXd x = core.x;
  if (!core.final_work.empty()) {
    const Eigen::Index mw = static_cast<Eigen::Index>(core.final_work.size());
    Eigen::MatrixXd aw(mw, n);
    Eigen::VectorXd bw(mw);
    for (Eigen::Index j = 0; j < mw; ++j) {
      aw.row(j) = rows.A.row(core.final_work[static_cast<std::size_t>(j)]);
      bw(j) = rows.b(core.final_work[static_cast<std::size_t>(j)]);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(aw);
    x += cod.solve(bw - aw * x);
  }

  sol.status = QpStatus::optimal;
  sol.x = x;
  sol.objective = x.dot(p.Q * x) + p.c.dot(x);
  scatter_duals(core.lambda);

  const QpResiduals resid = qp_residuals(p, sol);
  if (resid.feasibility > 1e-8 || resid.stationarity > 1e-6 ||
      resid.complementarity > 1e-8)
    throw InternalError("QP contract violated: feas " + fmt12(resid.feasibility) +
                        ", stat " + fmt12(resid.stationarity) + ", compl " +
                        fmt12(resid.complementarity));
  return sol;
}

/// Markowitz problem: minimize x'Sigma x over the simplex with mu'x >= eta.
/// eta = -inf drops the return-floor row entirely (global minimum-variance
/// portfolio), which keeps tie-breaking identical across callers.
inline QpSolution solve_markowitz(const AssetStats& stats, double eta,
                                  const QpOptions& opts = {}) {
  if (std::isnan(eta) || eta == kInf) throw DomainError("eta must be finite or -inf");
  const Eigen::Index n = stats.assets();
  QpProblem p = make_qp(n);
  p.Q = stats.sigma;
  p.A_eq = Eigen::MatrixXd::Ones(1, n);
  p.b_eq = Eigen::VectorXd::Ones(1);
  p.lb.setZero();
  if (std::isfinite(eta)) {
    p.A_in = -stats.mu.transpose();
    p.b_in = Eigen::VectorXd::Constant(1, -eta);
  }
  return solve_qp(p, opts);
}

}  // namespace mvvar
