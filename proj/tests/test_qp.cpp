#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mvvar/kkt.hpp"
#include "mvvar/market_data.hpp"
#include "mvvar/qp.hpp"

using namespace mvvar;

namespace {

AssetStats random_stats(int t, int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d(0.002, 0.03);
  Eigen::MatrixXd m(t, n);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = d(rng);
  std::vector<std::string> names;
  for (int j = 0; j < n; ++j) names.push_back("A" + std::to_string(j));
  return compute_stats(ScenarioMatrix(m, names, PeriodKind::weekly));
}

// Brute-force Markowitz oracle on a 3-asset simplex lattice with the given
// number of steps per axis.
double grid_markowitz(const AssetStats& st, double eta, int steps) {
  double best = kInf;
  const Eigen::MatrixXd& s = st.sigma;
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j <= steps - i; ++j) {
      const double x0 = static_cast<double>(i) / steps;
      const double x1 = static_cast<double>(j) / steps;
      const double x2 = 1.0 - x0 - x1;
      const double mu = st.mu(0) * x0 + st.mu(1) * x1 + st.mu(2) * x2;
      if (mu < eta) continue;
      const double var = s(0, 0) * x0 * x0 + s(1, 1) * x1 * x1 + s(2, 2) * x2 * x2 +
                         2.0 * (s(0, 1) * x0 * x1 + s(0, 2) * x0 * x2 + s(1, 2) * x1 * x2);
      best = std::min(best, var);
    }
  return best;
}

}  // namespace

TEST_CASE("identity objective over the 2-simplex splits evenly") {
  QpProblem p = make_qp(2);
  p.Q = Eigen::MatrixXd::Identity(2, 2);
  p.A_eq = Eigen::MatrixXd::Ones(1, 2);
  p.b_eq = Eigen::VectorXd::Ones(1);
  p.lb.setZero();
  auto s = solve_qp(p);
  REQUIRE(s.status == QpStatus::optimal);
  CHECK(s.x(0) == Catch::Approx(0.5).margin(1e-10));
  CHECK(s.x(1) == Catch::Approx(0.5).margin(1e-10));
  CHECK(s.objective == Catch::Approx(0.5).margin(1e-10));
  CHECK(kkt_check(p, s).ok());
}

TEST_CASE("diag(1,4) objective weights assets by inverse variance") {
  QpProblem p = make_qp(2);
  p.Q << 1.0, 0.0, 0.0, 4.0;
  p.A_eq = Eigen::MatrixXd::Ones(1, 2);
  p.b_eq = Eigen::VectorXd::Ones(1);
  p.lb.setZero();
  auto s = solve_qp(p);
  REQUIRE(s.status == QpStatus::optimal);
  CHECK(s.x(0) == Catch::Approx(0.8).margin(1e-10));
  CHECK(s.x(1) == Catch::Approx(0.2).margin(1e-10));
  CHECK(kkt_check(p, s).ok());
}

TEST_CASE("unattainable return floor is infeasible with a Farkas certificate") {
  auto st = random_stats(30, 4, 42);
  const double eta = st.mu.maxCoeff() + 0.01;
  QpProblem p = make_qp(4);
  p.Q = st.sigma;
  p.A_eq = Eigen::MatrixXd::Ones(1, 4);
  p.b_eq = Eigen::VectorXd::Ones(1);
  p.lb.setZero();
  p.A_in = -st.mu.transpose();
  p.b_in = Eigen::VectorXd::Constant(1, -eta);
  auto s = solve_qp(p);
  REQUIRE(s.status == QpStatus::infeasible);
  CHECK(farkas_certificate_ok(p, s));
}

TEST_CASE("crossed bounds are infeasible with a certificate") {
  QpProblem p = make_qp(2);
  p.Q = Eigen::MatrixXd::Identity(2, 2);
  p.lb << 0.0, 2.0;
  p.ub << 1.0, 1.0;
  auto s = solve_qp(p);
  REQUIRE(s.status == QpStatus::infeasible);
  CHECK(farkas_certificate_ok(p, s));
}

TEST_CASE("markowitz with a slack return floor reduces to the GMV portfolio") {
  auto st = random_stats(40, 5, 7);
  auto gmv = solve_markowitz(st, -kInf);
  auto slack = solve_markowitz(st, st.mu.minCoeff() - 0.01);
  REQUIRE(gmv.status == QpStatus::optimal);
  REQUIRE(slack.status == QpStatus::optimal);
  CHECK((gmv.x - slack.x).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(slack.objective == Catch::Approx(gmv.objective).margin(1e-12));
}

TEST_CASE("markowitz at the maximal mean concentrates in the best asset") {
  auto st = random_stats(25, 4, 11);
  Eigen::Index kbest;
  st.mu.maxCoeff(&kbest);
  auto s = solve_markowitz(st, st.mu.maxCoeff());
  REQUIRE(s.status == QpStatus::optimal);
  for (Eigen::Index k = 0; k < 4; ++k)
    CHECK(s.x(k) == Catch::Approx(k == kbest ? 1.0 : 0.0).margin(1e-7));
}

TEST_CASE("markowitz matches a dense simplex grid oracle") {
  for (unsigned seed : {3u, 5u, 9u}) {
    auto st = random_stats(30, 3, seed);
    auto gmv = solve_markowitz(st, -kInf);
    const double eta_lo = st.mu.dot(gmv.x);
    const double eta = eta_lo + 0.5 * (st.mu.maxCoeff() - eta_lo);
    auto s = solve_markowitz(st, eta);
    REQUIRE(s.status == QpStatus::optimal);
    const double oracle = grid_markowitz(st, eta, 1000);
    CHECK(s.objective <= oracle + 1e-12);
    CHECK(s.objective >= oracle - 1e-5);
    CHECK(kkt_check({st.sigma, Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Ones(1, 3),
                     Eigen::VectorXd::Ones(1), -st.mu.transpose(),
                     Eigen::VectorXd::Constant(1, -eta), Eigen::VectorXd::Zero(3),
                     Eigen::VectorXd::Constant(3, kInf)},
                    s)
              .ok());
  }
}

TEST_CASE("optimal variance is non-decreasing in the return floor") {
  auto st = random_stats(50, 6, 77);
  auto gmv = solve_markowitz(st, -kInf);
  const double lo = st.mu.dot(gmv.x), hi = st.mu.maxCoeff();
  double prev = -kInf;
  for (int i = 0; i <= 10; ++i) {
    const double eta = lo + (hi - lo) * i / 10.0;
    auto s = solve_markowitz(st, eta);
    REQUIRE(s.status == QpStatus::optimal);
    CHECK(s.objective >= prev - 1e-10);
    prev = s.objective;
  }
}

TEST_CASE("scaling the covariance scales the objective and keeps the argmin") {
  auto st = random_stats(35, 4, 21);
  const double eta = st.mu.mean();
  auto base = solve_markowitz(st, eta);
  AssetStats scaled(st.mu, 3.5 * st.sigma);
  auto s = solve_markowitz(scaled, eta);
  REQUIRE(base.status == QpStatus::optimal);
  REQUIRE(s.status == QpStatus::optimal);
  CHECK(s.objective == Catch::Approx(3.5 * base.objective).epsilon(1e-9));
  CHECK((s.x - base.x).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("identical inputs give bit-identical solutions") {
  auto st = random_stats(40, 5, 31);
  const double eta = st.mu.mean();
  auto a = solve_markowitz(st, eta);
  auto b = solve_markowitz(st, eta);
  REQUIRE(a.status == QpStatus::optimal);
  CHECK((a.x.array() == b.x.array()).all());
  CHECK(a.objective == b.objective);
}

TEST_CASE("rank-deficient covariance is handled without regularization") {
  SECTION("fewer periods than assets") {
    auto st = random_stats(4, 7, 13);  // rank(sigma) <= 3
    auto s = solve_markowitz(st, -kInf);
    REQUIRE(s.status == QpStatus::optimal);
    QpProblem p = make_qp(7);
    p.Q = st.sigma;
    p.A_eq = Eigen::MatrixXd::Ones(1, 7);
    p.b_eq = Eigen::VectorXd::Ones(1);
    p.lb.setZero();
    CHECK(kkt_check(p, s).ok());
  }
  SECTION("duplicated asset") {
    Eigen::MatrixXd m(10, 3);
    std::mt19937 rng(17);
    std::normal_distribution<double> d(0.001, 0.02);
    for (int i = 0; i < 10; ++i) {
      m(i, 0) = d(rng);
      m(i, 1) = m(i, 0);
      m(i, 2) = d(rng);
    }
    auto st = compute_stats(ScenarioMatrix(m, {"A", "Acopy", "B"}, PeriodKind::daily));
    auto s = solve_markowitz(st, -kInf);
    REQUIRE(s.status == QpStatus::optimal);
    CHECK(s.x.sum() == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("zero quadratic part degrades to a correct LP solver") {
  SECTION("vertex optimum over the simplex") {
    QpProblem p = make_qp(3);
    p.c << 3.0, 1.0, 2.0;
    p.A_eq = Eigen::MatrixXd::Ones(1, 3);
    p.b_eq = Eigen::VectorXd::Ones(1);
    p.lb.setZero();
    auto s = solve_qp(p);
    REQUIRE(s.status == QpStatus::optimal);
    CHECK(s.x(1) == Catch::Approx(1.0).margin(1e-10));
    CHECK(s.objective == Catch::Approx(1.0).margin(1e-10));
  }
  SECTION("unbounded ray is reported") {
    QpProblem p = make_qp(2);
    p.c << -1.0, 0.0;
    p.lb.setZero();
    auto s = solve_qp(p);
    CHECK(s.status == QpStatus::unbounded);
  }
}

TEST_CASE("iteration exhaustion raises a resource error") {
  auto st = random_stats(60, 8, 55);
  QpOptions opts;
  opts.max_iterations = 2;
  CHECK_THROWS_AS(solve_markowitz(st, st.mu.mean(), opts), ResourceLimitError);
}

TEST_CASE("a feasible warm start is accepted and reaches the same optimum") {
  auto st = random_stats(45, 5, 91);
  const double eta = st.mu.mean();
  auto cold = solve_markowitz(st, eta);
  QpOptions opts;
  opts.x_hint = cold.x;
  auto warm = solve_markowitz(st, eta, opts);
  REQUIRE(warm.status == QpStatus::optimal);
  CHECK(warm.objective == Catch::Approx(cold.objective).margin(1e-10));
  CHECK(warm.iterations <= cold.iterations);
}

TEST_CASE("model validation rejects bad quadratic forms") {
  QpProblem p = make_qp(2);
  p.Q << 1.0, 0.5, 0.3, 1.0;
  CHECK_THROWS_AS(solve_qp(p), ModelError);
  p.Q << 1.0, 2.0, 2.0, 1.0;  // indefinite
  CHECK_THROWS_AS(solve_qp(p), ModelError);
  p = make_qp(2);
  p.A_eq = Eigen::MatrixXd::Ones(1, 3);
  p.b_eq = Eigen::VectorXd::Ones(1);
  CHECK_THROWS_AS(solve_qp(p), DimensionError);
}
