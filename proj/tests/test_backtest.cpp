#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mvvar/backtest.hpp"

using namespace mvvar;

namespace {

ScenarioMatrix random_scenarios(int t, int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d(0.002, 0.03);
  Eigen::MatrixXd m(t, n);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = d(rng);
  std::vector<std::string> names;
  for (int j = 0; j < n; ++j) names.push_back("A" + std::to_string(j));
  return ScenarioMatrix(m, names, PeriodKind::weekly);
}

BacktestConfig small_config(Eigen::Index in_len, Eigen::Index hold, double eps) {
  BacktestConfig cfg;
  cfg.epsilon = ConfidenceLevel(eps);
  cfg.in_sample_len = in_len;
  cfg.holding_len = hold;
  return cfg;
}

}  // namespace

TEST_CASE("make_schedule enumerates rolling windows") {
  SECTION("two windows, last one flush with the data") {
    auto s = make_schedule(112, 104, 4);
    REQUIRE(s.windows.size() == 2);
    CHECK(s.windows[0].in_start == 0);
    CHECK(s.windows[0].in_end == 104);
    CHECK(s.windows[0].out_start == 104);
    CHECK(s.windows[0].out_end == 108);
    CHECK(s.windows[1].in_start == 4);
    CHECK(s.windows[1].in_end == 108);
    CHECK(s.windows[1].out_start == 108);
    CHECK(s.windows[1].out_end == 112);
  }
  SECTION("single truncated window") {
    auto s = make_schedule(105, 104, 4);
    REQUIRE(s.windows.size() == 1);
    CHECK(s.windows[0].out_start == 104);
    CHECK(s.windows[0].out_end == 105);
  }
  SECTION("no out-of-sample data") {
    CHECK_THROWS_AS(make_schedule(104, 104, 4), DomainError);
    CHECK_THROWS_AS(make_schedule(50, 104, 4), DomainError);
  }
  SECTION("degenerate lengths rejected") {
    CHECK_THROWS_AS(make_schedule(10, 4, 0), DomainError);
    CHECK_THROWS_AS(make_schedule(10, 1, 2), DomainError);
  }
}

TEST_CASE("window coverage is contiguous and disjoint") {
  for (auto [total, in, hold] :
       {std::tuple<int, int, int>{112, 104, 4}, {60, 40, 10}, {37, 10, 3}, {23, 2, 1}}) {
    auto s = make_schedule(total, in, hold);
    Eigen::Index expect = in;
    for (std::size_t w = 0; w < s.windows.size(); ++w) {
      const Window& win = s.windows[w];
      CHECK(win.in_end - win.in_start == in);
      CHECK(win.out_start == win.in_end);
      CHECK(win.out_start == expect);
      if (w + 1 < s.windows.size()) {
        CHECK(win.out_end - win.out_start == hold);
        CHECK(s.windows[w + 1].in_start == win.in_start + hold);
      }
      expect = win.out_end;
    }
    CHECK(expect == total);
  }
}

TEST_CASE("equally weighted series averages the out-of-sample row") {
  Eigen::MatrixXd m(5, 2);
  m << 0.01, -0.01, 0.00, 0.02, -0.02, 0.01, 0.03, 0.00, 0.02, 0.00;
  ScenarioMatrix sc(m, {"A", "B"}, PeriodKind::weekly);
  auto res = run_backtest(sc, small_config(4, 4, 0.125));
  REQUIRE(res[0].strategy_id == "EW");
  REQUIRE(res[0].oos_returns.size() == 1);
  CHECK(res[0].oos_returns(0) == 0.01);
  REQUIRE(res[0].weight_history.size() == 1);
  CHECK(res[0].weight_history[0](0) == 0.5);
  CHECK(res[0].weight_history[0](1) == 0.5);
}

TEST_CASE("single asset reduces every strategy to the asset itself") {
  auto sc = random_scenarios(20, 1, 8);
  auto res = run_backtest(sc, small_config(12, 4, 0.2));
  const Eigen::VectorXd expected = sc.returns().col(0).tail(8);
  for (const auto& r : res) {
    CHECK(r.complete);
    REQUIRE(r.oos_returns.size() == 8);
    CHECK((r.oos_returns - expected).cwiseAbs().maxCoeff() <= 1e-12);
    for (const auto& x : r.weight_history) {
      REQUIRE(x.size() == 1);
      CHECK(x(0) == Catch::Approx(1.0).margin(1e-9));
    }
  }
}

TEST_CASE("grid backtest produces one report per strategy") {
  auto sc = random_scenarios(60, 3, 3);
  auto cfg = small_config(40, 10, 0.0625);  // K = 2 on the in-sample window
  auto res = run_backtest(sc, cfg);
  REQUIRE(res.size() == 17);
  CHECK(res[0].strategy_id == "EW");
  CHECK(res[1].strategy_id == "eta_0:z_0");
  CHECK(res[2].strategy_id == "eta_0:z_1/3");
  CHECK(res[6].strategy_id == "eta_1/4:z_1/3");
  CHECK(res[16].strategy_id == "eta_3/4:z_1");

  auto schedule = make_schedule(60, 40, 10);
  REQUIRE(schedule.windows.size() == 2);
  for (const auto& r : res) {
    CHECK(r.complete);
    CHECK(r.oos_returns.size() == 20);
    REQUIRE(r.weight_history.size() == 2);
    REQUIRE(r.solve_diagnostics.size() == 2);
    for (const auto& d : r.solve_diagnostics) {
      CHECK(d.status == "optimal");
      CHECK(d.gap <= 1e-6);
    }
    for (const auto& x : r.weight_history) {
      CHECK(std::abs(x.sum() - 1.0) <= 1e-8);
      CHECK(x.minCoeff() >= -1e-10);
    }
    // realized returns are the target weights applied to the held rows
    for (std::size_t w = 0; w < 2; ++w) {
      const Window& win = schedule.windows[w];
      Eigen::VectorXd seg =
          sc.returns().middleRows(win.out_start, win.out_end - win.out_start) *
          r.weight_history[w];
      CHECK(r.oos_returns.segment(static_cast<Eigen::Index>(w) * 10, 10) == seg);
    }
  }
  // the benchmark never rebalances away from 1/n
  CHECK(res[0].weight_history[0] == res[0].weight_history[1]);
  CHECK(res[0].weight_history[0](0) == Catch::Approx(1.0 / 3.0).margin(1e-15));
}

TEST_CASE("weights never look ahead") {
  auto sc = random_scenarios(60, 3, 14);
  auto cfg = small_config(40, 10, 0.0625);
  auto full = run_backtest(sc, cfg);
  ScenarioMatrix trunc = sc.window(0, 50);
  auto part = run_backtest(trunc, cfg);
  REQUIRE(full.size() == part.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    REQUIRE(part[i].weight_history.size() == 1);
    CHECK(full[i].weight_history[0] == part[i].weight_history[0]);
  }
}

TEST_CASE("window solve failure degrades to carried weights") {
  auto sc = random_scenarios(22, 5, 12);
  auto cfg = small_config(18, 4, 2.5 / 18.0);
  cfg.solver.node_limit = 1;
  auto res = run_backtest(sc, cfg);
  REQUIRE(res.size() == 17);
  CHECK(res[0].complete);
  for (std::size_t i = 1; i < res.size(); ++i) {
    CHECK_FALSE(res[i].complete);
    REQUIRE(res[i].solve_diagnostics.size() == 1);
    CHECK(res[i].solve_diagnostics[0].status == "failed");
    CHECK(res[i].solve_diagnostics[0].detail.find("node limit") != std::string::npos);
    // fallback weights are the benchmark's, so the series matches it
    CHECK(res[i].weight_history[0] == res[0].weight_history[0]);
    CHECK(res[i].oos_returns == res[0].oos_returns);
  }
  cfg.solver.node_limit = 0;
  auto clean = run_backtest(sc, cfg);
  for (const auto& r : clean) CHECK(r.complete);
}

TEST_CASE("backtest validates the grid") {
  auto sc = random_scenarios(20, 2, 1);
  auto cfg = small_config(12, 4, 0.2);
  cfg.alphas = {};
  CHECK_THROWS_AS(run_backtest(sc, cfg), DomainError);
  cfg.alphas = {0.5};
  cfg.betas = {1.5};
  CHECK_THROWS_AS(run_backtest(sc, cfg), DomainError);
}

TEST_CASE("backtest is deterministic and worker-count invariant") {
  auto sc = random_scenarios(56, 3, 6);
  auto cfg = small_config(40, 8, 0.0625);
  cfg.alphas = {0.0, 0.5};
  cfg.betas = {0.0, 1.0};
  auto a = run_backtest(sc, cfg);
  auto b = run_backtest(sc, cfg);
  cfg.solver.workers = 4;
  auto c = run_backtest(sc, cfg);
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() == c.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].oos_returns == b[i].oos_returns);
    CHECK(a[i].oos_returns == c[i].oos_returns);
    for (std::size_t w = 0; w < a[i].weight_history.size(); ++w) {
      CHECK(a[i].weight_history[w] == b[i].weight_history[w]);
      CHECK(a[i].weight_history[w] == c[i].weight_history[w]);
    }
  }
}
