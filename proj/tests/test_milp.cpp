#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "vsrplan/lp.hpp"
#include "vsrplan/solver.hpp"

using vsr::LinearProgram;
using vsr::RowSense;
using vsr::Solution;
using vsr::SolveStatus;
using vsr::VarKind;

TEST_SUITE_BEGIN("milp");

TEST_CASE("binary knapsack reaches the exhaustive optimum") {
  LinearProgram lp;
  const double value[] = {8.0, 11.0, 6.0, 4.0};
  const double weight[] = {5.0, 7.0, 4.0, 3.0};
  std::vector<std::pair<int, double>> row;
  for (int j = 0; j < 4; ++j) {
    const int v = lp.add_var("b" + std::to_string(j), 0.0, 1.0,
                             VarKind::Binary, -value[j]);
    row.push_back({v, weight[j]});
  }
  lp.add_row("cap", RowSense::LE, 14.0,
             std::span<const std::pair<int, double>>(row));

  const Solution sol = vsr::solve_milp(lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-21.0));
  CHECK(sol.primal[0] == doctest::Approx(0.0));
  CHECK(sol.primal[1] == doctest::Approx(1.0));
  CHECK(sol.primal[2] == doctest::Approx(1.0));
  CHECK(sol.primal[3] == doctest::Approx(1.0));
  CHECK(sol.mip_gap <= 1e-4);
}

TEST_CASE("fractional relaxation still lands on the integer optimum") {
  LinearProgram lp;
  const int a = lp.add_var("a", 0.0, 1.0, VarKind::Binary, -1.0);
  const int b = lp.add_var("b", 0.0, 1.0, VarKind::Binary, -1.0);
  lp.add_row("cap", RowSense::LE, 3.0, {{a, 2.0}, {b, 2.0}});
  const Solution sol = vsr::solve_milp(lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-1.0));
}

TEST_CASE("integer infeasibility is proven even when the relaxation is fine") {
  LinearProgram lp;
  const int a = lp.add_var("a", 0.0, 1.0, VarKind::Binary);
  const int b = lp.add_var("b", 0.0, 1.0, VarKind::Binary);
  lp.add_row("half", RowSense::EQ, 1.5, {{a, 1.0}, {b, 2.0}});
  lp.add_row("other", RowSense::EQ, 0.75, {{a, 1.0}, {b, 0.5}});
  const Solution sol = vsr::solve_milp(lp);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("pure continuous models pass straight through") {
  LinearProgram lp;
  const int x = lp.add_var("x", 0.0, 2.0, VarKind::Continuous, -3.0);
  lp.add_row("cap", RowSense::LE, 1.5, {{x, 1.0}});
  const Solution sol = vsr::solve_milp(lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-4.5));
  CHECK(sol.mip_gap == 0.0);
}

TEST_CASE("matches exhaustive enumeration on random mixed models") {
  for (int trial = 0; trial < 20; ++trial) {
    std::mt19937 gen(9000 + trial);
    const int n = 12;
    const int m = 8;
    oracle::BoxLp box;
    box.n = n;
    LinearProgram lp;
    std::vector<int> binaries;
    for (int j = 0; j < n; ++j) {
      const bool is_bin = j < 6;
      const double up = is_bin ? 1.0 : oracle::rnd(gen, 0.5, 3.0);
      const double cost = oracle::rnd(gen, -4.0, 4.0);
      box.upper.push_back(up);
      box.c.push_back(cost);
      lp.add_var("x" + std::to_string(j), 0.0, up,
                 is_bin ? VarKind::Binary : VarKind::Continuous, cost);
      if (is_bin) binaries.push_back(j);
    }
    for (int i = 0; i < m; ++i) {
      std::vector<double> row(n, 0.0);
      std::vector<std::pair<int, double>> entries;
      for (int j = 0; j < n; ++j) {
        if (oracle::rnd01(gen) < 0.45) {
          row[j] = oracle::rnd(gen, -2.0, 2.0);
          entries.push_back({j, row[j]});
        }
      }
      if (entries.empty()) {
        row[i % n] = 1.0;
        entries.push_back({i % n, 1.0});
      }
      // keep mostly satisfiable rows
      double hi = 0.0;
      for (double v : row) hi += std::max(0.0, v);
      const char sense = oracle::rnd01(gen) < 0.7 ? 'L' : 'G';
      const double rhs = sense == 'L' ? oracle::rnd(gen, 0.1, std::max(0.2, hi))
                                      : oracle::rnd(gen, -1.0, 0.5);
      box.a.push_back(row);
      box.sense.push_back(sense);
      box.b.push_back(rhs);
      lp.add_row("r" + std::to_string(i),
                 sense == 'L' ? RowSense::LE : RowSense::GE, rhs,
                 std::span<const std::pair<int, double>>(entries));
    }

    const oracle::LpResult want = oracle::oracle_milp(box, binaries);
    const Solution got = vsr::solve_milp(lp);
    if (want.status == oracle::LpStatus::Optimal) {
      REQUIRE(got.status == SolveStatus::Optimal);
      CHECK(std::abs(got.objective - want.objective) <
            1e-5 * (1.0 + std::abs(want.objective)));
      for (int j : binaries) {
        const double v = got.primal[j];
        CHECK(std::min(v, 1.0 - v) < 1e-9);
      }
    } else {
      CHECK(got.status == SolveStatus::Infeasible);
    }
  }
}

TEST_CASE("node budget returns the incumbent with an honest gap") {
  std::mt19937 gen(31);
  LinearProgram lp;
  std::vector<std::pair<int, double>> row;
  for (int j = 0; j < 14; ++j) {
    const int v = lp.add_var("b" + std::to_string(j), 0.0, 1.0,
                             VarKind::Binary, -oracle::rnd(gen, 1.0, 3.0));
    row.push_back({v, oracle::rnd(gen, 1.0, 3.0)});
  }
  lp.add_row("cap", RowSense::LE, 9.0,
             std::span<const std::pair<int, double>>(row));

  vsr::SolverOptions tight;
  tight.node_limit = 3;
  const Solution limited = vsr::solve_milp(lp, tight);
  if (limited.status == SolveStatus::IterLimit) {
    CHECK(limited.mip_gap > 0.0);
    CHECK(limited.objective < vsr::kInf);
  }

  const Solution full = vsr::solve_milp(lp);
  REQUIRE(full.status == SolveStatus::Optimal);
  if (limited.status == SolveStatus::IterLimit)
    CHECK(limited.objective >= full.objective - 1e-9);
}

TEST_SUITE_END();
