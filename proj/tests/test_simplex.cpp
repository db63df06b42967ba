#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "vsrplan/lp.hpp"
#include "vsrplan/simplex.hpp"
#include "vsrplan/solver.hpp"

using vsr::kInf;
using vsr::LinearProgram;
using vsr::RowSense;
using vsr::SimplexSolver;
using vsr::Solution;
using vsr::SolveStatus;

namespace {

struct RandomInstance {
  LinearProgram lp;
  oracle::BoxLp box;
};

// Random bounded LP, biased toward feasibility by anchoring the rhs to a
// random interior point. Variables live in [0, upper].
RandomInstance random_instance(int n, int m, std::mt19937& gen,
                               bool force_feasible) {
  RandomInstance inst;
  inst.box.n = n;
  inst.box.upper.resize(n);
  inst.box.c.resize(n);
  std::vector<double> anchor(n);
  for (int j = 0; j < n; ++j) {
    inst.box.upper[j] = oracle::rnd(gen, 0.5, 4.0);
    inst.box.c[j] = oracle::rnd(gen, -5.0, 5.0);
    anchor[j] = oracle::rnd(gen, 0.0, inst.box.upper[j]);
    inst.lp.add_var("x" + std::to_string(j), 0.0, inst.box.upper[j],
                    vsr::VarKind::Continuous, inst.box.c[j]);
  }
  for (int i = 0; i < m; ++i) {
    std::vector<double> row(n, 0.0);
    std::vector<std::pair<int, double>> entries;
    for (int j = 0; j < n; ++j) {
      if (oracle::rnd01(gen) < 0.4) {
        row[j] = oracle::rnd(gen, -3.0, 3.0);
        entries.push_back({j, row[j]});
      }
    }
    if (entries.empty()) {
      row[i % n] = 1.0;
      entries.push_back({i % n, 1.0});
    }
    double ax = 0.0;
    for (int j = 0; j < n; ++j) ax += row[j] * anchor[j];
    const double r = oracle::rnd01(gen);
    char sense;
    double rhs;
    if (r < 0.5) {
      sense = 'L';
      rhs = force_feasible ? ax + oracle::rnd(gen, 0.0, 2.0)
                           : ax + oracle::rnd(gen, -1.0, 2.0);
    } else if (r < 0.8) {
      sense = 'G';
      rhs = force_feasible ? ax - oracle::rnd(gen, 0.0, 2.0)
                           : ax - oracle::rnd(gen, -1.0, 2.0);
    } else {
      sense = 'E';
      rhs = force_feasible ? ax : ax + oracle::rnd(gen, -0.2, 0.2);
    }
    inst.box.a.push_back(row);
    inst.box.sense.push_back(sense);
    inst.box.b.push_back(rhs);
    const RowSense rs = sense == 'L'   ? RowSense::LE
                        : sense == 'G' ? RowSense::GE
                                       : RowSense::EQ;
    inst.lp.add_row("r" + std::to_string(i), rs, rhs,
                    std::span<const std::pair<int, double>>(entries));
  }
  if (!force_feasible) {
    // Conflicting pair over a shared combination: infeasible, but only
    // provably so by mixing rows, never by a single bound check.
    std::vector<double> w(n, 0.0);
    std::vector<std::pair<int, double>> entries;
    double wa = 0.0;
    for (int j = 0; j < std::min(n, 5); ++j) {
      w[j] = oracle::rnd(gen, 0.5, 2.0);
      entries.push_back({j, w[j]});
      wa += w[j] * anchor[j];
    }
    inst.box.a.push_back(w);
    inst.box.sense.push_back('L');
    inst.box.b.push_back(wa - 1.0);
    inst.lp.add_row("conflict_hi", RowSense::LE, wa - 1.0,
                    std::span<const std::pair<int, double>>(entries));
    inst.box.a.push_back(w);
    inst.box.sense.push_back('G');
    inst.box.b.push_back(wa + 1.0);
    inst.lp.add_row("conflict_lo", RowSense::GE, wa + 1.0,
                    std::span<const std::pair<int, double>>(entries));
  }
  return inst;
}

// KKT conditions checked directly on a reported optimum.
void check_kkt(const LinearProgram& lp, const Solution& sol) {
  const double tol = 1e-5;
  CHECK(lp.max_violation(sol.primal) < tol);

  // reduced costs consistent with duals
  for (int j = 0; j < lp.num_vars(); ++j) {
    double d = lp.obj(j);
    for (int i = 0; i < lp.num_rows(); ++i) {
      const auto cols = lp.row_cols(i);
      const auto coefs = lp.row_coefs(i);
      for (std::size_t t = 0; t < cols.size(); ++t)
        if (cols[t] == j) d -= coefs[t] * sol.duals[i];
    }
    CHECK(std::abs(d - sol.reduced_costs[j]) < tol);

    // sign conditions relative to the bounds
    const double x = sol.primal[j];
    if (x > lp.lower(j) + tol && x < lp.upper(j) - tol)
      CHECK(std::abs(sol.reduced_costs[j]) < tol);
    if (lp.lower(j) < lp.upper(j) - tol) {
      if (std::abs(x - lp.lower(j)) < tol)
        CHECK(sol.reduced_costs[j] > -tol);
      else if (std::abs(x - lp.upper(j)) < tol)
        CHECK(sol.reduced_costs[j] < tol);
    }
  }

  // complementary slackness on rows
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto cols = lp.row_cols(i);
    const auto coefs = lp.row_coefs(i);
    double lhs = 0.0;
    for (std::size_t t = 0; t < cols.size(); ++t)
      lhs += coefs[t] * sol.primal[cols[t]];
    const double slack = lp.row(i).rhs - lhs;
    if (lp.row(i).sense != RowSense::EQ && std::abs(slack) > tol)
      CHECK(std::abs(sol.duals[i]) < tol);
    if (lp.row(i).sense == RowSense::LE) CHECK(sol.duals[i] < tol);
    if (lp.row(i).sense == RowSense::GE) CHECK(sol.duals[i] > -tol);
  }

  CHECK(std::abs(sol.objective - sol.dual_objective) <
        1e-6 * (1.0 + std::abs(sol.objective)));
}

}  // namespace

TEST_SUITE_BEGIN("simplex");

TEST_CASE("two variable model with known optimum") {
  LinearProgram lp;
  const int x = lp.add_var("x", 0.0, 10.0, vsr::VarKind::Continuous, -1.0);
  const int y = lp.add_var("y", 0.0, 2.0, vsr::VarKind::Continuous, -2.0);
  lp.add_row("cap", RowSense::LE, 4.0, {{x, 1.0}, {y, 1.0}});
  lp.add_row("xcap", RowSense::LE, 3.0, {{x, 1.0}});

  const Solution sol = vsr::solve_lp(lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-6.0));
  CHECK(sol.primal[x] == doctest::Approx(2.0));
  CHECK(sol.primal[y] == doctest::Approx(2.0));
  check_kkt(lp, sol);
}

TEST_CASE("equality and ge rows with a free variable") {
  LinearProgram lp;
  const int x = lp.add_var("x", -kInf, kInf, vsr::VarKind::Continuous, 1.0);
  const int y = lp.add_var("y", 0.0, 10.0, vsr::VarKind::Continuous, 1.0);
  lp.add_row("sum", RowSense::EQ, 3.0, {{x, 1.0}, {y, 1.0}});
  lp.add_row("floor", RowSense::GE, 1.0, {{y, 1.0}});

  const Solution sol = vsr::solve_lp(lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(3.0));
  check_kkt(lp, sol);
}

TEST_CASE("detects infeasible row systems") {
  LinearProgram lp;
  const int x = lp.add_var("x", 0.0, 10.0);
  lp.add_row("hi", RowSense::GE, 3.0, {{x, 1.0}});
  lp.add_row("lo", RowSense::LE, 1.0, {{x, 1.0}});
  CHECK(vsr::solve_lp(lp).status == SolveStatus::Infeasible);
}

TEST_CASE("detects unbounded objectives") {
  LinearProgram lp;
  lp.add_var("x", 0.0, kInf, vsr::VarKind::Continuous, -1.0);
  CHECK(vsr::solve_lp(lp).status == SolveStatus::Unbounded);

  LinearProgram lp2;
  const int x = lp2.add_var("x", -kInf, kInf, vsr::VarKind::Continuous, 1.0);
  const int y = lp2.add_var("y", -kInf, kInf, vsr::VarKind::Continuous, 1.0);
  lp2.add_row("diff", RowSense::EQ, 1.0, {{x, 1.0}, {y, -1.0}});
  CHECK(vsr::solve_lp(lp2).status == SolveStatus::Unbounded);
}

TEST_CASE("model with no rows optimizes at bounds") {
  LinearProgram lp;
  const int x = lp.add_var("x", 0.0, 5.0, vsr::VarKind::Continuous, -1.0);
  const int y = lp.add_var("y", 1.0, 9.0, vsr::VarKind::Continuous, 2.0);
  const Solution sol = vsr::solve_lp(lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal[x] == doctest::Approx(5.0));
  CHECK(sol.primal[y] == doctest::Approx(1.0));
  CHECK(sol.objective == doctest::Approx(-3.0));
}

TEST_CASE("objective constant flows through both objectives") {
  LinearProgram lp;
  const int x = lp.add_var("x", 0.0, 4.0, vsr::VarKind::Continuous, 1.0);
  lp.add_row("floor", RowSense::GE, 2.0, {{x, 1.0}});
  lp.set_obj_constant(100.0);
  const Solution sol = vsr::solve_lp(lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(102.0));
  CHECK(sol.dual_objective == doctest::Approx(102.0));
}

TEST_CASE("matches the dense oracle on random instances") {
  int optimal_seen = 0, infeasible_seen = 0;
  for (int size = 0; size < 3; ++size) {
    const int n = 10 + size * 15;
    const int m = 6 + size * 8;
    for (int trial = 0; trial < 25; ++trial) {
      std::mt19937 gen(5000 + size * 100 + trial);
      RandomInstance inst =
          random_instance(n, m, gen, /*force_feasible=*/trial % 3 != 2);
      const oracle::LpResult want = oracle::oracle_lp(inst.box);
      REQUIRE(want.status != oracle::LpStatus::Stuck);
      const Solution got = vsr::solve_lp(inst.lp);
      if (want.status == oracle::LpStatus::Optimal) {
        ++optimal_seen;
        REQUIRE(got.status == SolveStatus::Optimal);
        CHECK(std::abs(got.objective - want.objective) <
              1e-6 * (1.0 + std::abs(want.objective)));
        check_kkt(inst.lp, got);
      } else {
        ++infeasible_seen;
        CHECK(got.status == SolveStatus::Infeasible);
      }
    }
  }
  CHECK(optimal_seen > 40);
  CHECK(infeasible_seen > 5);
}

TEST_CASE("warm start over bound changes matches a cold solve") {
  std::mt19937 gen(42);
  RandomInstance inst = random_instance(20, 12, gen, true);
  SimplexSolver solver;
  solver.load(inst.lp);
  REQUIRE(solver.solve().status == SolveStatus::Optimal);

  // Tighten a few variables, as branching would.
  inst.lp.set_bounds(3, 0.0, 0.0);
  inst.lp.set_bounds(7, inst.lp.upper(7), inst.lp.upper(7));
  solver.set_var_bounds(3, 0.0, 0.0);
  solver.set_var_bounds(7, inst.lp.upper(7), inst.lp.upper(7));

  const Solution warm = solver.solve();
  const Solution cold = vsr::solve_lp(inst.lp);
  REQUIRE(warm.status == cold.status);
  if (cold.status == SolveStatus::Optimal)
    CHECK(warm.objective ==
          doctest::Approx(cold.objective).epsilon(1e-7));
}

TEST_CASE("warm start over rhs changes matches a cold solve") {
  std::mt19937 gen(43);
  RandomInstance inst = random_instance(18, 10, gen, true);
  SimplexSolver solver;
  solver.load(inst.lp);
  REQUIRE(solver.solve().status == SolveStatus::Optimal);

  for (int i = 0; i < inst.lp.num_rows(); i += 3) {
    const double nudged = inst.lp.row(i).rhs + 0.25;
    inst.lp.set_rhs(i, nudged);
    solver.set_rhs(i, nudged);
  }
  const Solution warm = solver.solve();
  const Solution cold = vsr::solve_lp(inst.lp);
  REQUIRE(warm.status == cold.status);
  if (cold.status == SolveStatus::Optimal)
    CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-7));
}

TEST_CASE("warm start over appended rows matches a cold solve") {
  std::mt19937 gen(44);
  RandomInstance inst = random_instance(16, 8, gen, true);
  SimplexSolver solver;
  solver.load(inst.lp);
  const Solution first = solver.solve();
  REQUIRE(first.status == SolveStatus::Optimal);

  // Cut off the current optimum the way a decomposition would.
  std::vector<std::pair<int, double>> cut;
  double lhs = 0.0;
  for (int j = 0; j < 5; ++j) {
    cut.push_back({j, 1.0});
    lhs += first.primal[j];
  }
  const double rhs = lhs + 0.5;
  inst.lp.add_row("cut", RowSense::GE, rhs,
                  std::span<const std::pair<int, double>>(cut));
  solver.add_row(RowSense::GE, rhs,
                 std::span<const std::pair<int, double>>(cut));

  const Solution warm = solver.solve();
  const Solution cold = vsr::solve_lp(inst.lp);
  REQUIRE(warm.status == cold.status);
  if (cold.status == SolveStatus::Optimal) {
    CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-7));
    CHECK(warm.duals.size() == cold.duals.size());
  }
}

TEST_CASE("degenerate ties resolve deterministically") {
  auto build = [] {
    LinearProgram lp;
    const int a = lp.add_var("a", 0.0, 1.0, vsr::VarKind::Continuous, -1.0);
    const int b = lp.add_var("b", 0.0, 1.0, vsr::VarKind::Continuous, -1.0);
    const int c = lp.add_var("c", 0.0, 1.0, vsr::VarKind::Continuous, -1.0);
    lp.add_row("r1", RowSense::LE, 1.0, {{a, 1.0}, {b, 1.0}});
    lp.add_row("r2", RowSense::LE, 1.0, {{b, 1.0}, {c, 1.0}});
    lp.add_row("r3", RowSense::LE, 1.0, {{a, 1.0}, {c, 1.0}});
    return lp;
  };
  const Solution s1 = vsr::solve_lp(build());
  const Solution s2 = vsr::solve_lp(build());
  REQUIRE(s1.status == SolveStatus::Optimal);
  CHECK(s1.objective == doctest::Approx(-1.5));
  for (int j = 0; j < 3; ++j) CHECK(s1.primal[j] == s2.primal[j]);
}

TEST_CASE("solve statistics accumulate duality audits") {
  vsr::reset_solve_stats();
  std::mt19937 gen(7);
  RandomInstance inst = random_instance(12, 8, gen, true);
  const Solution sol = vsr::solve_lp(inst.lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  const vsr::SolveStats& stats = vsr::solve_stats();
  CHECK(stats.lp_solves >= 1);
  CHECK(stats.max_rel_duality_gap < 1e-6);
  CHECK(stats.max_primal_violation < 1e-6);
}

TEST_SUITE_END();
