#include <doctest.h>

#include <cmath>
#include <vector>

#include "vsrplan/benders.hpp"
#include "vsrplan/config.hpp"
#include "vsrplan/network.hpp"
#include "vsrplan/planner.hpp"
#include "vsrplan/scenario.hpp"
#include "vsrplan/solver.hpp"

using namespace vsr;

namespace {

// Same congestion story as the planner tests, with ramps wide enough that
// losing the compensated line is survivable by redispatch alone. Cheap unit
// at bus 1, dear unit at bus 3, load at bus 3, equal-reactance paths.
Network ramped_triangle(double cap12) {
  Network net;
  net.buses = {{1, true}, {2, false}, {3, false}};
  net.branches = {{1, 1, 2, 0.25, 4.0, cap12, 1.1},
                  {2, 2, 3, 0.25, 4.0, 10.0, 1.1},
                  {3, 1, 3, 0.5, 2.0, 10.0, 1.1}};
  net.generators = {{1, 1, 0.0, 2.0, 10.0, 12.0, 8.0, 0.8, 0.8, true},
                    {2, 3, 0.0, 2.0, 50.0, 60.0, 40.0, 0.8, 0.8, true}};
  net.loads = {{1, 3, 1.0}};
  return net;
}

void add_candidate(Network& net, int branch_id, double annual_cost) {
  const Branch& br = net.branches[net.branch_index(branch_id)];
  auto [lo, hi] = vsr_susceptance_bounds(br.x, -0.7, 0.2);
  VsrCandidate cand;
  cand.branch = branch_id;
  cand.bv_min = lo;
  cand.bv_max = hi;
  cand.big_m = (hi - lo) * net.theta_max;
  cand.annual_cost = annual_cost;
  net.vsr_candidates.push_back(cand);
}

ScenarioSet flat_year(const Network& net, std::vector<int> outages) {
  std::vector<LoadLevel> levels = {{0, 1.0, "flat"}};
  return build_scenarios(net, levels, outages, {{1.0}, 2.0});
}

double max_balance_residual(const PlanSolution& plan, const Network& net,
                            const ScenarioSet& scen) {
  double worst = 0.0;
  for (const OperatingState& st : scen.states) {
    int s = st.index;
    double scale = scen.levels[st.t].scale;
    for (const Bus& bus : net.buses) {
      double r = 0.0;
      for (size_t n = 0; n < net.generators.size(); ++n)
        if (net.generators[n].bus == bus.id) r += plan.gen_p[s][n];
      for (size_t m = 0; m < net.loads.size(); ++m) {
        if (net.loads[m].bus != bus.id) continue;
        r -= net.loads[m].p * scale;
        r += plan.shed[s][m];
      }
      for (size_t k = 0; k < net.branches.size(); ++k) {
        if (net.branches[k].from_bus == bus.id) r -= plan.flows[s][k];
        if (net.branches[k].to_bus == bus.id) r += plan.flows[s][k];
      }
      worst = std::max(worst, std::fabs(r));
    }
  }
  return worst;
}

// Annual recourse cost of pinning the given base point, measured by solving
// every relaxed contingency subproblem at it.
double relaxed_recourse_at(const Network& net, const ScenarioSet& scen,
                           const Config& cfg,
                           const std::vector<std::vector<double>>& gen,
                           const std::vector<double>& delta) {
  double total = 0.0;
  for (const OperatingState& st : scen.states) {
    if (st.c == 0) continue;
    Subproblem sub = build_subproblem(net, st, scen.levels[st.t], cfg,
                                      gen[st.t], delta, true);
    SubproblemResult r = solve_subproblem(sub, SolverOptions{});
    REQUIRE(r.status == SolveStatus::Optimal);
    total += st.duration * r.z;
  }
  return total;
}

}  // namespace

TEST_SUITE("benders") {

TEST_CASE("master without cuts keeps the recourse at its floor") {
  Network net = ramped_triangle(0.3);
  add_candidate(net, 3, 4.0e7);  // never worth installing
  ScenarioSet scen = flat_year(net, {});
  Config cfg;

  MasterModel master = build_master(net, scen, cfg);
  Solution sol = solve_milp(master.lp, SolverOptions{});
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal[master.alpha] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sol.primal[master.delta[0]] < 0.5);
  CHECK(sol.objective == doctest::Approx(8760.0 * 2600.0).epsilon(1e-8));
}

TEST_CASE("flat cut lifts the recourse variable") {
  Network net = ramped_triangle(0.3);
  add_candidate(net, 3, 4.0e7);
  ScenarioSet scen = flat_year(net, {});
  Config cfg;

  MasterModel master = build_master(net, scen, cfg);
  int rows_before = master.lp.num_rows();
  BendersCut cut;
  cut.constant = 100.0;
  cut.gen_coeffs = {{0.0, 0.0}};
  cut.inst_coeffs = {0.0};
  cut.anchor_gen = {{0.6, 0.4}};
  cut.anchor_delta = {0.0};
  add_cut(master, cut);
  CHECK(master.num_cuts == 1);
  CHECK(master.lp.num_rows() == rows_before + 1);

  Solution sol = solve_milp(master.lp, SolverOptions{});
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal[master.alpha] == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(sol.objective ==
        doctest::Approx(8760.0 * 2600.0 + 100.0).epsilon(1e-8));
}

TEST_CASE("a cut evaluates to its constant at its own anchor") {
  BendersCut cut;
  cut.constant = 320.0;
  cut.gen_coeffs = {{-1.0, 16.0}, {2.5, 0.0}};
  cut.inst_coeffs = {11.5};
  cut.anchor_gen = {{1.0, 0.0}, {0.5, 0.25}};
  cut.anchor_delta = {1.0};
  CHECK(cut.value_at(cut.anchor_gen, cut.anchor_delta) == 320.0);
  CHECK(cut.value_at({{2.0, 0.0}, {0.5, 0.25}}, {1.0}) ==
        doctest::Approx(319.0));
  CHECK(cut.value_at(cut.anchor_gen, {0.0}) == doctest::Approx(308.5));
}

TEST_CASE("aggregation weights duals by state hours") {
  ScenarioSet scen;
  scen.levels = {{0, 1.0, "flat"}};
  OperatingState base;
  base.index = 0;
  base.duration = 8755.0;
  OperatingState c1;
  c1.index = 1;
  c1.c = 1;
  c1.outaged = {1};
  c1.duration = 2.0;
  OperatingState c2;
  c2.index = 2;
  c2.c = 2;
  c2.outaged = {2};
  c2.duration = 3.0;
  scen.states = {base, c1, c2};

  SubproblemResult r1;
  r1.c = 1;
  r1.z = 10.0;
  r1.gen_duals = {1.0, 2.0};
  r1.inst_duals = {5.0};
  SubproblemResult r2;
  r2.c = 2;
  r2.z = 100.0;
  r2.gen_duals = {-1.0, 4.0};
  r2.inst_duals = {0.5};

  std::vector<std::vector<double>> anchor_gen = {{0.6, 0.4}};
  std::vector<double> anchor_delta = {0.0};
  BendersCut cut = aggregate_cut({r1, r2}, scen, anchor_gen, anchor_delta);
  CHECK(cut.constant == doctest::Approx(2.0 * 10.0 + 3.0 * 100.0));
  CHECK(cut.gen_coeffs[0][0] == doctest::Approx(2.0 * 1.0 + 3.0 * -1.0));
  CHECK(cut.gen_coeffs[0][1] == doctest::Approx(2.0 * 2.0 + 3.0 * 4.0));
  CHECK(cut.inst_coeffs[0] == doctest::Approx(2.0 * 5.0 + 3.0 * 0.5));
  CHECK(cut.anchor_gen == anchor_gen);
  CHECK(cut.anchor_delta == anchor_delta);

  // One result per contingency state, no exceptions.
  CHECK_THROWS_AS(aggregate_cut({r1}, scen, anchor_gen, anchor_delta), Error);
  try {
    aggregate_cut({r1}, scen, anchor_gen, anchor_delta);
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::MissingState);
  }

  // With a single state of unit weight the duals pass through verbatim.
  scen.states = {base, c1};
  scen.states[1].duration = 1.0;
  BendersCut solo = aggregate_cut({r1}, scen, anchor_gen, anchor_delta);
  CHECK(solo.constant == doctest::Approx(10.0));
  CHECK(solo.gen_coeffs[0][0] == doctest::Approx(1.0));
  CHECK(solo.gen_coeffs[0][1] == doctest::Approx(2.0));
  CHECK(solo.inst_coeffs[0] == doctest::Approx(5.0));
}

TEST_CASE("stranded generation shows up as slack, not infeasibility") {
  // Non-reschedulable unit alone behind the only line. Losing the line
  // pins its output with nowhere to go, so the balance relief absorbs it.
  Network net;
  net.buses = {{1, true}, {2, false}};
  net.branches = {{1, 1, 2, 0.25, 4.0, 10.0, 1.1}};
  net.generators = {{1, 1, 0.0, 2.0, 10.0, 12.0, 8.0, 2.0, 2.0, true},
                    {2, 2, 0.0, 1.0, 5.0, 6.0, 4.0, 0.5, 0.5, false}};
  net.loads = {{1, 1, 0.7}};

  OperatingState state;
  state.index = 1;
  state.c = 1;
  state.outaged = {1};
  state.t = 0;
  state.duration = 2.0;
  LoadLevel level{0, 1.0, "flat"};
  Config cfg;

  Subproblem sub =
      build_subproblem(net, state, level, cfg, {0.0, 0.7}, {}, true);
  SubproblemResult r = solve_subproblem(sub, SolverOptions{});
  REQUIRE(r.status == SolveStatus::Optimal);

  CHECK(r.slack_total == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(r.slack_hi[1] == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(r.slack_lo[0] == doctest::Approx(0.0).epsilon(1e-6));
  // Local unit rides up to cover its load, the stranded unit still burns
  // fuel and pays the relief price for every unit it cannot deliver:
  // 0.7*10*100 + 0.7*12*100 + 0.7*5*100 + 0.7*5e6.
  CHECK(r.z == doctest::Approx(3501890.0).epsilon(1e-6));
  // Raising the stranded unit's base point buys fuel plus penalty; raising
  // the local unit's base point saves its upward adjustment premium.
  CHECK(r.gen_duals[1] == doctest::Approx(5000500.0).epsilon(1e-8));
  CHECK(r.gen_duals[0] == doctest::Approx(-1200.0).epsilon(1e-8));
}

TEST_CASE("subproblem at a pinned bare point is plain redispatch") {
  Network net = ramped_triangle(0.3);
  add_candidate(net, 3, 4.0e5);
  ScenarioSet scen = flat_year(net, {1, 3});
  Config cfg;

  const OperatingState& st = scen.states[scen.state_index(1, 0)];
  REQUIRE(st.outaged == std::vector<int>{1});
  Subproblem sub = build_subproblem(net, st, scen.levels[0], cfg,
                                    {0.6, 0.4}, {0.0}, true);
  SubproblemResult r = solve_subproblem(sub, SolverOptions{});
  REQUIRE(r.status == SolveStatus::Optimal);

  // Keeping the base dispatch beats paying both adjustment premiums.
  CHECK(r.z == doctest::Approx(2600.0).epsilon(1e-7));
  CHECK(r.slack_total <= 1e-6);
  CHECK(r.primal[sub.block.branch_flow[2]] ==
        doctest::Approx(0.6).epsilon(1e-6));
  CHECK(std::fabs(r.primal[sub.block.branch_flow[1]]) <= 1e-6);
  // Extra device freedom can only lower the cost, never raise it.
  CHECK(r.inst_duals[0] <= 1e-9);
}

TEST_CASE("two phase run matches the one shot plan") {
  Network net = ramped_triangle(0.3);
  add_candidate(net, 3, 4.0e5);
  ScenarioSet scen = flat_year(net, {1, 3});
  Config cfg;

  PlanSolution mono = solve_plan(net, scen, cfg);
  REQUIRE(mono.status == SolveStatus::Optimal);

  BendersRun run = run_two_phase(net, scen, cfg);
  REQUIRE(run.plan.status == SolveStatus::Optimal);
  CHECK(run.log.converged);

  // Installing on the direct line frees the cheap unit; losing that line
  // costs two hours of heavy redispatch a year. Hand total:
  // 8756*1000 + 400000 + 2*1000 + 2*8236.
  CHECK(run.plan.objective == doctest::Approx(9174472.0).epsilon(1e-7));
  CHECK(run.plan.objective ==
        doctest::Approx(mono.objective).epsilon(1e-6));
  CHECK(run.plan.installed[0] == doctest::Approx(1.0));
  CHECK(run.log.phase_one_bound <=
        run.plan.objective * (1.0 + 1e-6));
  CHECK(run.log.phase_one_bound <= mono.objective * (1.0 + 1e-6));

  // Two relaxed iterations close the gap, one integral pass confirms it.
  CHECK(run.log.rows.size() == 3);
  CHECK(run.log.rows.back().phase == 2);
  CHECK(run.log.rows.back().gap <= cfg.number("benders.epsilon"));
  int prev_phase = 0;
  double prev_down = -kInf;
  for (const BendersIterate& it : run.log.rows) {
    if (it.phase != prev_phase) {
      prev_phase = it.phase;
      prev_down = -kInf;
    }
    CHECK(it.z_down >= prev_down - 1e-7 * std::fabs(prev_down));
    CHECK(it.z_up >= it.z_down - 1e-7 * std::fabs(it.z_down));
    prev_down = it.z_down;
  }

  CHECK(run.plan.breakdown.total() ==
        doctest::Approx(run.plan.objective).epsilon(1e-6));
  CHECK(max_balance_residual(run.plan, net, scen) <= 1e-6);
  CHECK(run.plan.diagnostic.empty());

  // Base setting pushes the direct line hard enough to free the corridor.
  const DeviceSetting& base_setting =
      run.plan.settings[0][scen.state_index(0, 0)];
  CHECK(base_setting.state == DeviceSetting::State::Active);
  CHECK(base_setting.susceptance >= 8.0 / 3.0 - 1e-6);
  CHECK(base_setting.susceptance <= net.vsr_candidates[0].bv_max + 1e-6);
  // Device idle while its own line is out.
  CHECK(run.plan.settings[0][scen.state_index(2, 0)].state ==
        DeviceSetting::State::Indeterminate);

  // Every phase-one cut lower-bounds the true relaxed recourse, at its own
  // anchor and away from it.
  std::vector<std::vector<double>> bare = {{0.6, 0.4}};
  std::vector<double> off = {0.0};
  double bare_recourse = relaxed_recourse_at(net, scen, cfg, bare, off);
  CHECK(bare_recourse == doctest::Approx(2.0 * 2600.0 + 2.0 * 5516.0)
                             .epsilon(1e-7));
  REQUIRE(!run.cuts.empty());
  for (const BendersCut& cut : run.cuts) {
    CHECK(cut.value_at(cut.anchor_gen, cut.anchor_delta) == cut.constant);
    double anchored =
        relaxed_recourse_at(net, scen, cfg, cut.anchor_gen, cut.anchor_delta);
    CHECK(cut.constant <= anchored * (1.0 + 1e-6) + 1e-6);
    CHECK(cut.value_at(bare, off) <= bare_recourse * (1.0 + 1e-6) + 1e-6);
  }
}

TEST_CASE("no contingencies converges in one iteration per phase") {
  Network net = ramped_triangle(0.3);
  add_candidate(net, 3, 4.0e5);
  ScenarioSet scen = flat_year(net, {});
  Config cfg;

  BendersRun run = run_two_phase(net, scen, cfg);
  REQUIRE(run.plan.status == SolveStatus::Optimal);
  CHECK(run.log.converged);
  CHECK(run.log.rows.size() == 2);
  CHECK(run.log.rows[0].phase == 1);
  CHECK(run.log.rows[1].phase == 2);
  CHECK(run.cuts.empty());
  CHECK(run.plan.objective ==
        doctest::Approx(8760.0 * 1000.0 + 4.0e5).epsilon(1e-8));

  PlanSolution mono = solve_plan(net, scen, cfg);
  CHECK(run.plan.objective == doctest::Approx(mono.objective).epsilon(1e-8));
}

TEST_CASE("subproblem construction rejects base states") {
  Network net = ramped_triangle(0.3);
  ScenarioSet scen = flat_year(net, {1});
  Config cfg;
  const OperatingState& base = scen.states[scen.state_index(0, 0)];
  CHECK_THROWS_AS(
      build_subproblem(net, base, scen.levels[0], cfg, {0.6, 0.4}, {}, true),
      Error);
}

}  // TEST_SUITE
