#pragma once

#include <string>
#include <vector>

#include "vsrplan/config.hpp"
#include "vsrplan/lp.hpp"
#include "vsrplan/network.hpp"
#include "vsrplan/reformulation.hpp"
#include "vsrplan/scenario.hpp"
#include "vsrplan/simplex.hpp"

namespace vsr {

// Column and row ids for one operating state inside a larger program.
struct StateBlock {
  int state = -1;
  std::vector<int> bus_angle;    // per bus position
  std::vector<int> branch_diff;  // per branch position, angle differences
  std::vector<int> branch_flow;  // per branch position
  std::vector<int> gen_p;        // per generator position
  std::vector<int> shed;         // per load position, -1 in base states
  std::vector<int> adjust_up;    // per generator, -1 unless redispatchable
  std::vector<int> adjust_dn;
  std::vector<int> relief_lo;  // per bus balance relief, -1 unless requested
  std::vector<int> relief_hi;
  std::vector<DeviceVars> device;  // per candidate position
  std::vector<int> balance_row;    // per bus position
};

struct BlockOptions {
  bool tighten = true;
  double shed_penalty = 5000.0;  // $/MWh
  // Hourly penalty for bus balance relief columns; negative disables them.
  double relief_penalty = -1.0;
  // Objective weight in hours; negative means the state's own duration.
  double weight = -1.0;
};

// Emits every column and row one operating state contributes: angles with
// the reference pinned, per-branch angle differences capped at theta_max,
// flows with the short-term rating in contingency states, dispatch, and for
// contingency states shedding plus the redispatch coupling to the same
// level's base dispatch columns (base_gen). Outaged branches keep a zero
// flow and no flow equation. delta_vars holds one installation column per
// candidate.
StateBlock emit_state_block(LinearProgram& lp, const Network& net,
                            const OperatingState& state,
                            const LoadLevel& level,
                            const std::vector<int>& delta_vars,
                            const std::vector<int>* base_gen,
                            const BlockOptions& opt);

struct PlanModel {
  LinearProgram lp;
  std::vector<int> delta;          // per candidate position
  std::vector<StateBlock> blocks;  // per state index
};

// Assembles the complete planning program over every state: installation
// columns with annualized cost, one block per state, duration-weighted
// operating costs.
PlanModel build_full_model(const Network& net, const ScenarioSet& scen,
                           const Config& cfg);

struct CostBreakdown {
  double base_generation = 0.0;  // $/yr
  double contingency_generation = 0.0;
  double rescheduling = 0.0;
  double load_shedding = 0.0;
  double investment = 0.0;
  double total() const {
    return base_generation + contingency_generation + rescheduling +
           load_shedding + investment;
  }
};

struct PlanSolution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;  // $/yr
  double mip_gap = 0.0;
  std::vector<double> installed;                     // per candidate, 0/1
  std::vector<std::vector<double>> gen_p;            // [state][gen] pu
  std::vector<std::vector<double>> flows;            // [state][branch] pu
  std::vector<std::vector<double>> angles;           // [state][bus] rad
  std::vector<std::vector<double>> diffs;            // [state][branch] rad
  std::vector<std::vector<double>> shed;             // [state][load] pu
  std::vector<std::vector<double>> adjust_up;        // [state][gen] pu
  std::vector<std::vector<double>> adjust_dn;        // [state][gen] pu
  std::vector<std::vector<DeviceSetting>> settings;  // [candidate][state]
  CostBreakdown breakdown;
  std::string diagnostic;  // set when infeasible and a probe located states
};

// Copies one state's primal values out of a solved program. Used by both
// the one-shot planner and the decomposition when assembling its answer.
void fill_block(const StateBlock& block, const Network& net,
                const std::vector<double>& primal, PlanSolution& plan);

// Recomputes the five cost categories from primal quantities; total()
// must reproduce the solver objective.
CostBreakdown cost_breakdown(const PlanSolution& plan, const Network& net,
                             const ScenarioSet& scen, const Config& cfg);

PlanSolution extract_plan(const PlanModel& model, const Network& net,
                          const ScenarioSet& scen, const Config& cfg,
                          const Solution& sol);

SolverOptions solver_options_from(const Config& cfg);

// One-shot solve of the complete program. On infeasibility the returned
// diagnostic names the states whose balance cannot be met.
PlanSolution solve_plan(const Network& net, const ScenarioSet& scen,
                        const Config& cfg);

}  // namespace vsr
