#pragma once

#include <vector>

#include "vsrplan/config.hpp"
#include "vsrplan/lp.hpp"
#include "vsrplan/planner.hpp"
#include "vsrplan/scenario.hpp"

namespace vsr {

// One lower-bounding inequality on the contingency recourse cost:
// alpha >= constant + sum mu (P - anchor) + sum beta (delta - anchor).
// Coefficients are duration-weighted subproblem duals, so the cut and the
// recourse variable are both in $/yr.
struct BendersCut {
  double constant = 0.0;                        // recourse cost at the anchor
  std::vector<std::vector<double>> gen_coeffs;  // [level][gen], $/yr per pu
  std::vector<double> inst_coeffs;              // per candidate, $/yr
  std::vector<std::vector<double>> anchor_gen;  // [level][gen], pu
  std::vector<double> anchor_delta;             // per candidate, 0/1

  double value_at(const std::vector<std::vector<double>>& gen,
                  const std::vector<double>& delta) const;
};

// Investment plus base operation, with the contingency cost replaced by the
// recourse variable alpha and the accumulated cuts. blocks holds the base
// state of each load level, indexed by level ordinal.
struct MasterModel {
  LinearProgram lp;
  std::vector<int> delta;  // per candidate position
  int alpha = -1;
  std::vector<StateBlock> blocks;
  int num_cuts = 0;
};

MasterModel build_master(const Network& net, const ScenarioSet& scen,
                         const Config& cfg);

void add_cut(MasterModel& master, const BendersCut& cut);

// One contingency state. The coupling columns (base dispatch per generator,
// installation per candidate) are created free and pinned to the master's
// values by equality rows, so those rows' duals price the master decisions.
// Balance relief columns keep the program feasible at any pinned point.
struct Subproblem {
  LinearProgram lp;
  int c = 0;
  int t = 0;
  bool relaxed = false;  // direction binaries treated as continuous
  StateBlock block;
  std::vector<int> base_gen;       // per generator position
  std::vector<int> delta;          // per candidate position
  std::vector<int> fix_gen_rows;   // per generator position
  std::vector<int> fix_inst_rows;  // per candidate position
};

Subproblem build_subproblem(const Network& net, const OperatingState& state,
                            const LoadLevel& level, const Config& cfg,
                            const std::vector<double>& base_dispatch,
                            const std::vector<double>& installed,
                            bool relax_y);

struct SubproblemResult {
  int c = 0;
  int t = 0;
  SolveStatus status = SolveStatus::Infeasible;
  double z = 0.0;                  // $/h at the pinned point
  std::vector<double> gen_duals;   // per generator, $/h per pu of base dispatch
  std::vector<double> inst_duals;  // per candidate, $/h per installation unit
  std::vector<double> slack_lo;    // per bus balance relief, pu
  std::vector<double> slack_hi;
  double slack_total = 0.0;
  std::vector<double> y_values;  // per candidate direction choice, fixed runs
  std::vector<double> primal;
};

// Relaxed subproblems solve once as an LP. Unrelaxed ones solve the integer
// program, then pin the direction choices and re-solve for duals, so the
// sensitivities always come from a basis at the reported point.
SubproblemResult solve_subproblem(Subproblem& sub, const SolverOptions& opt);

// Duration-weighted combination of one result per contingency state into a
// single cut anchored at the pinned master point. Throws MissingState when
// a contingency state has no result.
BendersCut aggregate_cut(const std::vector<SubproblemResult>& results,
                         const ScenarioSet& scen,
                         const std::vector<std::vector<double>>& anchor_gen,
                         const std::vector<double>& anchor_delta);

struct BendersIterate {
  int iter = 0;
  int phase = 0;
  double z_down = 0.0;
  double z_up = 0.0;
  double gap = 0.0;
};

struct BendersLog {
  std::vector<BendersIterate> rows;
  // Terminal phase-one bound; the relaxed recourse keeps every phase-one
  // master objective below the true optimum.
  double phase_one_bound = 0.0;
  bool converged = false;
};

struct BendersRun {
  PlanSolution plan;
  BendersLog log;
  std::vector<BendersCut> cuts;
};

// Two-phase decomposition loop: phase one drives the bound gap closed with
// relaxed subproblems (cuts stay valid for the original program), phase two
// repeats the loop with integer direction choices and assembles the final
// plan from the cheapest master-plus-subproblem point it visits. The
// iteration cap applies per phase; the solver wall-clock budget, when set,
// is checked at iteration boundaries.
BendersRun run_two_phase(const Network& net, const ScenarioSet& scen,
                         const Config& cfg);

}  // namespace vsr
