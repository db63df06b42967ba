#include "vsrplan/benders.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "vsrplan/solver.hpp"

namespace vsr {

double BendersCut::value_at(const std::vector<std::vector<double>>& gen,
                            const std::vector<double>& delta) const {
  double v = constant;
  for (size_t t = 0; t < gen_coeffs.size(); ++t)
    for (size_t n = 0; n < gen_coeffs[t].size(); ++n)
      v += gen_coeffs[t][n] * (gen[t][n] - anchor_gen[t][n]);
  for (size_t k = 0; k < inst_coeffs.size(); ++k)
    v += inst_coeffs[k] * (delta[k] - anchor_delta[k]);
  return v;
}

namespace {

BlockOptions block_options_from(const Config& cfg) {
  BlockOptions opt;
  opt.tighten = cfg.flag("vsr.tighten");
  opt.shed_penalty = cfg.number("penalty.load_shed");
  return opt;
}

std::string state_label(int c, int t) {
  return "(c=" + std::to_string(c) + ",t=" + std::to_string(t) + ")";
}

}  // namespace

MasterModel build_master(const Network& net, const ScenarioSet& scen,
                         const Config& cfg) {
  MasterModel master;
  for (const VsrCandidate& cand : net.vsr_candidates) {
    master.delta.push_back(
        master.lp.add_var("delta" + std::to_string(cand.branch), 0.0, 1.0,
                          VarKind::Binary, cand.annual_cost));
  }
  master.alpha = master.lp.add_var("alpha", cfg.number("benders.alpha_down"),
                                   kInf, VarKind::Continuous, 1.0);
  BlockOptions opt = block_options_from(cfg);
  master.blocks.resize(scen.levels.size());
  for (const OperatingState& state : scen.states) {
    if (state.c != 0) continue;
    master.blocks[state.t] = emit_state_block(
        master.lp, net, state, scen.levels[state.t], master.delta, nullptr,
        opt);
  }
  return master;
}

void add_cut(MasterModel& master, const BendersCut& cut) {
  std::vector<std::pair<int, double>> cols{{master.alpha, 1.0}};
  double rhs = cut.constant;
  for (size_t t = 0; t < cut.gen_coeffs.size(); ++t) {
    for (size_t n = 0; n < cut.gen_coeffs[t].size(); ++n) {
      double mu = cut.gen_coeffs[t][n];
      if (mu == 0.0) continue;
      cols.push_back({master.blocks[t].gen_p[n], -mu});
      rhs -= mu * cut.anchor_gen[t][n];
    }
  }
  for (size_t k = 0; k < cut.inst_coeffs.size(); ++k) {
    double beta = cut.inst_coeffs[k];
    if (beta == 0.0) continue;
    cols.push_back({master.delta[k], -beta});
    rhs -= beta * cut.anchor_delta[k];
  }
  master.lp.add_row("cut" + std::to_string(master.num_cuts++), RowSense::GE,
                    rhs, std::span<const std::pair<int, double>>(cols));
}

Subproblem build_subproblem(const Network& net, const OperatingState& state,
                            const LoadLevel& level, const Config& cfg,
                            const std::vector<double>& base_dispatch,
                            const std::vector<double>& installed,
                            bool relax_y) {
  if (state.c == 0) {
    throw Error(ErrorCode::MissingState,
                "subproblem requires a contingency state, got " +
                    state_label(state.c, state.t));
  }
  Subproblem sub;
  sub.c = state.c;
  sub.t = state.t;
  sub.relaxed = relax_y;

  for (const VsrCandidate& cand : net.vsr_candidates) {
    sub.delta.push_back(sub.lp.add_var(
        "delta" + std::to_string(cand.branch), -kInf, kInf));
  }
  for (const Generator& g : net.generators) {
    sub.base_gen.push_back(
        sub.lp.add_var("bg" + std::to_string(g.id), -kInf, kInf));
  }

  BlockOptions opt = block_options_from(cfg);
  opt.relief_penalty =
      cfg.number("penalty.load_shed") * cfg.number("penalty.slack_factor");
  opt.weight = 1.0;
  sub.block = emit_state_block(sub.lp, net, state, level, sub.delta,
                               &sub.base_gen, opt);
  if (relax_y) {
    for (const DeviceVars& dev : sub.block.device) {
      if (dev.y >= 0) sub.lp.set_kind(dev.y, VarKind::Continuous);
    }
  }

  for (size_t n = 0; n < net.generators.size(); ++n) {
    sub.fix_gen_rows.push_back(
        sub.lp.add_row("fixp" + std::to_string(net.generators[n].id),
                       RowSense::EQ, base_dispatch[n],
                       {{sub.base_gen[n], 1.0}}));
  }
  for (size_t k = 0; k < net.vsr_candidates.size(); ++k) {
    sub.fix_inst_rows.push_back(
        sub.lp.add_row("fixd" + std::to_string(net.vsr_candidates[k].branch),
                       RowSense::EQ, installed[k], {{sub.delta[k], 1.0}}));
  }
  return sub;
}

SubproblemResult solve_subproblem(Subproblem& sub, const SolverOptions& opt) {
  SubproblemResult out;
  out.c = sub.c;
  out.t = sub.t;

  if (!sub.relaxed) {
    Solution integer_sol = solve_milp(sub.lp, opt);
    if (integer_sol.primal.empty()) {
      out.status = integer_sol.status;
      return out;
    }
    for (const DeviceVars& dev : sub.block.device) {
      if (dev.y < 0) continue;
      double y = std::round(integer_sol.primal[dev.y]);
      sub.lp.set_bounds(dev.y, y, y);
      out.y_values.push_back(y);
    }
  }
  Solution sol = solve_lp(sub.lp, opt);
  out.status = sol.status;
  if (sol.primal.empty()) return out;

  out.z = sol.objective;
  for (int row : sub.fix_gen_rows) out.gen_duals.push_back(sol.duals[row]);
  for (int row : sub.fix_inst_rows) out.inst_duals.push_back(sol.duals[row]);
  size_t nbus = sub.block.relief_lo.size();
  out.slack_lo.resize(nbus, 0.0);
  out.slack_hi.resize(nbus, 0.0);
  for (size_t i = 0; i < nbus; ++i) {
    out.slack_lo[i] = sol.primal[sub.block.relief_lo[i]];
    out.slack_hi[i] = sol.primal[sub.block.relief_hi[i]];
    out.slack_total += out.slack_lo[i] + out.slack_hi[i];
  }
  out.primal = std::move(sol.primal);
  return out;
}

BendersCut aggregate_cut(const std::vector<SubproblemResult>& results,
                         const ScenarioSet& scen,
                         const std::vector<std::vector<double>>& anchor_gen,
                         const std::vector<double>& anchor_delta) {
  BendersCut cut;
  cut.anchor_gen = anchor_gen;
  cut.anchor_delta = anchor_delta;
  size_t ngen = anchor_gen.empty() ? 0 : anchor_gen[0].size();
  cut.gen_coeffs.assign(scen.levels.size(), std::vector<double>(ngen, 0.0));
  cut.inst_coeffs.assign(anchor_delta.size(), 0.0);

  for (const OperatingState& state : scen.states) {
    if (state.c == 0) continue;
    const SubproblemResult* found = nullptr;
    for (const SubproblemResult& r : results) {
      if (r.c == state.c && r.t == state.t) {
        found = &r;
        break;
      }
    }
    if (found == nullptr) {
      throw Error(ErrorCode::MissingState,
                  "no subproblem result for state " +
                      state_label(state.c, state.t));
    }
    double pi = state.duration;
    cut.constant += pi * found->z;
    for (size_t n = 0; n < found->gen_duals.size(); ++n)
      cut.gen_coeffs[state.t][n] += pi * found->gen_duals[n];
    for (size_t k = 0; k < found->inst_duals.size(); ++k)
      cut.inst_coeffs[k] += pi * found->inst_duals[k];
  }
  return cut;
}

namespace {

PlanSolution blank_plan(const Network& net, const ScenarioSet& scen) {
  PlanSolution plan;
  size_t ns = scen.states.size();
  plan.gen_p.assign(ns, std::vector<double>(net.generators.size(), 0.0));
  plan.flows.assign(ns, std::vector<double>(net.branches.size(), 0.0));
  plan.angles.assign(ns, std::vector<double>(net.buses.size(), 0.0));
  plan.diffs.assign(ns, std::vector<double>(net.branches.size(), 0.0));
  plan.shed.assign(ns, std::vector<double>(net.loads.size(), 0.0));
  plan.adjust_up.assign(ns, std::vector<double>(net.generators.size(), 0.0));
  plan.adjust_dn.assign(ns, std::vector<double>(net.generators.size(), 0.0));
  plan.installed.assign(net.vsr_candidates.size(), 0.0);
  plan.settings.assign(net.vsr_candidates.size(),
                       std::vector<DeviceSetting>(ns));
  return plan;
}

// Snapshot of one full master-plus-subproblems iterate, kept whenever its
// combined cost beats the best seen so far.
struct Incumbent {
  bool present = false;
  double z_up = std::numeric_limits<double>::infinity();
  std::vector<double> master_primal;
  std::vector<std::vector<double>> anchor_gen;
  std::vector<double> anchor_delta;
  std::vector<Subproblem> subs;
  std::vector<SubproblemResult> results;
};

PlanSolution assemble_plan(const Network& net, const ScenarioSet& scen,
                           const Config& cfg, const MasterModel& master,
                           Incumbent& best) {
  PlanSolution plan = blank_plan(net, scen);
  plan.objective = best.z_up;
  plan.installed = best.anchor_delta;

  for (size_t t = 0; t < master.blocks.size(); ++t)
    fill_block(master.blocks[t], net, best.master_primal, plan);
  for (size_t i = 0; i < best.subs.size(); ++i)
    fill_block(best.subs[i].block, net, best.results[i].primal, plan);

  for (size_t ci = 0; ci < net.vsr_candidates.size(); ++ci) {
    const VsrCandidate& cand = net.vsr_candidates[ci];
    for (size_t t = 0; t < master.blocks.size(); ++t) {
      const DeviceVars& dev = master.blocks[t].device[ci];
      plan.settings[ci][master.blocks[t].state] =
          recover_device_setting(best.master_primal[dev.psi],
                                 best.master_primal[dev.theta],
                                 plan.installed[ci], cand);
    }
    for (size_t i = 0; i < best.subs.size(); ++i) {
      const DeviceVars& dev = best.subs[i].block.device[ci];
      if (plan.installed[ci] >= 0.5 && dev.flow < 0) {
        plan.settings[ci][best.subs[i].block.state].state =
            DeviceSetting::State::Indeterminate;
        continue;
      }
      plan.settings[ci][best.subs[i].block.state] =
          recover_device_setting(best.results[i].primal[dev.psi],
                                 best.results[i].primal[dev.theta],
                                 plan.installed[ci], cand);
    }
  }

  plan.breakdown = cost_breakdown(plan, net, scen, cfg);
  std::string relief;
  for (const SubproblemResult& r : best.results) {
    if (r.slack_total <= 1e-6) continue;
    if (!relief.empty()) relief += "; ";
    relief += "state " + state_label(r.c, r.t) + " needed balance relief of " +
              format_number(r.slack_total) + " pu";
  }
  plan.diagnostic = relief;
  return plan;
}

}  // namespace

BendersRun run_two_phase(const Network& net, const ScenarioSet& scen,
                         const Config& cfg) {
  const double eps = cfg.number("benders.epsilon");
  const int iter_cap = static_cast<int>(cfg.integer("benders.iter_cap"));
  SolverOptions sopt = solver_options_from(cfg);
  const auto start = std::chrono::steady_clock::now();
  auto out_of_time = [&]() {
    if (sopt.time_limit_s <= 0.0) return false;
    std::chrono::duration<double> spent =
        std::chrono::steady_clock::now() - start;
    return spent.count() > sopt.time_limit_s;
  };

  BendersRun run;
  MasterModel master = build_master(net, scen, cfg);

  std::vector<const OperatingState*> cont_states;
  for (const OperatingState& state : scen.states)
    if (state.c != 0) cont_states.push_back(&state);

  Incumbent best;
  int iter = 0;
  double z_down = 0.0;
  double gap = std::numeric_limits<double>::infinity();

  for (int phase = 1; phase <= 2; ++phase) {
    bool phase_done = false;
    for (int k = 0; k < iter_cap && !phase_done; ++k) {
      if (k > 0 && out_of_time()) break;
      ++iter;

      Solution master_sol = solve_milp(master.lp, sopt);
      if (master_sol.primal.empty()) {
        run.plan = blank_plan(net, scen);
        run.plan.status = SolveStatus::Infeasible;
        run.plan.diagnostic =
            "master problem is infeasible; base operating states cannot be "
            "served at any installation choice";
        return run;
      }
      z_down = master_sol.objective;

      std::vector<std::vector<double>> anchor_gen(scen.levels.size());
      for (size_t t = 0; t < master.blocks.size(); ++t) {
        for (int var : master.blocks[t].gen_p)
          anchor_gen[t].push_back(master_sol.primal[var]);
      }
      std::vector<double> anchor_delta;
      for (int var : master.delta)
        anchor_delta.push_back(std::round(master_sol.primal[var]));

      double committed = 0.0;
      for (size_t t = 0; t < scen.levels.size(); ++t) {
        double hourly = 0.0;
        for (size_t n = 0; n < net.generators.size(); ++n)
          hourly += net.generators[n].cost * net.base_mva * anchor_gen[t][n];
        committed +=
            scen.states[scen.state_index(0, static_cast<int>(t))].duration *
            hourly;
      }
      for (size_t ci = 0; ci < net.vsr_candidates.size(); ++ci)
        committed += net.vsr_candidates[ci].annual_cost * anchor_delta[ci];

      std::vector<Subproblem> subs;
      std::vector<SubproblemResult> results;
      double recourse = 0.0;
      for (const OperatingState* state : cont_states) {
        subs.push_back(build_subproblem(net, *state, scen.levels[state->t],
                                        cfg, anchor_gen[state->t],
                                        anchor_delta, phase == 1));
        results.push_back(solve_subproblem(subs.back(), sopt));
        if (results.back().primal.empty()) {
          run.plan = blank_plan(net, scen);
          run.plan.status = results.back().status;
          run.plan.diagnostic = "subproblem for state " +
                                state_label(state->c, state->t) +
                                " did not solve";
          return run;
        }
        recourse += state->duration * results.back().z;
      }

      double z_up = committed + recourse;
      gap = std::fabs(z_up - z_down) / std::max(std::fabs(z_down), 1e-12);
      run.log.rows.push_back({iter, phase, z_down, z_up, gap});

      if (gap <= eps) {
        phase_done = true;
      } else {
        BendersCut cut = aggregate_cut(results, scen, anchor_gen,
                                       anchor_delta);
        add_cut(master, cut);
        run.cuts.push_back(cut);
      }

      if (phase == 2 && z_up < best.z_up) {
        best.present = true;
        best.z_up = z_up;
        best.master_primal = std::move(master_sol.primal);
        best.anchor_gen = std::move(anchor_gen);
        best.anchor_delta = std::move(anchor_delta);
        best.subs = std::move(subs);
        best.results = std::move(results);
      }
    }
    if (phase == 1) run.log.phase_one_bound = z_down;
  }

  run.log.converged = gap <= eps;
  if (!best.present) {
    run.plan = blank_plan(net, scen);
    run.plan.status = SolveStatus::IterLimit;
    run.plan.diagnostic = "no integer-feasible iterate completed";
    return run;
  }
  run.plan = assemble_plan(net, scen, cfg, master, best);
  run.plan.status =
      run.log.converged ? SolveStatus::Optimal : SolveStatus::IterLimit;
  run.plan.mip_gap =
      std::fabs(best.z_up - z_down) / std::max(std::fabs(z_down), 1e-12);
  return run;
}

}  // namespace vsr
