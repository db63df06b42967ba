#include "vsrplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "vsrplan/solver.hpp"

namespace vsr {

namespace {

bool is_outaged(const OperatingState& state, int branch_id) {
  return std::find(state.outaged.begin(), state.outaged.end(), branch_id) !=
         state.outaged.end();
}

std::string state_label(const OperatingState& state) {
  return "(c=" + std::to_string(state.c) + ",t=" + std::to_string(state.t) +
         ")";
}

}  // namespace

StateBlock emit_state_block(LinearProgram& lp, const Network& net,
                            const OperatingState& state,
                            const LoadLevel& level,
                            const std::vector<int>& delta_vars,
                            const std::vector<int>* base_gen,
                            const BlockOptions& opt) {
  const std::string tag = "_s" + std::to_string(state.index);
  const double weight = opt.weight < 0.0 ? state.duration : opt.weight;
  const bool contingency = state.c != 0;
  const size_t nbus = net.buses.size();

  StateBlock block;
  block.state = state.index;
  block.bus_angle.resize(nbus);
  block.branch_diff.resize(net.branches.size());
  block.branch_flow.resize(net.branches.size());
  block.gen_p.resize(net.generators.size());
  block.shed.assign(net.loads.size(), -1);
  block.adjust_up.assign(net.generators.size(), -1);
  block.adjust_dn.assign(net.generators.size(), -1);
  block.relief_lo.assign(nbus, -1);
  block.relief_hi.assign(nbus, -1);
  block.device.resize(net.vsr_candidates.size());
  block.balance_row.resize(nbus);

  for (size_t i = 0; i < nbus; ++i) {
    const Bus& bus = net.buses[i];
    double cap = bus.is_reference ? 0.0 : kInf;
    block.bus_angle[i] =
        lp.add_var("th" + std::to_string(bus.id) + tag, -cap, cap);
  }

  for (size_t k = 0; k < net.branches.size(); ++k) {
    const Branch& br = net.branches[k];
    const std::string id = std::to_string(br.id);
    int diff = lp.add_var("d" + id + tag, -net.theta_max, net.theta_max);
    block.branch_diff[k] = diff;
    lp.add_row("ang" + id + tag, RowSense::EQ, 0.0,
               {{diff, 1.0},
                {block.bus_angle[net.bus_index(br.from_bus)], -1.0},
                {block.bus_angle[net.bus_index(br.to_bus)], 1.0}});

    bool out = is_outaged(state, br.id);
    double cap = out ? 0.0
                     : br.s_max * (contingency ? br.emergency_factor : 1.0);
    int flow = lp.add_var("f" + id + tag, -cap, cap);
    block.branch_flow[k] = flow;

    int ci = net.candidate_index(br.id);
    if (ci >= 0) {
      block.device[ci] = emit_device_block(
          lp, br, net.vsr_candidates[ci], delta_vars[ci], diff,
          out ? -1 : flow, net.theta_max, "k" + id + tag, opt.tighten);
    } else if (!out) {
      lp.add_row("flow" + id + tag, RowSense::EQ, 0.0,
                 {{flow, 1.0}, {diff, -br.b}});
    }
  }

  for (size_t n = 0; n < net.generators.size(); ++n) {
    const Generator& g = net.generators[n];
    block.gen_p[n] =
        lp.add_var("g" + std::to_string(g.id) + tag, g.p_min, g.p_max,
                   VarKind::Continuous, g.cost * net.base_mva * weight);
  }

  if (contingency) {
    if (base_gen == nullptr) {
      throw Error(ErrorCode::MissingState,
                  "contingency block " + state_label(state) +
                      " needs base dispatch columns");
    }
    for (size_t m = 0; m < net.loads.size(); ++m) {
      const Load& load = net.loads[m];
      block.shed[m] = lp.add_var(
          "ls" + std::to_string(load.id) + tag, 0.0, load.p * level.scale,
          VarKind::Continuous, opt.shed_penalty * net.base_mva * weight);
    }
    for (size_t n = 0; n < net.generators.size(); ++n) {
      const Generator& g = net.generators[n];
      const std::string id = std::to_string(g.id);
      if (g.reschedulable) {
        int up = lp.add_var("up" + id + tag, 0.0, g.ramp_up,
                            VarKind::Continuous,
                            g.adjust_up_cost * net.base_mva * weight);
        int dn = lp.add_var("dn" + id + tag, 0.0, g.ramp_dn,
                            VarKind::Continuous,
                            g.adjust_down_cost * net.base_mva * weight);
        block.adjust_up[n] = up;
        block.adjust_dn[n] = dn;
        lp.add_row("resch" + id + tag, RowSense::EQ, 0.0,
                   {{block.gen_p[n], 1.0},
                    {(*base_gen)[n], -1.0},
                    {up, -1.0},
                    {dn, 1.0}});
      } else {
        lp.add_row("fixg" + id + tag, RowSense::EQ, 0.0,
                   {{block.gen_p[n], 1.0}, {(*base_gen)[n], -1.0}});
      }
    }
  }

  for (size_t i = 0; i < nbus; ++i) {
    const Bus& bus = net.buses[i];
    std::vector<std::pair<int, double>> cols;
    double demand = 0.0;
    for (size_t n = 0; n < net.generators.size(); ++n) {
      if (net.generators[n].bus == bus.id) cols.push_back({block.gen_p[n], 1.0});
    }
    for (size_t m = 0; m < net.loads.size(); ++m) {
      if (net.loads[m].bus != bus.id) continue;
      demand += net.loads[m].p * level.scale;
      if (block.shed[m] >= 0) cols.push_back({block.shed[m], 1.0});
    }
    for (size_t k = 0; k < net.branches.size(); ++k) {
      const Branch& br = net.branches[k];
      if (br.from_bus == bus.id) cols.push_back({block.branch_flow[k], -1.0});
      if (br.to_bus == bus.id) cols.push_back({block.branch_flow[k], 1.0});
    }
    if (opt.relief_penalty >= 0.0) {
      const std::string id = std::to_string(bus.id);
      double pen = opt.relief_penalty * net.base_mva * weight;
      block.relief_lo[i] =
          lp.add_var("rlo" + id + tag, 0.0, kInf, VarKind::Continuous, pen);
      block.relief_hi[i] =
          lp.add_var("rhi" + id + tag, 0.0, kInf, VarKind::Continuous, pen);
      cols.push_back({block.relief_lo[i], 1.0});
      cols.push_back({block.relief_hi[i], -1.0});
    }
    block.balance_row[i] =
        lp.add_row("bal" + std::to_string(bus.id) + tag, RowSense::EQ, demand,
                   std::span<const std::pair<int, double>>(cols));
  }
  return block;
}

namespace {

PlanModel build_model(const Network& net, const ScenarioSet& scen,
                      const Config& cfg, double relief_penalty) {
  BlockOptions opt;
  opt.tighten = cfg.flag("vsr.tighten");
  opt.shed_penalty = cfg.number("penalty.load_shed");
  opt.relief_penalty = relief_penalty;

  PlanModel model;
  for (const VsrCandidate& cand : net.vsr_candidates) {
    model.delta.push_back(
        model.lp.add_var("delta" + std::to_string(cand.branch), 0.0, 1.0,
                         VarKind::Binary, cand.annual_cost));
  }
  model.blocks.resize(scen.states.size());
  for (const OperatingState& state : scen.states) {
    if (state.c != 0) continue;
    model.blocks[state.index] =
        emit_state_block(model.lp, net, state, scen.levels[state.t],
                         model.delta, nullptr, opt);
  }
  for (const OperatingState& state : scen.states) {
    if (state.c == 0) continue;
    const StateBlock& base = model.blocks[scen.state_index(0, state.t)];
    model.blocks[state.index] =
        emit_state_block(model.lp, net, state, scen.levels[state.t],
                         model.delta, &base.gen_p, opt);
  }
  return model;
}

}  // namespace

PlanModel build_full_model(const Network& net, const ScenarioSet& scen,
                           const Config& cfg) {
  return build_model(net, scen, cfg, -1.0);
}

void fill_block(const StateBlock& block, const Network& net,
                const std::vector<double>& primal, PlanSolution& plan) {
  int s = block.state;
  for (size_t i = 0; i < net.buses.size(); ++i)
    plan.angles[s][i] = primal[block.bus_angle[i]];
  for (size_t k = 0; k < net.branches.size(); ++k) {
    plan.diffs[s][k] = primal[block.branch_diff[k]];
    plan.flows[s][k] = primal[block.branch_flow[k]];
  }
  for (size_t n = 0; n < net.generators.size(); ++n) {
    plan.gen_p[s][n] = primal[block.gen_p[n]];
    if (block.adjust_up[n] >= 0) {
      plan.adjust_up[s][n] = primal[block.adjust_up[n]];
      plan.adjust_dn[s][n] = primal[block.adjust_dn[n]];
    }
  }
  for (size_t m = 0; m < net.loads.size(); ++m) {
    if (block.shed[m] >= 0) plan.shed[s][m] = primal[block.shed[m]];
  }
}

CostBreakdown cost_breakdown(const PlanSolution& plan, const Network& net,
                             const ScenarioSet& scen, const Config& cfg) {
  double shed_penalty = cfg.number("penalty.load_shed");
  CostBreakdown out;
  for (const OperatingState& state : scen.states) {
    int s = state.index;
    double hours = state.duration;
    double gen_cost = 0.0;
    for (size_t n = 0; n < net.generators.size(); ++n)
      gen_cost += net.generators[n].cost * plan.gen_p[s][n];
    if (state.c == 0) {
      out.base_generation += gen_cost * net.base_mva * hours;
      continue;
    }
    out.contingency_generation += gen_cost * net.base_mva * hours;
    double adj = 0.0;
    for (size_t n = 0; n < net.generators.size(); ++n) {
      adj += net.generators[n].adjust_up_cost * plan.adjust_up[s][n] +
             net.generators[n].adjust_down_cost * plan.adjust_dn[s][n];
    }
    out.rescheduling += adj * net.base_mva * hours;
    double shed = 0.0;
    for (size_t m = 0; m < net.loads.size(); ++m) shed += plan.shed[s][m];
    out.load_shedding += shed * shed_penalty * net.base_mva * hours;
  }
  for (size_t ci = 0; ci < net.vsr_candidates.size(); ++ci)
    out.investment += plan.installed[ci] * net.vsr_candidates[ci].annual_cost;
  return out;
}

PlanSolution extract_plan(const PlanModel& model, const Network& net,
                          const ScenarioSet& scen, const Config& cfg,
                          const Solution& sol) {
  PlanSolution plan;
  plan.status = sol.status;
  plan.objective = sol.objective;
  plan.mip_gap = sol.mip_gap;
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
  if (sol.primal.empty()) return plan;

  for (size_t ci = 0; ci < net.vsr_candidates.size(); ++ci)
    plan.installed[ci] = std::round(sol.primal[model.delta[ci]]);
  for (const StateBlock& block : model.blocks)
    fill_block(block, net, sol.primal, plan);

  for (size_t ci = 0; ci < net.vsr_candidates.size(); ++ci) {
    const VsrCandidate& cand = net.vsr_candidates[ci];
    for (const OperatingState& state : scen.states) {
      const StateBlock& block = model.blocks[state.index];
      const DeviceVars& dev = block.device[ci];
      if (plan.installed[ci] >= 0.5 && dev.flow < 0) {
        // Installed but the line is out in this state; no setting to read.
        plan.settings[ci][state.index].state =
            DeviceSetting::State::Indeterminate;
        continue;
      }
      plan.settings[ci][state.index] = recover_device_setting(
          sol.primal[dev.psi], sol.primal[dev.theta], plan.installed[ci],
          cand);
    }
  }
  plan.breakdown = cost_breakdown(plan, net, scen, cfg);
  return plan;
}

SolverOptions solver_options_from(const Config& cfg) {
  SolverOptions opt;
  opt.mip_gap = cfg.number("solver.gap");
  opt.node_limit = cfg.integer("solver.node_limit");
  opt.time_limit_s = cfg.number("solver.time_limit_s");
  opt.max_nonzeros = cfg.integer("solver.max_nonzeros");
  return opt;
}

namespace {

// Re-solves with balance relief columns everywhere and names the states
// (and buses) that need them; pinpoints which operating condition cannot
// be served rather than reporting a bare infeasible status.
std::string locate_infeasible_states(const Network& net,
                                     const ScenarioSet& scen,
                                     const Config& cfg) {
  double pen =
      cfg.number("penalty.load_shed") * cfg.number("penalty.slack_factor");
  PlanModel relaxed = build_model(net, scen, cfg, pen);
  Solution sol = solve_lp(relaxed.lp, solver_options_from(cfg));
  if (!sol.optimal()) {
    return "balance relief probe did not solve; angle or ramp limits "
           "conflict structurally";
  }
  std::string out;
  for (const OperatingState& state : scen.states) {
    const StateBlock& block = relaxed.blocks[state.index];
    double miss = 0.0;
    for (size_t i = 0; i < net.buses.size(); ++i) {
      miss += sol.primal[block.relief_lo[i]] + sol.primal[block.relief_hi[i]];
    }
    if (miss > 1e-6) {
      if (!out.empty()) out += "; ";
      out += "state " + state_label(state) + " short by " +
             format_number(miss) + " pu";
    }
  }
  if (out.empty()) {
    return "relaxation is feasible; integer restrictions conflict";
  }
  return out;
}

}  // namespace

PlanSolution solve_plan(const Network& net, const ScenarioSet& scen,
                        const Config& cfg) {
  PlanModel model = build_full_model(net, scen, cfg);
  Solution sol = solve_milp(model.lp, solver_options_from(cfg));
  PlanSolution plan = extract_plan(model, net, scen, cfg, sol);
  if (sol.status == SolveStatus::Infeasible) {
    plan.diagnostic = locate_infeasible_states(net, scen, cfg);
  }
  return plan;
}

}  // namespace vsr
