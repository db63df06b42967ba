#include "vsrplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>

#include "vsrplan/lu.hpp"
#include "vsrplan/solver.hpp"

namespace vsr {

namespace {

// Hour bookkeeping unit; integral multiples stay exact in a double.
constexpr std::int64_t kUnitsPerHour = 1 << 20;
constexpr double kHoursPerYear = 8760.0;

}  // namespace

int ScenarioSet::status(int branch_id, const OperatingState& state) const {
  for (int out : state.outaged) {
    if (out == branch_id) return 0;
  }
  return 1;
}

int ScenarioSet::state_index(int c, int t) const {
  for (const OperatingState& state : states) {
    if (state.c == c && state.t == t) return state.index;
  }
  throw Error(ErrorCode::MissingState,
              "no state with c=" + std::to_string(c) +
                  " t=" + std::to_string(t));
}

double ScenarioSet::total_hours() const {
  double sum = 0.0;
  for (const OperatingState& state : states) sum += state.duration;
  return sum;
}

int ScenarioSet::num_contingencies() const {
  int max_c = 0;
  for (const OperatingState& state : states) max_c = std::max(max_c, state.c);
  return max_c;
}

std::vector<LoadLevel> levels_from(const Config& cfg) {
  std::vector<LoadLevel> levels;
  int t = 0;
  for (const LoadLevelSpec& spec : cfg.load_levels()) {
    levels.push_back({t++, spec.scale, spec.label});
  }
  return levels;
}

DurationPolicy duration_policy_from(const Config& cfg) {
  DurationPolicy policy;
  policy.base_split = cfg.number_list("scenario.base_hours_split");
  policy.contingency_hours = cfg.number("scenario.contingency_hours");
  return policy;
}

ScenarioSet build_scenarios(const Network& net,
                            const std::vector<LoadLevel>& levels,
                            const std::vector<int>& contingency_branch_ids,
                            const DurationPolicy& policy) {
  if (levels.empty()) {
    throw Error(ErrorCode::BadConfig, "at least one load level is required");
  }
  if (policy.base_split.size() != levels.size()) {
    throw Error(ErrorCode::BadConfig,
                "base_hours_split has " +
                    std::to_string(policy.base_split.size()) +
                    " entries for " + std::to_string(levels.size()) +
                    " load levels");
  }
  double split_sum = 0.0;
  for (double share : policy.base_split) {
    if (share < 0.0) {
      throw Error(ErrorCode::BadConfig, "base_hours_split entries must be >= 0");
    }
    split_sum += share;
  }
  if (std::fabs(split_sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::BadConfig, "base_hours_split must sum to 1");
  }
  if (policy.contingency_hours < 0.0) {
    throw Error(ErrorCode::BadConfig, "contingency_hours must be >= 0");
  }

  std::set<int> seen;
  for (int branch_id : contingency_branch_ids) {
    if (net.branch_index(branch_id) < 0) {
      throw Error(ErrorCode::BadConfig,
                  "contingency branch " + std::to_string(branch_id) +
                      " is not in service");
    }
    if (!seen.insert(branch_id).second) {
      throw Error(ErrorCode::BadConfig,
                  "contingency branch " + std::to_string(branch_id) +
                      " listed twice");
    }
    if (!is_connected(net, {branch_id})) {
      throw Error(ErrorCode::IslandingContingency,
                  "outage of branch " + std::to_string(branch_id) +
                      " disconnects the network");
    }
  }

  const std::int64_t total_units =
      static_cast<std::int64_t>(kHoursPerYear) * kUnitsPerHour;
  const std::int64_t per_cont = static_cast<std::int64_t>(
      std::llround(policy.contingency_hours * kUnitsPerHour));
  const std::int64_t cont_states = static_cast<std::int64_t>(
      contingency_branch_ids.size() * levels.size());
  const std::int64_t base_total = total_units - per_cont * cont_states;
  if (base_total < 0) {
    throw Error(ErrorCode::DurationUnderflow,
                "contingency hours exceed the year: " +
                    std::to_string(cont_states) + " states at " +
                    format_number(policy.contingency_hours) + " h");
  }

  std::vector<std::int64_t> base_units(levels.size());
  std::int64_t assigned = 0;
  for (size_t t = 0; t < levels.size(); ++t) {
    base_units[t] = static_cast<std::int64_t>(
        std::floor(static_cast<double>(base_total) * policy.base_split[t]));
    assigned += base_units[t];
  }
  base_units[0] += base_total - assigned;  // rounding residue to the first level

  double emergency = 1.0;
  for (const Branch& br : net.branches) {
    emergency = std::max(emergency, br.emergency_factor);
  }

  ScenarioSet set;
  set.levels = levels;
  auto push_state = [&](int c, const std::vector<int>& outaged, int t,
                        std::int64_t units, double rating) {
    OperatingState state;
    state.index = static_cast<int>(set.states.size());
    state.c = c;
    state.outaged = outaged;
    state.t = t;
    state.duration =
        static_cast<double>(units) / static_cast<double>(kUnitsPerHour);
    state.rating_factor = rating;
    set.states.push_back(std::move(state));
  };

  for (size_t t = 0; t < levels.size(); ++t) {
    push_state(0, {}, static_cast<int>(t), base_units[t], 1.0);
  }
  for (size_t c = 0; c < contingency_branch_ids.size(); ++c) {
    for (size_t t = 0; t < levels.size(); ++t) {
      push_state(static_cast<int>(c) + 1, {contingency_branch_ids[c]},
                 static_cast<int>(t), per_cont, emergency);
    }
  }
  return set;
}

namespace {

// Reduced nodal susceptance system with the reference bus removed.
class ReducedSystem {
 public:
  ReducedSystem(const Network& net) : net_(net) {
    for (size_t i = 0; i < net.buses.size(); ++i) {
      bus_pos_[net.buses[i].id] = static_cast<int>(i);
    }
    ref_ = bus_pos_.at(net.reference_bus());
    const int n = static_cast<int>(net.buses.size()) - 1;
    std::vector<std::map<int, double>> entries(n);
    for (const Branch& br : net.branches) {
      int i = bus_pos_.at(br.from_bus);
      int j = bus_pos_.at(br.to_bus);
      if (i != ref_ && j != ref_) {
        entries[reduced(i)][reduced(j)] -= br.b;
        entries[reduced(j)][reduced(i)] -= br.b;
      }
      if (i != ref_) entries[reduced(i)][reduced(i)] += br.b;
      if (j != ref_) entries[reduced(j)][reduced(j)] += br.b;
    }
    std::vector<std::vector<std::pair<int, double>>> cols(n);
    for (int j = 0; j < n; ++j) {
      for (const auto& [i, v] : entries[j]) cols[j].push_back({i, v});
    }
    if (!lu_.factorize(n, cols)) {
      throw Error(ErrorCode::IslandedNetwork,
                  "nodal susceptance matrix is singular");
    }
  }

  int bus_pos(int bus_id) const { return bus_pos_.at(bus_id); }
  int reduced(int pos) const { return pos < ref_ ? pos : pos - 1; }

  // Bus angles for a unit injection at from_bus withdrawn at to_bus.
  std::vector<double> pair_angles(int from_bus, int to_bus) const {
    std::vector<double> theta(net_.buses.size() - 1, 0.0);
    int i = bus_pos_.at(from_bus);
    int j = bus_pos_.at(to_bus);
    if (i != ref_) theta[reduced(i)] += 1.0;
    if (j != ref_) theta[reduced(j)] -= 1.0;
    lu_.ftran(theta);
    return theta;
  }

  double angle(const std::vector<double>& theta, int bus_id) const {
    int pos = bus_pos_.at(bus_id);
    return pos == ref_ ? 0.0 : theta[reduced(pos)];
  }

 private:
  const Network& net_;
  std::unordered_map<int, int> bus_pos_;
  int ref_ = 0;
  SparseLU lu_;
};

}  // namespace

BaseDispatch solve_base_dispatch(const Network& net, double load_scale,
                                 double shed_penalty_per_mwh) {
  LinearProgram lp;
  const double theta_cap = net.theta_max;
  std::unordered_map<int, int> theta_of;
  for (const Bus& bus : net.buses) {
    double lo = bus.is_reference ? 0.0 : -kInf;
    double hi = bus.is_reference ? 0.0 : kInf;
    theta_of[bus.id] =
        lp.add_var("th_" + std::to_string(bus.id), lo, hi);
  }
  std::vector<int> diff_of(net.branches.size());
  std::vector<int> flow_of(net.branches.size());
  for (size_t k = 0; k < net.branches.size(); ++k) {
    const Branch& br = net.branches[k];
    std::string tag = std::to_string(br.id);
    diff_of[k] = lp.add_var("d_" + tag, -theta_cap, theta_cap);
    flow_of[k] = lp.add_var("f_" + tag, -br.s_max, br.s_max);
  }
  std::vector<int> gen_of(net.generators.size());
  for (size_t g = 0; g < net.generators.size(); ++g) {
    const Generator& gen = net.generators[g];
    gen_of[g] = lp.add_var("g_" + std::to_string(gen.id), gen.p_min, gen.p_max,
                           VarKind::Continuous, gen.cost * net.base_mva);
  }
  std::vector<int> shed_of(net.loads.size());
  for (size_t m = 0; m < net.loads.size(); ++m) {
    const Load& load = net.loads[m];
    shed_of[m] =
        lp.add_var("shed_" + std::to_string(load.id), 0.0,
                   load.p * load_scale, VarKind::Continuous,
                   shed_penalty_per_mwh * net.base_mva);
  }

  for (size_t k = 0; k < net.branches.size(); ++k) {
    const Branch& br = net.branches[k];
    std::string tag = std::to_string(br.id);
    lp.add_row("ang_" + tag, RowSense::EQ, 0.0,
               {{diff_of[k], 1.0},
                {theta_of[br.from_bus], -1.0},
                {theta_of[br.to_bus], 1.0}});
    lp.add_row("flow_" + tag, RowSense::EQ, 0.0,
               {{flow_of[k], 1.0}, {diff_of[k], -br.b}});
  }

  std::vector<int> balance_rows(net.buses.size());
  for (size_t i = 0; i < net.buses.size(); ++i) {
    const Bus& bus = net.buses[i];
    std::vector<std::pair<int, double>> entries;
    double demand = 0.0;
    for (size_t g = 0; g < net.generators.size(); ++g) {
      if (net.generators[g].bus == bus.id) entries.push_back({gen_of[g], 1.0});
    }
    for (size_t m = 0; m < net.loads.size(); ++m) {
      if (net.loads[m].bus == bus.id) {
        demand += net.loads[m].p * load_scale;
        entries.push_back({shed_of[m], 1.0});
      }
    }
    for (size_t k = 0; k < net.branches.size(); ++k) {
      const Branch& br = net.branches[k];
      if (br.from_bus == bus.id) entries.push_back({flow_of[k], -1.0});
      if (br.to_bus == bus.id) entries.push_back({flow_of[k], 1.0});
    }
    balance_rows[i] = lp.add_row("bal_" + std::to_string(bus.id), RowSense::EQ,
                                 demand, entries);
  }

  Solution sol = solve_lp(lp);
  if (!sol.optimal()) {
    throw Error(ErrorCode::BadConfig,
                "base dispatch not solvable at load scale " +
                    format_number(load_scale) + ": " +
                    to_string(sol.status));
  }

  BaseDispatch out;
  out.cost = sol.objective;
  for (size_t g = 0; g < net.generators.size(); ++g) {
    out.gen_p.push_back(sol.primal[gen_of[g]]);
  }
  for (size_t k = 0; k < net.branches.size(); ++k) {
    out.flows.push_back(sol.primal[flow_of[k]]);
  }
  for (size_t i = 0; i < net.buses.size(); ++i) {
    out.bus_price.push_back(sol.duals[balance_rows[i]]);
  }
  for (size_t m = 0; m < net.loads.size(); ++m) {
    out.shed_total += sol.primal[shed_of[m]];
  }
  return out;
}

namespace {

// Scores within a nano of each other count as tied so the id tie-break is
// not defeated by solve-order rounding.
void quantize_scores(std::vector<RankedBranch>& scored) {
  for (RankedBranch& rb : scored) {
    rb.score = std::round(rb.score * 1e9) / 1e9;
  }
}

std::vector<RankedBranch> sort_ranked(std::vector<RankedBranch> scored,
                                      int count) {
  std::sort(scored.begin(), scored.end(),
            [](const RankedBranch& a, const RankedBranch& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.branch_id < b.branch_id;
            });
  if (count < static_cast<int>(scored.size())) {
    scored.resize(std::max(count, 0));
  }
  return scored;
}

}  // namespace

std::vector<RankedBranch> rank_contingencies(const Network& net,
                                             const BaseDispatch& dispatch,
                                             int count) {
  if (count <= 0) return {};
  ReducedSystem sys(net);
  std::vector<RankedBranch> scored;
  for (size_t o = 0; o < net.branches.size(); ++o) {
    const Branch& out = net.branches[o];
    std::vector<double> theta = sys.pair_angles(out.from_bus, out.to_bus);
    double self =
        out.b * (sys.angle(theta, out.from_bus) - sys.angle(theta, out.to_bus));
    double denom = 1.0 - self;
    if (std::fabs(denom) < 1e-6) continue;  // outage would island the grid
    double severity = 0.0;
    for (size_t k = 0; k < net.branches.size(); ++k) {
      if (k == o) continue;
      const Branch& br = net.branches[k];
      double transfer = br.b * (sys.angle(theta, br.from_bus) -
                                sys.angle(theta, br.to_bus));
      double post = dispatch.flows[k] + transfer / denom * dispatch.flows[o];
      double limit = br.s_max * br.emergency_factor;
      severity += std::max(0.0, std::fabs(post) - limit);
    }
    scored.push_back({out.id, severity});
  }
  quantize_scores(scored);
  return sort_ranked(std::move(scored), count);
}

std::vector<RankedBranch> select_candidates(const Network& net,
                                            const BaseDispatch& dispatch,
                                            int count, Warnings* warnings) {
  if (count <= 0) return {};
  std::vector<RankedBranch> scored;
  double total_mass = 0.0;
  for (size_t k = 0; k < net.branches.size(); ++k) {
    const Branch& br = net.branches[k];
    double spread =
        std::fabs(dispatch.bus_price[net.bus_index(br.from_bus)] -
                  dispatch.bus_price[net.bus_index(br.to_bus)]);
    double score = spread * std::fabs(dispatch.flows[k]);
    scored.push_back({br.id, score});
  }
  quantize_scores(scored);
  for (const RankedBranch& rb : scored) total_mass += rb.score;
  if (warnings) {
    std::map<double, double> mass_by_score;
    std::map<double, int> members;
    for (const RankedBranch& rb : scored) {
      mass_by_score[rb.score] += rb.score;
      members[rb.score] += 1;
    }
    double tied_mass = 0.0;
    for (const auto& [score, mass] : mass_by_score) {
      if (members[score] > 1) tied_mass += mass;
    }
    if (total_mass == 0.0 || tied_mass > 0.5 * total_mass) {
      warnings->push_back(
          "DegenerateDuals: price spreads do not separate candidates");
    }
  }
  return sort_ranked(std::move(scored), count);
}

void attach_candidates(Network& net, const std::vector<int>& branch_ids,
                       const Config& cfg) {
  double comp_min = cfg.number("vsr.comp_min");
  double comp_max = cfg.number("vsr.comp_max");
  double device_cost = cfg.number("vsr.device_cost");
  double interest = cfg.number("finance.interest");
  int life = cfg.integer("finance.life_years");
  double annual = annualized_cost(device_cost, interest, life);

  net.vsr_candidates.clear();
  for (int branch_id : branch_ids) {
    int k = net.branch_index(branch_id);
    if (k < 0) {
      throw Error(ErrorCode::MalformedMatrix,
                  "candidate branch " + std::to_string(branch_id) +
                      " is not in service");
    }
    const Branch& br = net.branches[k];
    VsrCandidate cand;
    cand.branch = branch_id;
    auto [lo, hi] = vsr_susceptance_bounds(br.x, comp_min, comp_max);
    cand.bv_min = lo;
    cand.bv_max = hi;
    // Smallest constant that leaves the inactive direction pair slack at
    // every reachable angle; anything less clips the device range when the
    // angle difference approaches its cap.
    cand.big_m = (hi - lo) * net.theta_max;
    cand.annual_cost = annual;
    net.vsr_candidates.push_back(cand);
  }
}

}  // namespace vsr
