#pragma once

#include <string>
#include <vector>

#include "vsrplan/common.hpp"
#include "vsrplan/config.hpp"
#include "vsrplan/network.hpp"

namespace vsr {

struct LoadLevel {
  int t = 0;
  double scale = 1.0;
  std::string label;
};

struct OperatingState {
  int index = 0;  // position within the scenario set
  int c = 0;      // 0 for base, 1.. for contingencies
  std::vector<int> outaged;  // branch ids, empty for base
  int t = 0;                 // load level ordinal
  double duration = 0.0;     // h/yr
  double rating_factor = 1.0;
};

// Hour allocation: each contingency state gets a fixed slice, the remaining
// base hours are split across load levels.
struct DurationPolicy {
  std::vector<double> base_split;
  double contingency_hours = 2.0;
};

class ScenarioSet {
 public:
  std::vector<LoadLevel> levels;
  std::vector<OperatingState> states;

  // Branch in-service status in a state, 0 or 1.
  int status(int branch_id, const OperatingState& state) const;
  // Position of state (c, t); throws MissingState when absent.
  int state_index(int c, int t) const;
  double total_hours() const;
  int num_contingencies() const;
};

std::vector<LoadLevel> levels_from(const Config& cfg);
DurationPolicy duration_policy_from(const Config& cfg);

// Enumerates (1 + |contingencies|) x |levels| states. Hours are allocated in
// integral 2^-20 h units so the annual total is exactly 8760.
ScenarioSet build_scenarios(const Network& net,
                            const std::vector<LoadLevel>& levels,
                            const std::vector<int>& contingency_branch_ids,
                            const DurationPolicy& policy);

struct RankedBranch {
  int branch_id = 0;
  double score = 0.0;
};

// Base-case economic dispatch used by the screening heuristics.
struct BaseDispatch {
  std::vector<double> gen_p;      // by generator position, pu
  std::vector<double> flows;      // by branch position, pu
  std::vector<double> bus_price;  // by bus position, $/pu h
  double cost = 0.0;              // $/h
  double shed_total = 0.0;        // pu, nonzero only when demand is stranded
};

// DC optimal dispatch at the given load scaling. Shedding is admitted at the
// penalty price so stressed cases still produce flows and prices.
BaseDispatch solve_base_dispatch(const Network& net, double load_scale,
                                 double shed_penalty_per_mwh);

// Branches whose outage overloads the rest of the grid the most. Severity is
// the sum of post-outage loading above emergency ratings; islanding branches
// are excluded. Ties break by branch id.
std::vector<RankedBranch> rank_contingencies(const Network& net,
                                             const BaseDispatch& dispatch,
                                             int count);

// Branches ranked by locational price spread weighted by flow. Emits a
// warning when more than half the score mass sits in exact ties.
std::vector<RankedBranch> select_candidates(const Network& net,
                                            const BaseDispatch& dispatch,
                                            int count,
                                            Warnings* warnings = nullptr);

// Builds device candidates on the given branches from config economics.
void attach_candidates(Network& net, const std::vector<int>& branch_ids,
                       const Config& cfg);

}  // namespace vsr
