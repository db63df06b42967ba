#include "vsrplan/network.hpp"

#include <cmath>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace vsr {

int Network::bus_index(int bus_id) const {
  for (size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == bus_id) return static_cast<int>(i);
  }
  return -1;
}

int Network::branch_index(int branch_id) const {
  for (size_t i = 0; i < branches.size(); ++i) {
    if (branches[i].id == branch_id) return static_cast<int>(i);
  }
  return -1;
}

int Network::candidate_index(int branch_id) const {
  for (size_t i = 0; i < vsr_candidates.size(); ++i) {
    if (vsr_candidates[i].branch == branch_id) return static_cast<int>(i);
  }
  return -1;
}

int Network::reference_bus() const {
  for (const Bus& bus : buses) {
    if (bus.is_reference) return bus.id;
  }
  throw Error(ErrorCode::NoReference, "network has no reference bus");
}

double Network::total_load() const {
  double sum = 0.0;
  for (const Load& load : loads) sum += load.p;
  return sum;
}

bool is_connected(const Network& net, const std::vector<int>& skip_branch_ids) {
  if (net.buses.empty()) return true;
  std::unordered_set<int> skip(skip_branch_ids.begin(), skip_branch_ids.end());
  std::unordered_map<int, std::vector<int>> adjacency;
  for (const Branch& br : net.branches) {
    if (skip.count(br.id)) continue;
    adjacency[br.from_bus].push_back(br.to_bus);
    adjacency[br.to_bus].push_back(br.from_bus);
  }
  std::unordered_set<int> seen;
  std::queue<int> frontier;
  frontier.push(net.buses.front().id);
  seen.insert(net.buses.front().id);
  while (!frontier.empty()) {
    int at = frontier.front();
    frontier.pop();
    auto it = adjacency.find(at);
    if (it == adjacency.end()) continue;
    for (int next : it->second) {
      if (seen.insert(next).second) frontier.push(next);
    }
  }
  return seen.size() == net.buses.size();
}

void Network::validate() const {
  std::set<int> bus_ids;
  int references = 0;
  for (const Bus& bus : buses) {
    if (!bus_ids.insert(bus.id).second) {
      throw Error(ErrorCode::MalformedMatrix,
                  "duplicate bus id " + std::to_string(bus.id));
    }
    if (bus.is_reference) ++references;
  }
  if (references != 1) {
    throw Error(ErrorCode::NoReference,
                "expected exactly one reference bus, found " +
                    std::to_string(references));
  }
  std::set<int> branch_ids;
  for (const Branch& br : branches) {
    if (!branch_ids.insert(br.id).second) {
      throw Error(ErrorCode::MalformedMatrix,
                  "duplicate branch id " + std::to_string(br.id));
    }
    if (!bus_ids.count(br.from_bus) || !bus_ids.count(br.to_bus)) {
      throw Error(ErrorCode::MalformedMatrix,
                  "branch " + std::to_string(br.id) + " references unknown bus");
    }
    if (!(br.x > 0.0)) {
      throw Error(ErrorCode::ZeroReactance,
                  "branch " + std::to_string(br.id) + " has x = " +
                      std::to_string(br.x));
    }
    if (std::fabs(br.b * br.x - 1.0) > 1e-12) {
      throw Error(ErrorCode::MalformedMatrix,
                  "branch " + std::to_string(br.id) +
                      " susceptance inconsistent with reactance");
    }
    if (!(br.s_max > 0.0)) {
      throw Error(ErrorCode::MalformedMatrix,
                  "branch " + std::to_string(br.id) + " has nonpositive rating");
    }
    if (br.emergency_factor < 1.0) {
      throw Error(ErrorCode::BadConfig,
                  "branch " + std::to_string(br.id) +
                      " emergency factor below 1");
    }
  }
  for (const Generator& gen : generators) {
    if (!bus_ids.count(gen.bus)) {
      throw Error(ErrorCode::MalformedMatrix,
                  "generator " + std::to_string(gen.id) +
                      " references unknown bus " + std::to_string(gen.bus));
    }
    if (gen.p_min > gen.p_max) {
      throw Error(ErrorCode::MalformedMatrix,
                  "generator " + std::to_string(gen.id) + " has p_min > p_max");
    }
    if (gen.ramp_up < 0.0 || gen.ramp_dn < 0.0 || gen.cost < 0.0 ||
        gen.adjust_up_cost < 0.0 || gen.adjust_down_cost < 0.0) {
      throw Error(ErrorCode::MalformedMatrix,
                  "generator " + std::to_string(gen.id) +
                      " has negative cost or ramp");
    }
  }
  for (const Load& load : loads) {
    if (!bus_ids.count(load.bus)) {
      throw Error(ErrorCode::MalformedMatrix,
                  "load " + std::to_string(load.id) + " references unknown bus");
    }
    if (load.p < 0.0) {
      throw Error(ErrorCode::MalformedMatrix,
                  "load " + std::to_string(load.id) + " has negative demand");
    }
  }
  for (const VsrCandidate& cand : vsr_candidates) {
    if (!branch_ids.count(cand.branch)) {
      throw Error(ErrorCode::MalformedMatrix,
                  "candidate references unknown branch " +
                      std::to_string(cand.branch));
    }
    if (cand.annual_cost < 0.0) {
      throw Error(ErrorCode::BadConfig, "candidate on branch " +
                                            std::to_string(cand.branch) +
                                            " has negative annual cost");
    }
  }
  if (!(theta_max > 0.0)) {
    throw Error(ErrorCode::BadConfig, "theta_max must be positive");
  }
  if (!is_connected(*this)) {
    throw Error(ErrorCode::IslandedNetwork,
                "in-service network is not connected");
  }
}

std::pair<double, double> vsr_susceptance_bounds(double x, double comp_min,
                                                 double comp_max) {
  if (!(x > 0.0)) {
    throw Error(ErrorCode::ZeroReactance,
                "compensated line must have positive reactance");
  }
  if (comp_min > comp_max) {
    throw Error(ErrorCode::BadConfig, "compensation range is inverted");
  }
  // The device inserts x_v = comp * x, so the total reactance is x(1 + comp)
  // and the equivalent added susceptance is -comp / (x (1 + comp)).
  auto endpoint = [&](double comp) {
    double total = 1.0 + comp;
    if (total <= 0.0) {
      std::ostringstream msg;
      msg << "compensation " << comp << " drives line reactance through zero";
      throw Error(ErrorCode::SingularCompensation, msg.str());
    }
    return -comp / (x * total);
  };
  return {endpoint(comp_max), endpoint(comp_min)};
}

double big_m(double x, double theta_max) {
  if (!(x > 0.0)) {
    throw Error(ErrorCode::ZeroReactance,
                "compensated line must have positive reactance");
  }
  return 7.0 / (3.0 * x) * theta_max;
}

double annualized_cost(double total_cost, double interest, int life_years) {
  if (!(interest > 0.0) || life_years < 1) {
    throw Error(ErrorCode::BadConfig, "interest must be > 0 and life >= 1");
  }
  double growth = std::pow(1.0 + interest, life_years);
  return total_cost * interest * growth / (growth - 1.0);
}

}  // namespace vsr
