#pragma once

#include <utility>
#include <vector>

#include "vsrplan/common.hpp"

namespace vsr {

// Default angle-difference cap across a branch, pi/3 rad.
inline constexpr double kDefaultThetaMax = 1.0471975511965976;

struct Bus {
  int id = 0;
  bool is_reference = false;
};

struct Branch {
  int id = 0;  // 1-based position in the source branch table
  int from_bus = 0;
  int to_bus = 0;
  double x = 0.0;      // series reactance, pu
  double b = 0.0;      // series susceptance 1/x, pu
  double s_max = 0.0;  // continuous thermal limit, pu
  double emergency_factor = 1.10;
};

struct Generator {
  int id = 0;  // 1-based position in the source gen table
  int bus = 0;
  double p_min = 0.0;  // pu
  double p_max = 0.0;  // pu
  double cost = 0.0;   // $/MWh
  double adjust_up_cost = 0.0;
  double adjust_down_cost = 0.0;
  double ramp_up = 0.0;  // post-contingency redispatch cap, pu
  double ramp_dn = 0.0;
  bool reschedulable = true;
};

struct Load {
  int id = 0;  // 1-based position among nonzero demands
  int bus = 0;
  double p = 0.0;  // demand at nominal level, pu
};

// Branch eligible for a series compensation device.
struct VsrCandidate {
  int branch = 0;
  double bv_min = 0.0;  // device susceptance range, pu
  double bv_max = 0.0;
  double big_m = 0.0;       // disjunction constant, pu rad
  double annual_cost = 0.0;  // $/yr
};

struct Network {
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  std::vector<Load> loads;
  std::vector<VsrCandidate> vsr_candidates;
  double base_mva = 100.0;
  double theta_max = kDefaultThetaMax;

  // Index into buses for a bus id, -1 when absent.
  int bus_index(int bus_id) const;
  // Index into branches for a branch id, -1 when absent.
  int branch_index(int branch_id) const;
  // Index into vsr_candidates for a branch id, -1 when absent.
  int candidate_index(int branch_id) const;
  int reference_bus() const;  // bus id
  double total_load() const;  // pu

  // Checks id uniqueness, cross-references, reference count, positive
  // reactances and ratings, and connectivity.
  void validate() const;
};

// True when every bus is reachable over branches not listed in skip.
bool is_connected(const Network& net, const std::vector<int>& skip_branch_ids);
inline bool is_connected(const Network& net) { return is_connected(net, {}); }

// Device susceptance range for a line of reactance x when the inserted
// reactance spans [comp_min*x, comp_max*x]. The upper compensation endpoint
// yields the lower susceptance bound and vice versa.
std::pair<double, double> vsr_susceptance_bounds(double x, double comp_min,
                                                 double comp_max);

// Disjunction constant sized to the device susceptance envelope.
double big_m(double x, double theta_max);

// Capital recovery: total_cost * i(1+i)^n / ((1+i)^n - 1).
double annualized_cost(double total_cost, double interest, int life_years);

}  // namespace vsr
