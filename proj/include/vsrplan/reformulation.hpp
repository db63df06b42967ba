#pragma once

#include <string>

#include "vsrplan/lp.hpp"
#include "vsrplan/network.hpp"

namespace vsr {

// Column ids for one device on one branch in one operating state. delta is
// shared across every state of the same candidate; theta and flow belong to
// the enclosing state block.
struct DeviceVars {
  int psi = -1;    // device flow contribution, pu
  int v = -1;      // linearized delta*theta product, rad
  int y = -1;      // flow direction selector
  int delta = -1;  // installation decision
  int theta = -1;  // angle difference across the branch, rad
  int flow = -1;   // branch flow, pu (< 0 when the branch is outaged)
};

// Adds psi, v, y columns plus the rows that pin psi to delta*b*theta for a
// susceptance b inside the device range: a direction-selecting disjunction
// pair, a box that collapses v when the device is absent, a link that pins
// v to theta when it is present, and (when tighten is set) a cap row pair
// bounding |psi| by its installed maximum times delta. When vars.flow is a
// valid column the branch flow equation flow = b*theta + psi is added too;
// callers fix flow to zero and pass -1 for outaged states.
DeviceVars emit_device_block(LinearProgram& lp, const Branch& br,
                             const VsrCandidate& cand, int delta_var,
                             int theta_var, int flow_var, double theta_max,
                             const std::string& tag, bool tighten = true);

struct DeviceSetting {
  enum class State { NotInstalled, Active, Indeterminate };
  State state = State::NotInstalled;
  double susceptance = 0.0;  // pu, meaningful when Active
};

// Post-solve inverse of psi = delta*b*theta. Indeterminate flags an
// installed device on an unloaded branch (theta ~ 0, any setting works).
// Throws RecoveryOutOfRange when the implied susceptance falls outside the
// device range by more than 1e-6, which signals a formulation defect.
DeviceSetting recover_device_setting(double psi, double theta, double delta,
                                     const VsrCandidate& cand);

// Series compensation fraction that produces added susceptance bv on a
// branch of reactance x (inverse of the sizing map).
double compensation_from_susceptance(double bv, double x);

}  // namespace vsr
