#include "vsrplan/reformulation.hpp"

#include <algorithm>
#include <cmath>

namespace vsr {

DeviceVars emit_device_block(LinearProgram& lp, const Branch& br,
                             const VsrCandidate& cand, int delta_var,
                             int theta_var, int flow_var, double theta_max,
                             const std::string& tag, bool tighten) {
  const double lo = cand.bv_min;
  const double hi = cand.bv_max;
  const double big = cand.big_m;
  const double cap = std::max(std::fabs(lo), std::fabs(hi)) * theta_max;

  DeviceVars vars;
  vars.delta = delta_var;
  vars.theta = theta_var;
  vars.flow = flow_var;

  // No flow to steer when the line is out: the block collapses to pinned
  // columns so the direction binary never wanders into the search tree.
  if (flow_var < 0) {
    vars.psi = lp.add_var("psi_" + tag, 0.0, 0.0);
    vars.v = lp.add_var("v_" + tag, 0.0, 0.0);
    vars.y = lp.add_var("y_" + tag, 0.0, 0.0, VarKind::Binary);
    return vars;
  }

  double psi_lo = tighten ? -cap : -kInf;
  double psi_hi = tighten ? cap : kInf;
  vars.psi = lp.add_var("psi_" + tag, psi_lo, psi_hi);
  vars.v = lp.add_var("v_" + tag, -theta_max, theta_max);
  vars.y = lp.add_var("y_" + tag, 0.0, 1.0, VarKind::Binary);

  lp.add_row("dev_flow_" + tag, RowSense::EQ, 0.0,
             {{flow_var, 1.0}, {theta_var, -br.b}, {vars.psi, -1.0}});

  // Direction pair one: binding when y = 0, slack by big when y = 1.
  lp.add_row("dev_dir0_lo_" + tag, RowSense::GE, 0.0,
             {{vars.psi, 1.0}, {vars.v, -lo}, {vars.y, big}});
  lp.add_row("dev_dir0_hi_" + tag, RowSense::LE, 0.0,
             {{vars.psi, 1.0}, {vars.v, -hi}, {vars.y, -big}});
  // Direction pair two: roles of the range endpoints swap, binding at y = 1.
  lp.add_row("dev_dir1_lo_" + tag, RowSense::GE, -big,
             {{vars.psi, 1.0}, {vars.v, -hi}, {vars.y, -big}});
  lp.add_row("dev_dir1_hi_" + tag, RowSense::LE, big,
             {{vars.psi, 1.0}, {vars.v, -lo}, {vars.y, big}});

  // v collapses to zero without the device.
  lp.add_row("dev_off_lo_" + tag, RowSense::GE, 0.0,
             {{vars.v, 1.0}, {delta_var, theta_max}});
  lp.add_row("dev_off_hi_" + tag, RowSense::LE, 0.0,
             {{vars.v, 1.0}, {delta_var, -theta_max}});
  // v tracks theta exactly once installed.
  lp.add_row("dev_on_lo_" + tag, RowSense::GE, -theta_max,
             {{vars.v, 1.0}, {theta_var, -1.0}, {delta_var, -theta_max}});
  lp.add_row("dev_on_hi_" + tag, RowSense::LE, theta_max,
             {{vars.v, 1.0}, {theta_var, -1.0}, {delta_var, theta_max}});

  if (tighten) {
    // Valid for every integral point; cuts the fractional-y slack the
    // direction pairs leave open.
    lp.add_row("dev_cap_lo_" + tag, RowSense::GE, 0.0,
               {{vars.psi, 1.0}, {delta_var, cap}});
    lp.add_row("dev_cap_hi_" + tag, RowSense::LE, 0.0,
               {{vars.psi, 1.0}, {delta_var, -cap}});
  }
  return vars;
}

DeviceSetting recover_device_setting(double psi, double theta, double delta,
                                     const VsrCandidate& cand) {
  DeviceSetting out;
  if (delta < 0.5) {
    out.state = DeviceSetting::State::NotInstalled;
    return out;
  }
  if (std::fabs(theta) <= 1e-6) {
    out.state = DeviceSetting::State::Indeterminate;
    return out;
  }
  double bv = psi / theta;
  if (bv < cand.bv_min - 1e-6 || bv > cand.bv_max + 1e-6) {
    throw Error(ErrorCode::RecoveryOutOfRange,
                "recovered susceptance " + format_number(bv) +
                    " outside device range on branch " +
                    std::to_string(cand.branch));
  }
  out.state = DeviceSetting::State::Active;
  out.susceptance = std::clamp(bv, cand.bv_min, cand.bv_max);
  return out;
}

double compensation_from_susceptance(double bv, double x) {
  if (x <= 0.0) {
    throw Error(ErrorCode::ZeroReactance, "branch reactance must be positive");
  }
  double scaled = bv * x;
  if (1.0 + scaled <= 0.0) {
    throw Error(ErrorCode::SingularCompensation,
                "susceptance " + format_number(bv) +
                    " has no finite compensation on reactance " +
                    format_number(x));
  }
  return -scaled / (1.0 + scaled);
}

}  // namespace vsr
