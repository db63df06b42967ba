#pragma once

#include "vsrplan/lp.hpp"
#include "vsrplan/simplex.hpp"

namespace vsr {

// Solves the continuous relaxation (binary kinds keep only their bounds).
// Throws Error(ModelSizeExceeded) when the model is larger than
// opt.max_nonzeros, the built-in solver's working limit.
Solution solve_lp(const LinearProgram& lp, const SolverOptions& opt = {});

// Branch and bound over the binary variables: best-bound node selection,
// most-fractional branching, and a rounding dive for incumbents. Returns
// Optimal when the relative gap closes below opt.mip_gap; IterLimit carries
// the best incumbent and its gap when a node or time budget runs out.
Solution solve_milp(const LinearProgram& lp, const SolverOptions& opt = {});

}  // namespace vsr
