#include "vsrplan/solver.hpp"

#include <string>

#include "vsrplan/common.hpp"

namespace vsr {

Solution solve_lp(const LinearProgram& lp, const SolverOptions& opt) {
  if (lp.num_nonzeros() > opt.max_nonzeros)
    throw Error(ErrorCode::ModelSizeExceeded,
                "model has " + std::to_string(lp.num_nonzeros()) +
                    " nonzeros, limit " + std::to_string(opt.max_nonzeros));
  lp.validate();
  SimplexSolver solver(opt);
  solver.load(lp);
  return solver.solve();
}

}  // namespace vsr
