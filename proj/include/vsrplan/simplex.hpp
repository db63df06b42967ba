#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vsrplan/lp.hpp"
#include "vsrplan/lu.hpp"

namespace vsr {

struct SolverOptions {
  double feas_tol = 1e-7;       // primal bound/row tolerance
  double opt_tol = 1e-6;        // dual feasibility tolerance
  double pivot_tol = 1e-9;      // smallest acceptable pivot element
  std::int64_t iter_limit = 5'000'000;
  int refactor_every = 100;     // eta updates between refactorizations
  double artificial_bound = 1e10;

  // Branch and bound controls.
  double mip_gap = 1e-4;
  std::int64_t node_limit = 20'000;
  double time_limit_s = 0.0;    // 0 disables the budget
  std::int64_t max_nonzeros = 50'000;
};

// Accumulated across every LP solve in the process; the reporting layer reads
// it to audit strong duality on a whole run.
struct SolveStats {
  std::int64_t lp_solves = 0;
  std::int64_t pivots = 0;
  std::int64_t factorizations = 0;
  double max_rel_duality_gap = 0.0;
  double max_primal_violation = 0.0;
};

SolveStats& solve_stats();
void reset_solve_stats();

// Snapshot of a simplex basis: per-variable state plus the basic variable of
// each row position. Valid only for a solver with identical dimensions.
struct Basis {
  std::vector<std::uint8_t> state;
  std::vector<int> basic;
  bool empty() const { return basic.empty(); }
};

// Bounded-variable dual simplex over the working system [A I] x = b with one
// logical column per row. Every mutation below preserves enough structure to
// warm-start the next solve() from the current basis: bound changes, RHS
// changes, objective changes, and appended rows (the new logical enters the
// basis). Deterministic pivot selection throughout.
class SimplexSolver {
 public:
  explicit SimplexSolver(SolverOptions opt = {}) : opt_(opt) {}

  void load(const LinearProgram& lp);

  void set_var_bounds(int var, double lower, double upper);
  void set_rhs(int row, double rhs);
  void set_obj(int var, double coef);
  int add_row(RowSense sense, double rhs,
              std::span<const std::pair<int, double>> entries);

  Solution solve();

  Basis basis() const;
  void set_basis(const Basis& basis);

  int num_structural() const { return n_; }
  int num_rows() const { return m_; }
  const SolverOptions& options() const { return opt_; }
  void set_iter_limit(std::int64_t limit) { opt_.iter_limit = limit; }

 private:
  enum State : std::uint8_t { kAtLower = 0, kAtUpper = 1, kBasic = 2 };

  struct Entry {
    int row;
    double value;
  };

  struct Eta {
    int pos;
    double pivot;
    std::vector<Entry> other;  // Entry.row is a basis position here
  };

  int total() const { return n_ + m_; }
  bool is_logical(int j) const { return j >= n_; }
  double cost(int j) const { return j < n_ ? c_[j] : 0.0; }

  bool refactorize();
  void reset_to_logical_basis();
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  void refresh_duals();
  void place_nonbasic();
  void refresh_primal();
  int pick_leaving(bool bland) const;
  Solution finalize(SolveStatus status, std::int64_t iters);

  SolverOptions opt_;
  int n_ = 0;
  int m_ = 0;

  std::vector<std::vector<Entry>> cols_;  // structural columns only
  std::vector<double> c_;                 // structural costs
  double obj_constant_ = 0.0;
  std::vector<double> rhs_;
  std::vector<RowSense> sense_;

  // Real bounds over structural + logical variables. A nonbasic variable
  // whose placement side is unbounded rests at +-artificial_bound instead,
  // flagged in artificial_ so optimality can tell box optima from rays.
  std::vector<double> lb_, ub_;
  std::vector<std::uint8_t> artificial_;

  std::vector<std::uint8_t> state_;
  std::vector<int> basic_;     // variable basic at each row position
  std::vector<double> x_;      // current point, all variables
  std::vector<double> d_;      // reduced costs, all variables
  std::vector<double> y_;      // row duals of the last refresh

  SparseLU lu_;
  std::vector<Eta> etas_;
  bool needs_factor_ = true;

  // scratch
  std::vector<double> work_, rho_, eta_col_;
};

}  // namespace vsr
