#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "vsrplan/common.hpp"
#include "vsrplan/solver.hpp"

namespace vsr {

namespace {

constexpr double kIntTol = 1e-6;

struct Fixing {
  int var;
  std::uint8_t value;
};

struct Node {
  double bound;
  std::int64_t id;
  std::vector<Fixing> fixings;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;
  }
};

double relative_gap(double bound, double incumbent) {
  return std::abs(bound - incumbent) / (1e-10 + std::abs(incumbent));
}

class BranchAndBound {
 public:
  BranchAndBound(const LinearProgram& lp, const SolverOptions& opt)
      : lp_(lp), opt_(opt), solver_(opt) {
    for (int j = 0; j < lp.num_vars(); ++j)
      if (lp.kind(j) == VarKind::Binary) binaries_.push_back(j);
    solver_.load(lp);
    start_ = std::chrono::steady_clock::now();
  }

  Solution run();

 private:
  bool out_of_time() const {
    if (opt_.time_limit_s <= 0.0) return false;
    const auto elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start_);
    return elapsed.count() >= opt_.time_limit_s;
  }

  void apply_fixings(const std::vector<Fixing>& fixings) {
    for (int j : binaries_) solver_.set_var_bounds(j, lp_.lower(j), lp_.upper(j));
    for (const auto& f : fixings)
      solver_.set_var_bounds(f.var, f.value, f.value);
  }

  // Most fractional binary, ties to the smallest index; -1 when integral.
  int pick_branch_var(const std::vector<double>& x) const {
    int best = -1;
    double best_dist = kIntTol;
    for (int j : binaries_) {
      const double frac = x[j] - std::floor(x[j]);
      const double dist = std::min(frac, 1.0 - frac);
      if (dist > best_dist + 1e-12) {
        best_dist = dist;
        best = j;
      }
    }
    return best;
  }

  void try_incumbent(const Solution& sol, const std::vector<Fixing>& fixings);
  void rounding_dive(const Solution& relaxed, std::vector<Fixing> fixings);

  const LinearProgram& lp_;
  SolverOptions opt_;
  SimplexSolver solver_;
  std::vector<int> binaries_;
  std::chrono::steady_clock::time_point start_;

  double incumbent_obj_ = kInf;
  std::vector<double> incumbent_x_;
  std::int64_t next_id_ = 0;
  std::int64_t nodes_solved_ = 0;
};

// A node solution whose binaries all sit within tolerance of 0/1 becomes an
// incumbent after one clean re-solve with the binaries pinned, so the stored
// point is feasible at exact integer values.
void BranchAndBound::try_incumbent(const Solution& sol,
                                   const std::vector<Fixing>& fixings) {
  std::vector<Fixing> pinned = fixings;
  for (int j : binaries_) {
    const double v = sol.primal[j];
    pinned.push_back({j, static_cast<std::uint8_t>(v >= 0.5 ? 1 : 0)});
  }
  apply_fixings(pinned);
  const Solution clean = solver_.solve();
  const Solution& pick = clean.optimal() ? clean : sol;
  if (pick.optimal() && pick.objective < incumbent_obj_ - 1e-12) {
    incumbent_obj_ = pick.objective;
    incumbent_x_ = pick.primal;
    for (int j : binaries_)
      incumbent_x_[j] = std::round(incumbent_x_[j]);
  }
}

void BranchAndBound::rounding_dive(const Solution& relaxed,
                                   std::vector<Fixing> fixings) {
  Solution current = relaxed;
  for (int round = 0; round < 50; ++round) {
    bool integral = true;
    for (int j : binaries_) {
      const double frac = current.primal[j] - std::floor(current.primal[j]);
      if (std::min(frac, 1.0 - frac) > kIntTol) {
        integral = false;
        break;
      }
    }
    if (integral) {
      try_incumbent(current, fixings);
      return;
    }
    std::vector<char> already(lp_.num_vars(), 0);
    for (const auto& f : fixings) already[f.var] = 1;
    for (int j : binaries_) {
      if (already[j]) continue;
      const double frac = current.primal[j] - std::floor(current.primal[j]);
      if (std::min(frac, 1.0 - frac) > kIntTol)
        fixings.push_back(
            {j, static_cast<std::uint8_t>(current.primal[j] >= 0.5 ? 1 : 0)});
    }
    apply_fixings(fixings);
    current = solver_.solve();
    if (!current.optimal() || current.objective >= incumbent_obj_ - 1e-12)
      return;
  }
}

Solution BranchAndBound::run() {
  std::vector<Fixing> root_fixings;
  apply_fixings(root_fixings);
  Solution root = solver_.solve();
  ++nodes_solved_;
  if (!root.optimal()) {
    root.mip_gap = kInf;
    return root;
  }
  if (binaries_.empty()) {
    root.mip_gap = 0.0;
    return root;
  }

  if (pick_branch_var(root.primal) < 0) {
    try_incumbent(root, root_fixings);
    if (incumbent_obj_ < kInf) {
      Solution out;
      out.status = SolveStatus::Optimal;
      out.objective = incumbent_obj_;
      out.primal = incumbent_x_;
      out.mip_gap = 0.0;
      out.iterations = nodes_solved_;
      return out;
    }
  }
  rounding_dive(root, root_fixings);

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  {
    const int var = pick_branch_var(root.primal);
    if (var >= 0) {
      for (std::uint8_t v : {std::uint8_t{0}, std::uint8_t{1}}) {
        Node child;
        child.bound = root.objective;
        child.id = next_id_++;
        child.fixings = root_fixings;
        child.fixings.push_back({var, v});
        open.push(std::move(child));
      }
    }
  }

  double best_bound = root.objective;
  bool budget_hit = false;
  while (!open.empty()) {
    best_bound = open.top().bound;
    if (incumbent_obj_ < kInf &&
        relative_gap(best_bound, incumbent_obj_) <= opt_.mip_gap)
      break;
    if (nodes_solved_ >= opt_.node_limit || out_of_time()) {
      budget_hit = true;
      break;
    }

    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent_obj_ - 1e-12 * (1.0 + std::abs(incumbent_obj_)))
      continue;

    apply_fixings(node.fixings);
    Solution sol = solver_.solve();
    ++nodes_solved_;
    if (!sol.optimal()) continue;  // infeasible or numerically abandoned
    if (sol.objective >= incumbent_obj_ - 1e-12 * (1.0 + std::abs(incumbent_obj_)))
      continue;

    const int var = pick_branch_var(sol.primal);
    if (var < 0) {
      try_incumbent(sol, node.fixings);
      continue;
    }
    if (nodes_solved_ % 10 == 0) rounding_dive(sol, node.fixings);

    for (std::uint8_t v : {std::uint8_t{0}, std::uint8_t{1}}) {
      Node child;
      child.bound = sol.objective;
      child.id = next_id_++;
      child.fixings = node.fixings;
      child.fixings.push_back({var, v});
      open.push(std::move(child));
    }
  }

  Solution out;
  out.iterations = nodes_solved_;
  if (incumbent_obj_ < kInf) {
    const double bound = open.empty() ? incumbent_obj_ : best_bound;
    out.objective = incumbent_obj_;
    out.primal = incumbent_x_;
    out.mip_gap = relative_gap(bound, incumbent_obj_);
    out.status = (budget_hit && out.mip_gap > opt_.mip_gap)
                     ? SolveStatus::IterLimit
                     : SolveStatus::Optimal;
  } else {
    out.status = budget_hit ? SolveStatus::IterLimit : SolveStatus::Infeasible;
    out.objective = kInf;
    out.mip_gap = kInf;
  }
  return out;
}

}  // namespace

Solution solve_milp(const LinearProgram& lp, const SolverOptions& opt) {
  if (lp.num_nonzeros() > opt.max_nonzeros)
    throw Error(ErrorCode::ModelSizeExceeded,
                "model has " + std::to_string(lp.num_nonzeros()) +
                    " nonzeros, limit " + std::to_string(opt.max_nonzeros));
  lp.validate();
  BranchAndBound bnb(lp, opt);
  return bnb.run();
}

}  // namespace vsr
