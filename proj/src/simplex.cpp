#include "vsrplan/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vsr {

namespace {
SolveStats g_stats;
constexpr double kDropTol = 1e-12;
}  // namespace

SolveStats& solve_stats() { return g_stats; }
void reset_solve_stats() { g_stats = SolveStats{}; }

void SimplexSolver::load(const LinearProgram& lp) {
  n_ = lp.num_vars();
  m_ = lp.num_rows();
  cols_.assign(n_, {});
  c_.resize(n_);
  obj_constant_ = lp.obj_constant();
  rhs_.resize(m_);
  sense_.resize(m_);
  for (int j = 0; j < n_; ++j) c_[j] = lp.obj(j);
  for (int i = 0; i < m_; ++i) {
    rhs_[i] = lp.row(i).rhs;
    sense_[i] = lp.row(i).sense;
    const auto cols = lp.row_cols(i);
    const auto coefs = lp.row_coefs(i);
    for (std::size_t t = 0; t < cols.size(); ++t)
      cols_[cols[t]].push_back({i, coefs[t]});
  }

  const int tot = total();
  lb_.resize(tot);
  ub_.resize(tot);
  for (int j = 0; j < n_; ++j) {
    lb_[j] = lp.lower(j);
    ub_[j] = lp.upper(j);
  }
  for (int i = 0; i < m_; ++i) {
    switch (sense_[i]) {
      case RowSense::LE: lb_[n_ + i] = 0.0; ub_[n_ + i] = kInf; break;
      case RowSense::GE: lb_[n_ + i] = -kInf; ub_[n_ + i] = 0.0; break;
      case RowSense::EQ: lb_[n_ + i] = 0.0; ub_[n_ + i] = 0.0; break;
    }
  }
  artificial_.assign(tot, 0);
  state_.assign(tot, kAtLower);
  x_.assign(tot, 0.0);
  d_.assign(tot, 0.0);
  y_.assign(m_, 0.0);
  work_.assign(m_, 0.0);
  rho_.assign(m_, 0.0);
  eta_col_.assign(m_, 0.0);
  reset_to_logical_basis();
}

void SimplexSolver::reset_to_logical_basis() {
  basic_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    basic_[i] = n_ + i;
    state_[n_ + i] = kBasic;
  }
  for (int j = 0; j < n_; ++j)
    if (state_[j] == kBasic) state_[j] = kAtLower;
  std::fill(artificial_.begin(), artificial_.end(), 0);
  needs_factor_ = true;
}

bool SimplexSolver::refactorize() {
  std::vector<std::vector<std::pair<int, double>>> bcols(m_);
  for (int k = 0; k < m_; ++k) {
    const int j = basic_[k];
    if (is_logical(j)) {
      bcols[k].push_back({j - n_, 1.0});
    } else {
      bcols[k].reserve(cols_[j].size());
      for (const auto& e : cols_[j]) bcols[k].push_back({e.row, e.value});
    }
  }
  etas_.clear();
  ++g_stats.factorizations;
  const bool ok = lu_.factorize(m_, bcols);
  needs_factor_ = !ok;
  return ok;
}

void SimplexSolver::ftran(std::vector<double>& v) const {
  lu_.ftran(v);
  for (const auto& e : etas_) {
    const double t = v[e.pos] / e.pivot;
    v[e.pos] = t;
    if (t != 0.0)
      for (const auto& o : e.other) v[o.row] -= o.value * t;
  }
}

void SimplexSolver::btran(std::vector<double>& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double acc = v[it->pos];
    for (const auto& o : it->other) acc -= o.value * v[o.row];
    v[it->pos] = acc / it->pivot;
  }
  lu_.btran(v);
}

void SimplexSolver::refresh_duals() {
  work_.assign(m_, 0.0);
  for (int k = 0; k < m_; ++k) work_[k] = cost(basic_[k]);
  btran(work_);
  y_ = work_;
  for (int j = 0; j < total(); ++j) {
    if (state_[j] == kBasic) {
      d_[j] = 0.0;
      continue;
    }
    if (is_logical(j)) {
      d_[j] = -y_[j - n_];
    } else {
      double acc = c_[j];
      for (const auto& e : cols_[j]) acc -= e.value * y_[e.row];
      d_[j] = acc;
    }
  }
}

void SimplexSolver::place_nonbasic() {
  const double art = opt_.artificial_bound;
  for (int j = 0; j < total(); ++j) {
    if (state_[j] == kBasic) continue;
    artificial_[j] = 0;
    if (lb_[j] >= ub_[j] - 1e-30) {  // fixed
      state_[j] = kAtLower;
      x_[j] = lb_[j];
      continue;
    }
    int side;
    if (d_[j] > opt_.opt_tol) {
      side = kAtLower;
    } else if (d_[j] < -opt_.opt_tol) {
      side = kAtUpper;
    } else {
      side = state_[j];
      if (side == kAtLower && std::isinf(lb_[j]) && !std::isinf(ub_[j]))
        side = kAtUpper;
      else if (side == kAtUpper && std::isinf(ub_[j]) && !std::isinf(lb_[j]))
        side = kAtLower;
    }
    state_[j] = static_cast<State>(side);
    if (side == kAtLower) {
      if (std::isinf(lb_[j])) {
        x_[j] = -art;
        artificial_[j] = 1;
      } else {
        x_[j] = lb_[j];
      }
    } else {
      if (std::isinf(ub_[j])) {
        x_[j] = art;
        artificial_[j] = 1;
      } else {
        x_[j] = ub_[j];
      }
    }
  }
}

void SimplexSolver::refresh_primal() {
  work_ = rhs_;
  for (int j = 0; j < total(); ++j) {
    if (state_[j] == kBasic || x_[j] == 0.0) continue;
    if (is_logical(j)) {
      work_[j - n_] -= x_[j];
    } else {
      for (const auto& e : cols_[j]) work_[e.row] -= e.value * x_[j];
    }
  }
  ftran(work_);
  for (int k = 0; k < m_; ++k) x_[basic_[k]] = work_[k];
}

int SimplexSolver::pick_leaving(bool bland) const {
  int best = -1;
  double best_viol = opt_.feas_tol;
  int best_var = std::numeric_limits<int>::max();
  for (int k = 0; k < m_; ++k) {
    const int j = basic_[k];
    const double v = x_[j];
    const double viol = std::max(lb_[j] - v, v - ub_[j]);
    if (viol <= opt_.feas_tol) continue;
    if (bland) {
      if (j < best_var) {
        best_var = j;
        best = k;
      }
    } else if (viol > best_viol ||
               (viol == best_viol && best >= 0 && j < basic_[best])) {
      best_viol = viol;
      best = k;
    }
  }
  return best;
}

Solution SimplexSolver::finalize(SolveStatus status, std::int64_t iters) {
  if (status == SolveStatus::Optimal) {
    if (!etas_.empty() || needs_factor_) {
      if (refactorize()) {
        refresh_duals();
        refresh_primal();
      }
    }
    for (int j = 0; j < total(); ++j) {
      if (state_[j] == kBasic || !artificial_[j]) continue;
      if (std::abs(d_[j]) > opt_.opt_tol) {
        status = SolveStatus::Unbounded;
        break;
      }
      d_[j] = 0.0;  // unbounded side, multiplier projected to zero
    }
    if (status == SolveStatus::Optimal) {
      for (int k = 0; k < m_; ++k) {
        if (std::abs(x_[basic_[k]]) >= 0.99 * opt_.artificial_bound) {
          status = SolveStatus::Unbounded;
          break;
        }
      }
    }
  }

  Solution sol;
  sol.status = status;
  sol.iterations = iters;
  sol.primal.assign(x_.begin(), x_.begin() + n_);
  sol.duals = y_;
  sol.reduced_costs.assign(d_.begin(), d_.begin() + n_);
  double primal_obj = obj_constant_;
  for (int j = 0; j < n_; ++j) primal_obj += c_[j] * x_[j];
  sol.objective = primal_obj;

  double dual_obj = obj_constant_;
  for (int i = 0; i < m_; ++i) dual_obj += y_[i] * rhs_[i];
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == kBasic || artificial_[j]) continue;
    dual_obj += d_[j] * x_[j];
  }
  sol.dual_objective = dual_obj;

  ++g_stats.lp_solves;
  if (status == SolveStatus::Optimal) {
    const double gap =
        std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj));
    g_stats.max_rel_duality_gap = std::max(g_stats.max_rel_duality_gap, gap);
    // Residual of W x = b measures factorization quality.
    work_ = rhs_;
    for (int j = 0; j < total(); ++j) {
      if (x_[j] == 0.0) continue;
      if (is_logical(j)) {
        work_[j - n_] -= x_[j];
      } else {
        for (const auto& e : cols_[j]) work_[e.row] -= e.value * x_[j];
      }
    }
    double viol = 0.0;
    for (int i = 0; i < m_; ++i) viol = std::max(viol, std::abs(work_[i]));
    for (int k = 0; k < m_; ++k) {
      const int j = basic_[k];
      viol = std::max(viol, lb_[j] - x_[j]);
      viol = std::max(viol, x_[j] - ub_[j]);
    }
    g_stats.max_primal_violation =
        std::max(g_stats.max_primal_violation, viol);
  }
  return sol;
}

Solution SimplexSolver::solve() {
  if (needs_factor_ && !refactorize()) {
    reset_to_logical_basis();
    refactorize();
  }
  refresh_duals();
  place_nonbasic();
  refresh_primal();

  std::int64_t iters = 0;
  int stall = 0;
  int numeric_retries = 0;
  bool bland = false;
  std::vector<std::pair<int, double>> alphas;
  alphas.reserve(64);

  for (;;) {
    const int r = pick_leaving(bland);
    if (r < 0) return finalize(SolveStatus::Optimal, iters);
    if (iters >= opt_.iter_limit) return finalize(SolveStatus::IterLimit, iters);

    const int p = basic_[r];
    const double xp = x_[p];
    const bool above = xp > ub_[p];
    const double target = above ? ub_[p] : lb_[p];
    const double delta_p = xp - target;
    const double sigma = above ? 1.0 : -1.0;

    rho_.assign(m_, 0.0);
    rho_[r] = 1.0;
    btran(rho_);

    alphas.clear();
    for (int j = 0; j < total(); ++j) {
      if (state_[j] == kBasic || lb_[j] >= ub_[j] - 1e-30) continue;
      double a;
      if (is_logical(j)) {
        a = rho_[j - n_];
      } else {
        a = 0.0;
        for (const auto& e : cols_[j]) a += e.value * rho_[e.row];
      }
      if (std::abs(a) > kDropTol) alphas.push_back({j, a});
    }

    // Dual ratio test: smallest |d|/|alpha| over admissible columns, near
    // ties resolved toward the largest pivot and then the smallest index.
    int q = -1;
    double best_ratio = kInf;
    double best_abs = 0.0;
    for (const auto& [j, a] : alphas) {
      const double sa = sigma * a;
      double dj = d_[j];
      bool ok;
      if (state_[j] == kAtLower) {
        ok = sa > opt_.pivot_tol;
        dj = std::max(dj, 0.0);
      } else {
        ok = sa < -opt_.pivot_tol;
        dj = std::min(dj, 0.0);
      }
      if (!ok) continue;
      const double ratio = dj / sa;  // >= 0 by construction
      const double abs_a = std::abs(a);
      bool take;
      if (bland) {
        take = ratio < best_ratio - 1e-12 ||
               (ratio < best_ratio + 1e-12 && (q < 0 || j < q));
      } else {
        take = ratio < best_ratio - 1e-9 ||
               (ratio < best_ratio + 1e-9 &&
                (abs_a > best_abs + 1e-12 ||
                 (std::abs(abs_a - best_abs) <= 1e-12 && (q < 0 || j < q))));
      }
      if (take) {
        best_ratio = std::min(ratio, best_ratio);
        best_abs = abs_a;
        q = j;
      }
    }
    if (q < 0) {
      // Only a freshly factorized basis can certify infeasibility; the eta
      // file may have drifted the primal values that flagged the violation.
      if (etas_.empty()) return finalize(SolveStatus::Infeasible, iters);
      refactorize();
      refresh_duals();
      refresh_primal();
      continue;
    }

    eta_col_.assign(m_, 0.0);
    if (is_logical(q)) {
      eta_col_[q - n_] = 1.0;
    } else {
      for (const auto& e : cols_[q]) eta_col_[e.row] = e.value;
    }
    ftran(eta_col_);
    const double alpha_q = eta_col_[r];
    if (std::abs(alpha_q) < opt_.pivot_tol) {
      if (++numeric_retries > 5) return finalize(SolveStatus::IterLimit, iters);
      refactorize();
      refresh_duals();
      refresh_primal();
      continue;
    }
    numeric_retries = 0;

    const double dx_q = delta_p / alpha_q;
    for (int k = 0; k < m_; ++k) {
      const double h = eta_col_[k];
      if (h != 0.0) x_[basic_[k]] -= dx_q * h;
    }
    x_[q] += dx_q;
    x_[p] = target;

    const double theta_d = d_[q] / alpha_q;
    for (const auto& [j, a] : alphas) d_[j] -= theta_d * a;
    d_[p] = -theta_d;
    d_[q] = 0.0;
    state_[p] = above ? kAtUpper : kAtLower;
    artificial_[p] = 0;
    state_[q] = kBasic;
    artificial_[q] = 0;
    basic_[r] = q;

    Eta eta;
    eta.pos = r;
    eta.pivot = alpha_q;
    for (int k = 0; k < m_; ++k) {
      if (k != r && std::abs(eta_col_[k]) > kDropTol)
        eta.other.push_back({k, eta_col_[k]});
    }
    etas_.push_back(std::move(eta));

    ++iters;
    ++g_stats.pivots;
    if (std::abs(theta_d * delta_p) <= 1e-12) {
      if (++stall > 500) bland = true;
    } else {
      stall = 0;
    }

    if (static_cast<int>(etas_.size()) >= opt_.refactor_every) {
      if (!refactorize()) {
        reset_to_logical_basis();
        refactorize();
      }
      refresh_duals();
      refresh_primal();
    }
  }
}

void SimplexSolver::set_var_bounds(int var, double lower, double upper) {
  lb_[var] = lower;
  ub_[var] = upper;
}

void SimplexSolver::set_rhs(int row, double rhs) { rhs_[row] = rhs; }

void SimplexSolver::set_obj(int var, double coef) { c_[var] = coef; }

int SimplexSolver::add_row(RowSense sense, double rhs,
                           std::span<const std::pair<int, double>> entries) {
  // The new row's logical starts basic, so duals and reduced costs of the
  // existing rows are untouched and the next solve() warm-starts cleanly.
  const int row = m_;
  ++m_;
  rhs_.push_back(rhs);
  sense_.push_back(sense);
  for (const auto& [col, coef] : entries) cols_[col].push_back({row, coef});

  double lo = 0.0, hi = 0.0;
  switch (sense) {
    case RowSense::LE: lo = 0.0; hi = kInf; break;
    case RowSense::GE: lo = -kInf; hi = 0.0; break;
    case RowSense::EQ: lo = 0.0; hi = 0.0; break;
  }
  lb_.push_back(lo);
  ub_.push_back(hi);
  artificial_.push_back(0);
  state_.push_back(kBasic);
  x_.push_back(0.0);
  d_.push_back(0.0);
  basic_.push_back(n_ + row);
  y_.push_back(0.0);
  work_.push_back(0.0);
  rho_.push_back(0.0);
  eta_col_.push_back(0.0);
  needs_factor_ = true;
  return row;
}

Basis SimplexSolver::basis() const {
  Basis b;
  b.state = state_;
  b.basic = basic_;
  return b;
}

void SimplexSolver::set_basis(const Basis& basis) {
  if (static_cast<int>(basis.state.size()) != total() ||
      static_cast<int>(basis.basic.size()) != m_)
    return;
  state_ = basis.state;
  basic_ = basis.basic;
  std::fill(artificial_.begin(), artificial_.end(), 0);
  needs_factor_ = true;
}

}  // namespace vsr
