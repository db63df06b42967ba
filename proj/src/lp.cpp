#include "vsrplan/lp.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "vsrplan/common.hpp"

namespace vsr {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterLimit: return "iteration_limit";
  }
  return "unknown";
}

int LinearProgram::add_var(std::string name, double lower, double upper,
                           VarKind kind, double obj) {
  var_names_.push_back(std::move(name));
  lower_.push_back(lower);
  upper_.push_back(upper);
  kind_.push_back(kind);
  obj_.push_back(obj);
  return static_cast<int>(lower_.size()) - 1;
}

int LinearProgram::add_row(std::string name, RowSense sense, double rhs,
                           std::span<const std::pair<int, double>> entries) {
  row_names_.push_back(std::move(name));
  rows_.push_back({sense, rhs});
  for (const auto& [col, coef] : entries) {
    cols_.push_back(col);
    coef_.push_back(coef);
  }
  row_start_.push_back(cols_.size());
  return static_cast<int>(rows_.size()) - 1;
}

std::span<const int> LinearProgram::row_cols(int i) const {
  return {cols_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
}

std::span<const double> LinearProgram::row_coefs(int i) const {
  return {coef_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
}

bool LinearProgram::has_integrality() const {
  return std::any_of(kind_.begin(), kind_.end(),
                     [](VarKind k) { return k == VarKind::Binary; });
}

int LinearProgram::num_binaries() const {
  return static_cast<int>(
      std::count(kind_.begin(), kind_.end(), VarKind::Binary));
}

double LinearProgram::eval_objective(std::span<const double> x) const {
  double acc = obj_constant_;
  for (int j = 0; j < num_vars(); ++j) acc += obj_[j] * x[j];
  return acc;
}

double LinearProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (int j = 0; j < num_vars(); ++j) {
    worst = std::max(worst, lower_[j] - x[j]);
    worst = std::max(worst, x[j] - upper_[j]);
  }
  for (int i = 0; i < num_rows(); ++i) {
    const auto cols = row_cols(i);
    const auto coefs = row_coefs(i);
    double lhs = 0.0;
    for (std::size_t t = 0; t < cols.size(); ++t) lhs += coefs[t] * x[cols[t]];
    const double rhs = rows_[i].rhs;
    switch (rows_[i].sense) {
      case RowSense::LE: worst = std::max(worst, lhs - rhs); break;
      case RowSense::GE: worst = std::max(worst, rhs - lhs); break;
      case RowSense::EQ: worst = std::max(worst, std::abs(lhs - rhs)); break;
    }
  }
  return worst;
}

void LinearProgram::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& name : var_names_) {
    if (!seen.insert(name).second)
      throw Error(ErrorCode::NameCollision, "duplicate variable " + name);
  }
  seen.clear();
  for (const auto& name : row_names_) {
    if (!seen.insert(name).second)
      throw Error(ErrorCode::NameCollision, "duplicate row " + name);
  }
  for (int j = 0; j < num_vars(); ++j) {
    if (lower_[j] > upper_[j])
      throw Error(ErrorCode::BadConfig,
                  "variable " + var_names_[j] + " has lower > upper");
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || std::isnan(obj_[j]))
      throw Error(ErrorCode::BadConfig,
                  "variable " + var_names_[j] + " has NaN data");
    if (kind_[j] == VarKind::Binary &&
        (lower_[j] < -1e-12 || upper_[j] > 1.0 + 1e-12))
      throw Error(ErrorCode::BadConfig,
                  "binary variable " + var_names_[j] + " has bounds outside [0,1]");
  }
  for (int i = 0; i < num_rows(); ++i) {
    if (std::isnan(rows_[i].rhs))
      throw Error(ErrorCode::BadConfig, "row " + row_names_[i] + " has NaN rhs");
    for (int c : row_cols(i)) {
      if (c < 0 || c >= num_vars())
        throw Error(ErrorCode::BadConfig,
                    "row " + row_names_[i] + " references unknown column");
    }
    for (double v : row_coefs(i)) {
      if (std::isnan(v) || std::isinf(v))
        throw Error(ErrorCode::BadConfig,
                    "row " + row_names_[i] + " has non-finite coefficient");
    }
  }
}

}  // namespace vsr
