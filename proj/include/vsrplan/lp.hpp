#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vsr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind : std::uint8_t { Continuous, Binary };
enum class RowSense : std::uint8_t { LE, EQ, GE };

enum class SolveStatus : std::uint8_t { Optimal, Infeasible, Unbounded, IterLimit };

const char* to_string(SolveStatus status);

// Solver-agnostic minimization model. Rows are single-sided; two-sided
// restrictions are expressed as row pairs. Coefficients are stored row-wise
// (CSR) in insertion order, which also fixes MPS emission order.
class LinearProgram {
 public:
  struct RowInfo {
    RowSense sense;
    double rhs;
  };

  int add_var(std::string name, double lower, double upper,
              VarKind kind = VarKind::Continuous, double obj = 0.0);

  int add_row(std::string name, RowSense sense, double rhs,
              std::span<const std::pair<int, double>> entries);
  int add_row(std::string name, RowSense sense, double rhs,
              std::initializer_list<std::pair<int, double>> entries) {
    return add_row(std::move(name), sense, rhs,
                   std::span<const std::pair<int, double>>(entries.begin(),
                                                           entries.size()));
  }

  void set_obj(int var, double coef) { obj_[var] = coef; }
  void add_obj(int var, double coef) { obj_[var] += coef; }
  void set_obj_constant(double value) { obj_constant_ = value; }

  int num_vars() const { return static_cast<int>(lower_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  std::int64_t num_nonzeros() const { return static_cast<std::int64_t>(coef_.size()); }

  const std::string& var_name(int j) const { return var_names_[j]; }
  const std::string& row_name(int i) const { return row_names_[i]; }
  double lower(int j) const { return lower_[j]; }
  double upper(int j) const { return upper_[j]; }
  VarKind kind(int j) const { return kind_[j]; }
  double obj(int j) const { return obj_[j]; }
  double obj_constant() const { return obj_constant_; }
  const RowInfo& row(int i) const { return rows_[i]; }

  void set_bounds(int var, double lower, double upper) {
    lower_[var] = lower;
    upper_[var] = upper;
  }
  void set_kind(int var, VarKind kind) { kind_[var] = kind; }
  void set_rhs(int row, double rhs) { rows_[row].rhs = rhs; }

  // Row entries for row i: spans over [row_start(i), row_start(i+1)).
  std::span<const int> row_cols(int i) const;
  std::span<const double> row_coefs(int i) const;

  bool has_integrality() const;
  int num_binaries() const;

  // Objective value of a primal point (includes the constant term).
  double eval_objective(std::span<const double> x) const;

  // Largest bound / row violation of a primal point.
  double max_violation(std::span<const double> x) const;

  void validate() const;  // invariant check, throws Error on violation

 private:
  std::vector<std::string> var_names_;
  std::vector<double> lower_, upper_, obj_;
  std::vector<VarKind> kind_;
  double obj_constant_ = 0.0;

  std::vector<std::string> row_names_;
  std::vector<RowInfo> rows_;
  std::vector<std::size_t> row_start_{0};
  std::vector<int> cols_;
  std::vector<double> coef_;
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  double dual_objective = 0.0;  // LP only; equals objective at optimality
  double mip_gap = 0.0;         // MILP only
  std::int64_t iterations = 0;  // simplex pivots or B&B nodes
  std::vector<double> primal;   // per variable
  std::vector<double> duals;    // per row (LP solves only)
  std::vector<double> reduced_costs;  // per variable (LP solves only)

  bool optimal() const { return status == SolveStatus::Optimal; }
};

}  // namespace vsr
