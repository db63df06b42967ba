#pragma once

#include <span>
#include <utility>
#include <vector>

namespace vsr {

// Sparse LU factorization with Markowitz pivoting and threshold partial
// pivoting, for the square basis matrices arising in the simplex engine and
// for the reduced susceptance systems used by screening. Deterministic:
// identical input produces identical factors.
class SparseLU {
 public:
  // Matrix given column-wise: cols[j] lists (row, value) with unique rows.
  // Returns false when the matrix is numerically singular.
  bool factorize(int n,
                 const std::vector<std::vector<std::pair<int, double>>>& cols);

  // Solve A x = b in place.
  void ftran(std::span<double> b) const;
  // Solve A^T y = c in place.
  void btran(std::span<double> c) const;

  int dim() const { return n_; }
  bool ok() const { return ok_; }

 private:
  struct Entry {
    int index;
    double value;
  };

  int n_ = 0;
  bool ok_ = false;

  // Elimination step k pivots at (prow_[k], pcol_[k]) with value pval_[k].
  std::vector<int> prow_, pcol_;
  std::vector<double> pval_;
  // L multipliers per step: row r received row_prow[k] * -mult.
  std::vector<std::vector<Entry>> lcols_;  // Entry.index = row, value = mult
  // U off-pivot entries per step: row prow_[k], columns eliminated later.
  std::vector<std::vector<Entry>> urows_;  // Entry.index = step of column
  // U entries regrouped by column step for transpose solves.
  std::vector<std::vector<Entry>> ucols_;  // Entry.index = step of row
  // L multipliers regrouped by affected row for transpose solves.
  std::vector<std::vector<Entry>> lrows_;  // built lazily in finalize
  std::vector<int> row_to_step_;           // prow -> k
};

}  // namespace vsr
