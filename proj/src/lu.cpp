#include "vsrplan/lu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vsr {

namespace {
constexpr double kPivotThreshold = 0.1;   // threshold partial pivoting
constexpr double kSingularTol = 1e-11;    // relative to matrix scale
constexpr double kCancelTol = 1e-14;      // exact-cancellation detection
constexpr int kSearchCols = 8;            // bounded Markowitz search width
}  // namespace

bool SparseLU::factorize(
    int n, const std::vector<std::vector<std::pair<int, double>>>& cols) {
  n_ = n;
  ok_ = false;
  prow_.assign(n, -1);
  pcol_.assign(n, -1);
  pval_.assign(n, 0.0);
  lcols_.assign(n, {});
  urows_.assign(n, {});
  ucols_.assign(n, {});
  lrows_.assign(n, {});
  row_to_step_.assign(n, -1);
  if (n == 0) {
    ok_ = true;
    return true;
  }

  // Row-major working copy with sorted columns.
  std::vector<std::vector<Entry>> rows(n);
  std::vector<int> row_count(n, 0), col_count(n, 0);
  std::vector<std::vector<int>> colrows(n);
  double scale = 0.0;
  for (int j = 0; j < n; ++j) {
    for (const auto& [i, v] : cols[j]) {
      rows[i].push_back({j, v});
      scale = std::max(scale, std::abs(v));
    }
  }
  if (scale == 0.0) return false;
  for (int i = 0; i < n; ++i) {
    std::sort(rows[i].begin(), rows[i].end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    row_count[i] = static_cast<int>(rows[i].size());
    for (const auto& e : rows[i]) {
      colrows[e.index].push_back(i);
      ++col_count[e.index];
    }
  }

  std::vector<char> row_active(n, 1), col_active(n, 1);
  const double abs_tol = kSingularTol * scale;

  auto find_in_row = [&](int i, int j) -> const Entry* {
    const auto& r = rows[i];
    auto it = std::lower_bound(
        r.begin(), r.end(), j,
        [](const Entry& e, int col) { return e.index < col; });
    if (it != r.end() && it->index == j) return &*it;
    return nullptr;
  };

  // urows entries are recorded as (original column, value) during
  // elimination and remapped to steps afterwards.
  std::vector<Entry> merged;
  std::vector<int> active_cols_buf;

  for (int k = 0; k < n; ++k) {
    // Pick up to kSearchCols active columns with smallest count, then the
    // best Markowitz entry among them. Ties resolve to the smallest column
    // then row index so factorization is deterministic.
    active_cols_buf.clear();
    for (int j = 0; j < n; ++j)
      if (col_active[j] && col_count[j] > 0) active_cols_buf.push_back(j);
    if (active_cols_buf.empty()) return false;
    std::partial_sort(
        active_cols_buf.begin(),
        active_cols_buf.begin() +
            std::min<std::size_t>(kSearchCols, active_cols_buf.size()),
        active_cols_buf.end(), [&](int a, int b) {
          if (col_count[a] != col_count[b]) return col_count[a] < col_count[b];
          return a < b;
        });

    int best_row = -1, best_col = -1;
    long best_cost = std::numeric_limits<long>::max();
    double best_abs = 0.0;
    const int limit =
        static_cast<int>(std::min<std::size_t>(kSearchCols, active_cols_buf.size()));
    for (int s = 0; s < limit; ++s) {
      const int j = active_cols_buf[s];
      double colmax = 0.0;
      for (int i : colrows[j]) {
        if (!row_active[i]) continue;
        if (const Entry* e = find_in_row(i, j))
          colmax = std::max(colmax, std::abs(e->value));
      }
      if (colmax < abs_tol) continue;
      for (int i : colrows[j]) {
        if (!row_active[i]) continue;
        const Entry* e = find_in_row(i, j);
        if (!e || std::abs(e->value) < kPivotThreshold * colmax) continue;
        const long cost = static_cast<long>(row_count[i] - 1) *
                          static_cast<long>(col_count[j] - 1);
        if (cost < best_cost ||
            (cost == best_cost &&
             (j < best_col || (j == best_col && i < best_row)))) {
          best_cost = cost;
          best_row = i;
          best_col = j;
          best_abs = std::abs(e->value);
        }
      }
    }
    if (best_row < 0 || best_abs < abs_tol) return false;

    const int pr = best_row, pc = best_col;
    const double pv = find_in_row(pr, pc)->value;
    prow_[k] = pr;
    pcol_[k] = pc;
    pval_[k] = pv;
    row_to_step_[pr] = k;
    row_active[pr] = 0;
    col_active[pc] = 0;

    // Pivot row becomes a U row; remove its entries from column counts.
    for (const auto& e : rows[pr]) {
      if (e.index == pc) continue;
      urows_[k].push_back(e);  // index is still an original column here
      --col_count[e.index];
    }
    --col_count[pc];

    // Eliminate the pivot column from the remaining active rows.
    for (int i : colrows[pc]) {
      if (!row_active[i]) continue;
      const Entry* e = find_in_row(i, pc);
      if (!e) continue;
      const double mult = e->value / pv;
      lcols_[k].push_back({i, mult});

      // rows[i] <- rows[i] - mult * rows[pr], dropping column pc.
      merged.clear();
      const auto& a = rows[i];
      const auto& b = rows[pr];
      std::size_t ia = 0, ib = 0;
      while (ia < a.size() || ib < b.size()) {
        int ca = ia < a.size() ? a[ia].index : n;
        int cb = ib < b.size() ? b[ib].index : n;
        if (ca == pc) {
          ++ia;
          continue;
        }
        if (cb == pc) {
          ++ib;
          continue;
        }
        if (ca < cb) {
          merged.push_back(a[ia++]);
        } else if (cb < ca) {
          const double v = -mult * b[ib].value;
          merged.push_back({cb, v});
          ++col_count[cb];
          colrows[cb].push_back(i);
          ++ib;
        } else {
          const double v = a[ia].value - mult * b[ib].value;
          if (std::abs(v) <=
              kCancelTol * (std::abs(a[ia].value) +
                            std::abs(mult * b[ib].value))) {
            --col_count[ca];
          } else {
            merged.push_back({ca, v});
          }
          ++ia;
          ++ib;
        }
      }
      rows[i] = merged;
      row_count[i] = static_cast<int>(rows[i].size());
    }
    rows[pr].clear();
  }

  // Remap U entries from original columns to elimination steps.
  std::vector<int> col_to_step(n, -1);
  for (int k = 0; k < n; ++k) col_to_step[pcol_[k]] = k;
  for (int k = 0; k < n; ++k) {
    for (auto& e : urows_[k]) e.index = col_to_step[e.index];
    std::sort(urows_[k].begin(), urows_[k].end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
  }
  for (int k = 0; k < n; ++k)
    for (const auto& e : urows_[k]) ucols_[e.index].push_back({k, e.value});
  for (int k = 0; k < n; ++k)
    for (const auto& e : lcols_[k]) lrows_[e.index].push_back({k, e.value});

  ok_ = true;
  return true;
}

void SparseLU::ftran(std::span<double> b) const {
  // Forward elimination mirrors the recorded row operations.
  for (int k = 0; k < n_; ++k) {
    const double bp = b[prow_[k]];
    if (bp == 0.0) continue;
    for (const auto& e : lcols_[k]) b[e.index] -= e.value * bp;
  }
  // Back substitution over the permuted triangle.
  std::vector<double> x(n_, 0.0);
  for (int k = n_ - 1; k >= 0; --k) {
    double acc = b[prow_[k]];
    for (const auto& e : urows_[k]) acc -= e.value * x[e.index];
    x[k] = acc / pval_[k];
  }
  for (int k = 0; k < n_; ++k) b[pcol_[k]] = x[k];
}

void SparseLU::btran(std::span<double> c) const {
  // Solve U'^T z = c in step order.
  std::vector<double> z(n_, 0.0);
  for (int k = 0; k < n_; ++k) {
    double acc = c[pcol_[k]];
    for (const auto& e : ucols_[k]) acc -= e.value * z[e.index];
    z[k] = acc / pval_[k];
  }
  // y = M^T z, applying transposed eliminations in reverse.
  std::vector<double> y(n_, 0.0);
  for (int k = 0; k < n_; ++k) y[prow_[k]] = z[k];
  for (int k = n_ - 1; k >= 0; --k) {
    double acc = y[prow_[k]];
    for (const auto& e : lcols_[k]) acc -= e.value * y[e.index];
    y[prow_[k]] = acc;
  }
  std::copy(y.begin(), y.end(), c.begin());
}

}  // namespace vsr
