// Independent reference implementations used only by tests: a dense
// Gaussian-elimination solver, a dense Big-M tableau simplex with Bland's
// rule, and exhaustive binary enumeration for small mixed-integer models.
// These share no code with the library under test.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

// Uniform in [0,1) derived from raw engine words so results do not depend on
// the standard library's distribution implementation.
inline double rnd01(std::mt19937& gen) {
  return static_cast<double>(gen() >> 5) / 134217728.0;  // 2^27
}

inline double rnd(std::mt19937& gen, double lo, double hi) {
  return lo + (hi - lo) * rnd01(gen);
}

// Solve Ax = b by dense elimination with partial pivoting.
inline std::optional<std::vector<double>> dense_solve(
    std::vector<std::vector<double>> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  std::vector<int> perm(n);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    if (std::abs(a[piv][k]) < 1e-12) return std::nullopt;
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (int i = k + 1; i < n; ++i) {
      const double m = a[i][k] / a[k][k];
      if (m == 0.0) continue;
      for (int j = k; j < n; ++j) a[i][j] -= m * a[k][j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (int k = n - 1; k >= 0; --k) {
    double acc = b[k];
    for (int j = k + 1; j < n; ++j) acc -= a[k][j] * x[j];
    x[k] = acc / a[k][k];
  }
  return x;
}

enum class LpStatus { Optimal, Infeasible, Stuck };

struct LpResult {
  LpStatus status = LpStatus::Stuck;
  double objective = 0.0;
  std::vector<double> x;
};

// A linear program in the restricted shape the oracle understands:
// min c.x subject to A x (sense) b, 0 <= x <= upper, all uppers finite.
// sense: 'L' <=, 'G' >=, 'E' =.
struct BoxLp {
  int n = 0;
  std::vector<std::vector<double>> a;
  std::vector<char> sense;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> upper;
};

// Dense Big-M tableau simplex with Bland's rule. All structural variables
// are bounded, so the model is never unbounded; a basic artificial at a
// positive level at optimality signals infeasibility.
inline LpResult oracle_lp(const BoxLp& in) {
  const int n = in.n;
  const int m0 = static_cast<int>(in.b.size());
  const int m = m0 + n;  // upper bounds become explicit rows

  std::vector<std::vector<double>> rows(m, std::vector<double>(n));
  std::vector<double> rhs(m);
  std::vector<char> sense(m);
  for (int i = 0; i < m0; ++i) {
    rows[i] = in.a[i];
    rhs[i] = in.b[i];
    sense[i] = in.sense[i];
  }
  for (int j = 0; j < n; ++j) {
    rows[m0 + j][j] = 1.0;
    rhs[m0 + j] = in.upper[j];
    sense[m0 + j] = 'L';
  }
  for (int i = 0; i < m; ++i) {
    if (rhs[i] < 0.0) {
      for (double& v : rows[i]) v = -v;
      rhs[i] = -rhs[i];
      if (sense[i] == 'L') sense[i] = 'G';
      else if (sense[i] == 'G') sense[i] = 'L';
    }
  }

  int slack_count = 0, art_count = 0;
  for (int i = 0; i < m; ++i) {
    if (sense[i] == 'L' || sense[i] == 'G') ++slack_count;
    if (sense[i] == 'G' || sense[i] == 'E') ++art_count;
  }
  const int total = n + slack_count + art_count;
  double cmax = 1.0;
  for (double v : in.c) cmax = std::max(cmax, std::abs(v));
  const double big_m = 1e6 * cmax;

  // tableau[i] holds the row coefficients plus rhs in the last slot
  std::vector<std::vector<double>> t(m, std::vector<double>(total + 1, 0.0));
  std::vector<double> cost(total, 0.0);
  std::vector<int> basis(m, -1);
  std::vector<bool> artificial(total, false);
  for (int j = 0; j < n; ++j) cost[j] = in.c[j];

  int next = n;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t[i][j] = rows[i][j];
    t[i][total] = rhs[i];
    if (sense[i] == 'L') {
      t[i][next] = 1.0;
      basis[i] = next++;
    } else if (sense[i] == 'G') {
      t[i][next] = -1.0;
      ++next;
      t[i][next] = 1.0;
      cost[next] = big_m;
      artificial[next] = true;
      basis[i] = next++;
    } else {
      t[i][next] = 1.0;
      cost[next] = big_m;
      artificial[next] = true;
      basis[i] = next++;
    }
  }

  // Price out the basic costs to form the reduced cost row.
  std::vector<double> red(total + 1, 0.0);
  for (int j = 0; j < total; ++j) red[j] = cost[j];
  for (int i = 0; i < m; ++i) {
    const double cb = cost[basis[i]];
    if (cb == 0.0) continue;
    for (int j = 0; j <= total; ++j) red[j] -= cb * t[i][j];
  }

  for (int iter = 0; iter < 200000; ++iter) {
    int enter = -1;
    for (int j = 0; j < total; ++j) {
      if (red[j] < -1e-9) {
        enter = j;
        break;  // Bland: smallest index
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t[i][enter] > 1e-9) {
        const double ratio = t[i][total] / t[i][enter];
        if (leave < 0 || ratio < best - 1e-12 ||
            (ratio < best + 1e-12 && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
    }
    if (leave < 0) return {LpStatus::Stuck, 0.0, {}};  // cannot happen boxed
    const double piv = t[leave][enter];
    for (int j = 0; j <= total; ++j) t[leave][j] /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      const double f = t[i][enter];
      for (int j = 0; j <= total; ++j) t[i][j] -= f * t[leave][j];
    }
    const double f = red[enter];
    if (f != 0.0)
      for (int j = 0; j <= total; ++j) red[j] -= f * t[leave][j];
    basis[leave] = enter;
  }

  for (int i = 0; i < m; ++i)
    if (artificial[basis[i]] && t[i][total] > 1e-6)
      return {LpStatus::Infeasible, 0.0, {}};

  LpResult out;
  out.status = LpStatus::Optimal;
  out.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) out.x[basis[i]] = t[i][total];
  out.objective = 0.0;
  for (int j = 0; j < n; ++j) out.objective += in.c[j] * out.x[j];
  return out;
}

// Exhaustive optimum of a BoxLp where the listed variables are binary.
inline LpResult oracle_milp(const BoxLp& in, const std::vector<int>& binaries) {
  LpResult best;
  best.status = LpStatus::Infeasible;
  const int k = static_cast<int>(binaries.size());
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    BoxLp fixed = in;
    for (int t = 0; t < k; ++t) {
      const double v = (mask >> t) & 1u ? 1.0 : 0.0;
      // pin with an equality row
      std::vector<double> row(fixed.n, 0.0);
      row[binaries[t]] = 1.0;
      fixed.a.push_back(row);
      fixed.sense.push_back('E');
      fixed.b.push_back(v);
    }
    const LpResult r = oracle_lp(fixed);
    if (r.status == LpStatus::Optimal &&
        (best.status != LpStatus::Optimal || r.objective < best.objective)) {
      best = r;
    }
  }
  return best;
}

}  // namespace oracle
