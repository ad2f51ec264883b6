#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "crscore/errors.hpp"

namespace crscore {

/// sum_i coeffs[i] * x_i  (<= | >=)  rhs, with x >= 0.
struct LinearConstraint {
  enum class Sense { LessEq, GreaterEq };
  std::vector<double> coeffs;
  double rhs;
  Sense sense;
};

/// Phase-1 dense simplex: finds x >= 0 satisfying all constraints, or
/// nullopt if the system is infeasible. Bland's rule, so it always terminates.
/// Intended for tiny systems (a handful of variables and constraints).
inline std::optional<std::vector<double>> solve_feasibility(int num_vars,
                                                            const std::vector<LinearConstraint>& constraints) {
  const int m = static_cast<int>(constraints.size());
  const int n = num_vars;
  if (m == 0) return std::vector<double>(n, 0.0);

  // Standard form: A x + slack = b with b >= 0, one artificial per row that
  // starts basic. Columns: [x (n)] [slack/surplus (m)] [artificial (m)].
  const int cols = n + 2 * m;
  std::vector<std::vector<double>> a(m, std::vector<double>(cols, 0.0));
  std::vector<double> b(m);
  std::vector<int> basis(m);

  for (int i = 0; i < m; ++i) {
    const auto& c = constraints[i];
    if (static_cast<int>(c.coeffs.size()) != n) throw DimensionMismatch("constraint width mismatch");
    double sign = 1.0;
    double rhs = c.rhs;
    double slack = (c.sense == LinearConstraint::Sense::LessEq) ? 1.0 : -1.0;
    if (rhs < 0.0) {
      sign = -1.0;
      rhs = -rhs;
      slack = -slack;
    }
    for (int j = 0; j < n; ++j) a[i][j] = sign * c.coeffs[j];
    a[i][n + i] = slack;
    a[i][n + m + i] = 1.0;
    b[i] = rhs;
    basis[i] = n + m + i;
  }

  // Phase-1 objective: minimize sum of artificials. Reduced costs start as
  // the negated column sums over rows (artificials are basic with cost 1).
  std::vector<double> reduced(cols, 0.0);
  double objective = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < cols; ++j) reduced[j] -= a[i][j];
    objective -= b[i];
  }
  for (int i = 0; i < m; ++i) reduced[n + m + i] += 1.0;  // cost of artificials

  const double eps = 1e-10;
  while (true) {
    int pivot_col = -1;
    for (int j = 0; j < cols; ++j) {
      if (reduced[j] < -eps) {
        pivot_col = j;  // Bland: first improving column
        break;
      }
    }
    if (pivot_col < 0) break;

    int pivot_row = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (a[i][pivot_col] > eps) {
        double ratio = b[i] / a[i][pivot_col];
        if (pivot_row < 0 || ratio < best_ratio - eps ||
            (std::abs(ratio - best_ratio) <= eps && basis[i] < basis[pivot_row])) {
          pivot_row = i;
          best_ratio = ratio;
        }
      }
    }
    if (pivot_row < 0) break;  // unbounded phase-1 cannot happen, guard anyway

    const double piv = a[pivot_row][pivot_col];
    for (int j = 0; j < cols; ++j) a[pivot_row][j] /= piv;
    b[pivot_row] /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == pivot_row) continue;
      const double f = a[i][pivot_col];
      if (f == 0.0) continue;
      for (int j = 0; j < cols; ++j) a[i][j] -= f * a[pivot_row][j];
      b[i] -= f * b[pivot_row];
    }
    const double fr = reduced[pivot_col];
    for (int j = 0; j < cols; ++j) reduced[j] -= fr * a[pivot_row][j];
    objective -= fr * b[pivot_row];
    basis[pivot_row] = pivot_col;
  }

  if (objective < -1e-7) return std::nullopt;  // artificials cannot be driven to zero

  std::vector<double> x(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) x[basis[i]] = b[i];
  return x;
}

}  // namespace crscore
