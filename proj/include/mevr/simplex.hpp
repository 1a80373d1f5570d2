#pragma once

#include <vector>

namespace mevr::lp {

/// maximize objective·x  subject to  rows·x ≤ rhs,  x ≥ 0.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;

  void add_row(std::vector<double> row, double bound) {
    rows.push_back(std::move(row));
    rhs.push_back(bound);
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  int pivots = 0;
};

/// Dense two-phase tableau simplex with Bland's rule, so it terminates on
/// degenerate problems. Sized for LPs of a few hundred rows and columns.
LpSolution solve(const LinearProgram& program);

}  // namespace mevr::lp
