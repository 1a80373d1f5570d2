#include "mevr/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include "mevr/types.hpp"

namespace mevr::lp {
namespace {

constexpr double kPivotEps = 1e-10;
constexpr double kCostEps = 1e-10;
constexpr int kMaxPivots = 100000;

class Tableau {
 public:
  explicit Tableau(const LinearProgram& p)
      : m_(p.rows.size()), n_(p.objective.size()) {
    for (const auto& row : p.rows) {
      if (row.size() != n_) throw ValidationError("lp: row width differs from objective length");
    }
    if (p.rhs.size() != m_) throw ValidationError("lp: rhs length differs from row count");
    for (double b : p.rhs) artificial_count_ += b < 0.0 ? 1 : 0;
    cols_ = n_ + m_ + artificial_count_;
    cells_.assign((m_ + 1) * (cols_ + 1), 0.0);
    basis_.assign(m_, 0);

    std::size_t next_artificial = n_ + m_;
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = p.rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign * p.rows[i][j];
      at(i, n_ + i) = sign;
      rhs(i) = sign * p.rhs[i];
      if (p.rhs[i] < 0.0) {
        at(i, next_artificial) = 1.0;
        basis_[i] = next_artificial++;
      } else {
        basis_[i] = n_ + i;
      }
    }
  }

  LpSolution run(const std::vector<double>& objective) {
    LpSolution out;
    if (artificial_count_ > 0) {
      std::vector<double> phase1(cols_, 0.0);
      for (std::size_t j = n_ + m_; j < cols_; ++j) phase1[j] = -1.0;
      set_objective(phase1);
      if (!optimize(cols_, out.pivots)) throw InternalError("lp: phase one unbounded");
      if (-value() > 1e-8) {
        out.status = LpStatus::kInfeasible;
        return out;
      }
      drive_out_artificials(out.pivots);
    }
    std::vector<double> phase2(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) phase2[j] = objective[j];
    set_objective(phase2);
    if (!optimize(n_ + m_, out.pivots)) {
      out.status = LpStatus::kUnbounded;
      return out;
    }
    out.status = LpStatus::kOptimal;
    out.objective = value();
    out.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) out.x[basis_[i]] = rhs(i);
    }
    return out;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return cells_[i * (cols_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, cols_); }
  double& cost(std::size_t j) { return at(m_, j); }
  // The objective row stores reduced costs and −z in its rhs cell.
  double value() { return -rhs(m_); }

  void set_objective(const std::vector<double>& c) {
    for (std::size_t j = 0; j <= cols_; ++j) at(m_, j) = j < cols_ ? c[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(m_, j) -= cb * at(i, j);
    }
  }

  void pivot(std::size_t r, std::size_t e) {
    const double inv = 1.0 / at(r, e);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) *= inv;
    at(r, e) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, e);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
      at(i, e) = 0.0;
    }
    basis_[r] = e;
  }

  // Bland's rule over columns [0, allowed). Returns false when unbounded.
  bool optimize(std::size_t allowed, int& pivots) {
    for (;;) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (cost(j) > kCostEps) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return true;

      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotEps) continue;
        const double ratio = rhs(i) / a;
        if (ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 && basis_[i] < basis_[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
      if (++pivots > kMaxPivots) throw InternalError("lp: pivot limit exceeded");
    }
  }

  void drive_out_artificials(int& pivots) {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_ + m_) continue;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (std::abs(at(i, j)) > kPivotEps) {
          pivot(i, j);
          ++pivots;
          break;
        }
      }
      // A row with no usable column is redundant; its artificial stays basic at zero.
    }
  }

  std::size_t m_;
  std::size_t n_;
  std::size_t artificial_count_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> cells_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution solve(const LinearProgram& program) {
  Tableau tableau(program);
  return tableau.run(program.objective);
}

}  // namespace mevr::lp
