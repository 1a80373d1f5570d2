#include "mevr/prior.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <string>

#include "mevr/simplex.hpp"
#include "mevr/types.hpp"

namespace mevr {
namespace {

constexpr int kMaxPriorPlayers = 64;
constexpr double kObjectiveSlack = 1e-9;

// Coefficient rows of the Sybil constraints, written as row·W ≤ 0.
std::vector<std::vector<double>> sybil_rows(const PriorModel& prior) {
  const int n_max = prior.max_players();
  std::vector<std::vector<double>> rows;
  for (int y = 2; y <= prior.y_max(); ++y) {
    std::vector<double> row(n_max, 0.0);
    bool touches = false;
    for (int n = 1; n <= n_max; ++n) {
      const double p = prior.mass(n);
      if (p == 0.0) continue;
      row[n - 1] -= p / n;
      const int target = y + n - 1;
      if (target <= n_max) {
        row[target - 1] += p * y / static_cast<double>(target);
        touches = true;
      }
    }
    // With no deviation target inside the support the constraint reads −Σ p W/n ≤ 0.
    if (touches) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

PriorModel PriorModel::make(std::vector<double> masses, std::optional<int> y_max) {
  if (masses.empty()) throw ValidationError("prior: no probability mass given");
  if (static_cast<int>(masses.size()) > kMaxPriorPlayers) {
    throw ValidationError("prior: support exceeds " + std::to_string(kMaxPriorPlayers) +
                          " players");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    if (!std::isfinite(masses[k]) || masses[k] < 0.0) {
      throw ValidationError("prior: p_" + std::to_string(k + 1) + " must be finite and >= 0");
    }
    sum += masses[k];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("prior: masses sum to " + std::to_string(sum) + ", expected 1");
  }
  while (masses.size() > 1 && masses.back() == 0.0) masses.pop_back();

  PriorModel out;
  out.y_max_ = y_max.value_or(2 * static_cast<int>(masses.size()));
  if (out.y_max_ < 2) throw ValidationError("prior: y_max must be at least 2");
  out.masses_ = std::move(masses);
  return out;
}

PriorModel PriorModel::point_mass(int n, std::optional<int> y_max) {
  if (n < 1 || n > kMaxPriorPlayers) throw ValidationError("prior: point mass outside 1..64");
  std::vector<double> masses(n, 0.0);
  masses[n - 1] = 1.0;
  return make(std::move(masses), y_max);
}

double PriorModel::mass(int n) const {
  return n >= 1 && n <= max_players() ? masses_[n - 1] : 0.0;
}

double RebatePolicy::share(int n) const {
  return n >= 1 && n <= static_cast<int>(welfare.size()) ? welfare[n - 1] : 0.0;
}

double min_sybil_slack(const PriorModel& prior, const std::vector<double>& welfare) {
  const auto w = [&](int n) {
    return n >= 1 && n <= static_cast<int>(welfare.size()) ? welfare[n - 1] : 0.0;
  };
  double slack = std::numeric_limits<double>::infinity();
  for (int y = 2; y <= prior.y_max(); ++y) {
    double s = 0.0;
    for (int n = 1; n <= prior.max_players(); ++n) {
      const int target = y + n - 1;
      s += (w(n) / n - w(target) * y / static_cast<double>(target)) * prior.mass(n);
    }
    slack = std::min(slack, s);
  }
  return slack;
}

bool feasible(const PriorModel& prior, const std::vector<double>& welfare, double tol) {
  for (double w : welfare) {
    if (w < -tol || w > 1.0 + tol) return false;
  }
  return min_sybil_slack(prior, welfare) >= -tol;
}

RebatePolicy solve_prior_optimal(const PriorModel& prior) {
  const int n_max = prior.max_players();
  std::vector<int> support;
  for (int n = 1; n <= n_max; ++n) {
    if (prior.mass(n) > 0.0) support.push_back(n);
  }

  lp::LinearProgram base;
  base.objective.assign(n_max, 0.0);
  for (auto& row : sybil_rows(prior)) base.add_row(std::move(row), 0.0);
  for (int n = 1; n <= n_max; ++n) {
    std::vector<double> bound(n_max, 0.0);
    bound[n - 1] = 1.0;
    base.add_row(std::move(bound), prior.mass(n) > 0.0 ? 1.0 : 0.0);
  }

  lp::LinearProgram welfare_lp = base;
  for (int n : support) welfare_lp.objective[n - 1] = prior.mass(n);
  const lp::LpSolution first = lp::solve(welfare_lp);
  if (first.status != lp::LpStatus::kOptimal) {
    throw InternalError("prior LP: welfare program not optimal although W = 0 is feasible");
  }
  const double best = first.objective;

  // Lexicographic tie-break: keep the welfare at its optimum and push each
  // W_n up in turn, freezing it before moving on.
  lp::LinearProgram tie = base;
  std::vector<double> floor_row(n_max, 0.0);
  for (int n : support) floor_row[n - 1] = -prior.mass(n);
  tie.add_row(floor_row, -(best - kObjectiveSlack));

  std::vector<double> w = first.x;
  for (int n : support) {
    tie.objective.assign(n_max, 0.0);
    tie.objective[n - 1] = 1.0;
    const lp::LpSolution step = lp::solve(tie);
    if (step.status != lp::LpStatus::kOptimal) {
      throw InternalError("prior LP: tie-break program not optimal");
    }
    w = step.x;
    std::vector<double> pin(n_max, 0.0);
    pin[n - 1] = -1.0;
    tie.add_row(std::move(pin), -(step.objective - kObjectiveSlack));
  }

  RebatePolicy policy;
  policy.welfare.resize(n_max);
  for (int n = 1; n <= n_max; ++n) {
    policy.welfare[n - 1] = std::clamp(w[n - 1], 0.0, 1.0);
    policy.expected_welfare += policy.welfare[n - 1] * prior.mass(n);
  }
  if (!feasible(prior, policy.welfare)) {
    throw InternalError("prior LP: solver returned an infeasible policy");
  }
  return policy;
}

double prior_free_bound(int n) {
  if (n < 1) throw ValidationError("prior_free_bound: n must be at least 1");
  return n / std::ldexp(1.0, n - 1);
}

double prior_free_welfare(const PriorModel& prior) {
  double total = 0.0;
  for (int n = 1; n <= prior.max_players(); ++n) total += prior.mass(n) * prior_free_bound(n);
  return total;
}

std::vector<SweepRow> sweep_priors(const std::vector<int>& support, double step,
                                   std::optional<int> y_max) {
  if (support.empty()) throw ValidationError("prior sweep: empty support");
  for (int n : support) {
    if (n < 1 || n > kMaxPriorPlayers) throw ValidationError("prior sweep: support outside 1..64");
  }
  if (!(step > 0.0) || step > 1.0) throw ValidationError("prior sweep: step must lie in (0, 1]");
  const double ticks_real = 1.0 / step;
  const int ticks = static_cast<int>(std::lround(ticks_real));
  if (std::abs(ticks_real - ticks) > 1e-6) {
    throw ValidationError("prior sweep: 1/step must be an integer");
  }
  const int n_max = *std::max_element(support.begin(), support.end());

  // Compositions of `ticks` into |support| parts, first coordinate outermost.
  std::vector<std::vector<int>> points;
  std::vector<int> current(support.size(), 0);
  const auto recurse = [&](auto&& self, std::size_t slot, int left) -> void {
    if (slot + 1 == support.size()) {
      current[slot] = left;
      points.push_back(current);
      return;
    }
    for (int t = 0; t <= left; ++t) {
      current[slot] = t;
      self(self, slot + 1, left - t);
    }
  };
  recurse(recurse, 0, ticks);

  std::vector<SweepRow> rows(points.size());
  std::exception_ptr failure;
  const auto count = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long r = 0; r < count; ++r) {
    try {
      std::vector<double> masses(n_max, 0.0);
      SweepRow row;
      for (std::size_t k = 0; k < support.size(); ++k) {
        const double p = static_cast<double>(points[r][k]) / ticks;
        row.p.push_back(p);
        masses[support[k] - 1] += p;
      }
      const PriorModel prior = PriorModel::make(std::move(masses), y_max);
      row.optimal_welfare = solve_prior_optimal(prior).expected_welfare;
      row.prior_free_welfare = prior_free_welfare(prior);
      rows[r] = std::move(row);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace mevr
