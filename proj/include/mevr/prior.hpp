#pragma once

#include <optional>
#include <vector>

namespace mevr {

/// Distribution of the reported player count, conditioned on at least one player.
class PriorModel {
 public:
  /// masses[k] is Pr[n = k + 1]. y_max defaults to 2·N_max.
  static PriorModel make(std::vector<double> masses, std::optional<int> y_max = std::nullopt);
  /// Point mass at n.
  static PriorModel point_mass(int n, std::optional<int> y_max = std::nullopt);

  int max_players() const { return static_cast<int>(masses_.size()); }
  int y_max() const { return y_max_; }
  /// Pr[n]; zero outside 1..N_max.
  double mass(int n) const;
  const std::vector<double>& masses() const { return masses_; }

 private:
  std::vector<double> masses_;
  int y_max_ = 2;
};

struct RebatePolicy {
  /// welfare[k] is W_{k+1}, the share of R paid out in total when k + 1 identities report.
  std::vector<double> welfare;
  double expected_welfare = 0.0;

  double share(int n) const;
  /// X_n = W_n / n.
  double per_identity(int n) const { return share(n) / n; }
};

/// Smallest slack over the ex-ante Sybil constraints y = 2..Y_max. Indices
/// beyond N_max read as 0.
double min_sybil_slack(const PriorModel& prior, const std::vector<double>& welfare);

/// True when 0 ≤ W ≤ 1 and every Sybil constraint holds to `tol`.
bool feasible(const PriorModel& prior, const std::vector<double>& welfare, double tol = 1e-8);

/// Welfare-maximizing symmetric Sybil-proof policy. W_n is held at 0 where
/// p_n = 0, and ties among optimal vertices go to the lexicographically
/// largest W.
RebatePolicy solve_prior_optimal(const PriorModel& prior);

/// n / 2^{n−1}.
double prior_free_bound(int n);

/// Σ_n p_n · n / 2^{n−1}.
double prior_free_welfare(const PriorModel& prior);

struct SweepRow {
  /// Probability on each support point, in the order the support was given.
  std::vector<double> p;
  double optimal_welfare = 0.0;
  double prior_free_welfare = 0.0;
};

/// Every point of the simplex over `support` whose coordinates are multiples
/// of `step`; 1/step must be (close to) an integer.
std::vector<SweepRow> sweep_priors(const std::vector<int>& support, double step,
                                   std::optional<int> y_max = std::nullopt);

}  // namespace mevr
