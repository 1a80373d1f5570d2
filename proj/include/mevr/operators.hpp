#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mevr/game.hpp"
#include "mevr/sybil.hpp"

namespace mevr {

enum class OperatorId { kShapley, kBanzhaf, kTheta, kPsi, kPsiBar, kBanzhafClamped };

std::string_view to_string(OperatorId op);
OperatorId parse_operator(std::string_view name);
/// Every operator that maps a game to payments, in declaration order.
std::span<const OperatorId> all_operators();

/// Budget for the Sybil-extension search behind ψ.
struct PsiSearch {
  /// Largest number of identities added by a copy/split chain.
  int k_max = 6;
  /// Aitken-extrapolate pure copy and pure split payoff sequences that are
  /// still increasing at the end of the search.
  bool extrapolate = true;
  /// Return the exact value on scaled unanimity games.
  bool exact_unanimity = true;
};

struct OperatorConfig {
  PsiSearch psi;
};

struct PlayerBounds {
  double lower = 0.0;
  double upper = 0.0;
};

struct OperatorReport {
  OperatorId op = OperatorId::kShapley;
  RebateVector payments;
  double welfare = 0.0;
  /// Present for operators computed by search (ψ, ψ̄).
  std::optional<std::vector<PlayerBounds>> bounds;
};

RebateVector shapley(const Game& g);
/// Average marginal contribution over all n! arrival orders (n ≤ 9).
RebateVector shapley_permutation_oracle(const Game& g);
RebateVector banzhaf(const Game& g);
/// 2^{1−n} Σ_S (2|S| − n) v(S), the Banzhaf welfare without per-player sums.
double banzhaf_welfare_formula(const Game& g);
/// Banzhaf scaled down uniformly until it runs no deficit.
RebateVector banzhaf_clamped(const Game& g);
/// θ_i = min_{S⊆N\{i}} [v(S∪{i}) − v(S)], the minimal marginal contribution.
RebateVector theta(const Game& g);

/// ψ_i = 2^{1−n} · sup over Sybil extensions of the Shapley payoff to i's
/// identities. Payments are the best lower bound found; bounds carry the
/// certified upper bound v(N)/2^{n−1}.
OperatorReport psi(const Game& g, const PsiSearch& search = {});

/// ψ̄_i = max(ψ_i, θ_i) / (1 + n/2^{n−1}).
OperatorReport psi_bar(const Game& g, const PsiSearch& search = {});

/// p_i = s_i · total. Shares must lie on the simplex.
RebateVector pro_rata(std::span<const double> shares, double total);

RebateVector evaluate(OperatorId op, const Game& g, const OperatorConfig& config = {});
OperatorReport report(OperatorId op, const Game& g, const OperatorConfig& config = {});

enum class AttackFamily { kCopy, kSplit, kMixed };
std::string_view to_string(AttackFamily family);
AttackFamily parse_attack_family(std::string_view name);

struct SybilAttackReport {
  OperatorId op = OperatorId::kShapley;
  int player = 0;
  AttackFamily family = AttackFamily::kCopy;
  /// payoffs[k]: best aggregated payoff with k added identities; payoffs[0]
  /// is the honest payment.
  std::vector<double> payoffs;
  /// Chain realizing payoffs[k] (empty for k = 0).
  std::vector<std::vector<SybilStep>> chains;
  int best_k = 0;
  double best_payoff = 0.0;
  /// Payoff still strictly increasing at k_max: the supremum lies beyond the search.
  bool divergent = false;

  bool profitable() const { return best_k > 0; }
};

SybilAttackReport optimal_sybil_strategy(const Game& g, int player, OperatorId op,
                                         AttackFamily family, int k_max,
                                         const OperatorConfig& config = {});

/// Visits every Sybil chain on `player` adding at most k_max identities.
/// Consecutive steps of the same family collapse into one (copy∘copy is a
/// copy, split∘split is a split), so chains alternate families. With
/// mixed = false only single-step chains are visited.
template <typename Visitor>
void for_each_sybil_chain(const Game& g, int player, int k_max, bool mixed, Visitor&& visit);

}  // namespace mevr

#include "mevr/detail/sybil_chains.hpp"
