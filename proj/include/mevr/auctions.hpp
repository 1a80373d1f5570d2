#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mevr/game.hpp"
#include "mevr/operators.hpp"

namespace mevr {

/// A downward-closed family F of bundle sets that may be allocated together.
class FeasibleFamily {
 public:
  FeasibleFamily() = default;
  /// Every set containing no conflicting pair. Pairs are 0-based.
  static FeasibleFamily from_conflicts(int n, std::span<const std::pair<int, int>> conflicts);
  /// Every subset of some listed maximal set.
  static FeasibleFamily from_maximal_sets(int n, std::span<const Coalition> maximal);
  static FeasibleFamily unrestricted(int n);

  int size() const { return n_; }
  bool contains(Coalition s) const;
  bool is_unrestricted() const;
  /// All feasible sets in ascending mask order.
  const std::vector<Coalition>& sets() const { return sets_; }
  /// Exhaustive downward-closure check over sets(); used by tests.
  bool downward_closed() const;

 private:
  void materialize();

  int n_ = 0;
  std::vector<Coalition> conflict_mask_;
  std::optional<std::vector<Coalition>> maximal_;
  std::vector<Coalition> sets_;
};

struct AuctionInstance {
  std::vector<double> bids;
  /// MEV function v over bundles.
  Game oracle;
  FeasibleFamily family;
  std::uint64_t seed = 42;

  int size() const { return static_cast<int>(bids.size()); }
  void validate(bool allow_negative_bids = false) const;
};

enum class Mechanism { kMyerson, kMevMax, kPayYourBid };

std::string_view to_string(Mechanism m);
Mechanism parse_mechanism(std::string_view name);

enum class ThresholdRule {
  /// max(0, B − A): the infimum over non-negative bids.
  kClamped,
  /// B − A, allowing rebates when the bundle wins even at bid 0.
  kSigned,
};

struct AuctionOptions {
  ThresholdRule rule = ThresholdRule::kClamped;
  bool allow_negative_bids = false;
};

struct Outcome {
  Coalition allocation = 0;
  /// Per bundle; negative means a rebate to the user.
  std::vector<double> payments;
  /// Net transfer from users to the builder, Σ p_i.
  double builder_payment = 0.0;
  /// Σ_{i∈S*} (b_i − p_i) with bids read as true values.
  double welfare = 0.0;
  /// v(S*) + Σ p_i.
  double revenue = 0.0;
  bool deficit = false;
  /// More than one feasible set attained the objective.
  bool tie = false;
  int argmax_count = 1;
};

/// Objective maximized by the mechanism's allocation rule for set s.
double allocation_objective(const AuctionInstance& inst, Mechanism m, Coalition s);

/// Feasible sets attaining the maximum objective, ascending by mask.
std::vector<Coalition> argmax_sets(const AuctionInstance& inst, Mechanism m);

/// max over feasible S ∌ i of the objective, minus max over feasible S ∋ i
/// of the objective without b_i; clamped per the rule.
double threshold_payment(const AuctionInstance& inst, Mechanism m, int bundle,
                         const AuctionOptions& options = {});

Outcome run_mechanism(const AuctionInstance& inst, Mechanism m, const AuctionOptions& options = {});

/// Payments and accounting for a prescribed allocation.
Outcome settle(const AuctionInstance& inst, Mechanism m, Coalition allocation,
               const AuctionOptions& options = {});

inline Outcome myerson_allocate(const AuctionInstance& inst, const AuctionOptions& options = {}) {
  return run_mechanism(inst, Mechanism::kMyerson, options);
}

inline Outcome mev_max_allocate(const AuctionInstance& inst, const AuctionOptions& options = {}) {
  return run_mechanism(inst, Mechanism::kMevMax, options);
}

/// Allocate every bundle and rebate τ_i(v). τ must be theta, psi_bar or banzhaf_clamped.
Outcome tau_mechanism(const Game& bundles, OperatorId op, std::span<const double> bids = {},
                      const OperatorConfig& config = {});
/// As above, rejecting instances whose family is not 2^N.
Outcome tau_mechanism(const AuctionInstance& inst, OperatorId op, const OperatorConfig& config = {});

struct ProbeWitness {
  AuctionInstance instance;
  int bundle = 0;
  double deviating_bid = 0.0;
  double truthful_utility = 0.0;
  double deviating_utility = 0.0;
};

struct ProbeReport {
  Mechanism mechanism = Mechanism::kMyerson;
  int trials = 0;
  int violations = 0;
  std::optional<ProbeWitness> witness;
};

/// Random conflict graphs on 2..max_n bundles, random bids and monotone
/// oracles; each trial compares truthful utility with one random deviation.
ProbeReport truthfulness_probe(Mechanism m, int trials, std::uint64_t seed, int max_n = 6,
                               const AuctionOptions& options = {});

struct SybilSplitReport {
  Mechanism mechanism = Mechanism::kMyerson;
  double epsilon = 0.0;
  AuctionInstance before_instance;
  AuctionInstance after_instance;
  Outcome before;
  Outcome after;
  double payment_before = 0.0;
  double utility_before = 0.0;
  /// Payments of the two split parts.
  std::pair<double, double> payments_after{0.0, 0.0};
  double utility_after = 0.0;

  bool profitable(double tol = kTolerance) const { return utility_after > utility_before + tol; }
  bool tie() const { return before.tie || after.tie; }
};

/// Conflicting t1, t2 bidding 1 and 1 + ε, each generating MEV 10; then t2
/// is split into two complementary parts bidding 1 each.
SybilSplitReport sybil_split_scenario(double epsilon = 0.01, Mechanism m = Mechanism::kMyerson,
                                      std::uint64_t seed = 42);

struct NegativeResultReport {
  double scale = 1.0;
  AuctionInstance instance;
  /// mev_max with signed thresholds on the complementary pair.
  Outcome welfare_positive;
  /// The empty allocation.
  Outcome empty;
  double deficit = 0.0;
};

/// v({1,2}) = scale, singletons 0, zero costs.
NegativeResultReport negative_result_scenario(double scale = 1.0);

struct ComparisonWitness {
  AuctionInstance instance;
  AuctionOptions options;
  Outcome myerson;
  Outcome mev_max;
};

struct NonComparabilityReport {
  /// Myerson user welfare strictly above mev_max.
  ComparisonWitness myerson_better;
  /// mev_max user welfare b1 + v − b2 strictly above Myerson's b2 − b1.
  ComparisonWitness mev_max_better;
};

NonComparabilityReport non_comparability();

}  // namespace mevr
