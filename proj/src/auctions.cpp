#include "mevr/auctions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace mevr {
namespace {

constexpr int kMaxBundles = kMaxEnumerationPlayers;

double tie_tolerance(double best) { return 1e-12 * std::max(1.0, std::abs(best)); }

Game zero_game(int n) { return Game::make(n, std::vector<double>(std::size_t{1} << n, 0.0)); }

void check_bundle_count(int n) {
  if (n < 1 || n > kMaxBundles) {
    throw ValidationError("auction: bundle count must lie in [1, " + std::to_string(kMaxBundles) +
                          "]");
  }
}

double user_utility(const Outcome& out, int bundle, double value) {
  return (contains(out.allocation, bundle) ? value : 0.0) - out.payments[bundle];
}

}  // namespace

FeasibleFamily FeasibleFamily::from_conflicts(int n,
                                              std::span<const std::pair<int, int>> conflicts) {
  check_bundle_count(n);
  FeasibleFamily f;
  f.n_ = n;
  f.conflict_mask_.assign(n, 0);
  for (auto [a, b] : conflicts) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
      throw ValidationError("auction: conflict pair (" + std::to_string(a + 1) + "," +
                            std::to_string(b + 1) + ") is not a pair of distinct bundles");
    }
    f.conflict_mask_[a] |= player_bit(b);
    f.conflict_mask_[b] |= player_bit(a);
  }
  f.materialize();
  return f;
}

FeasibleFamily FeasibleFamily::from_maximal_sets(int n, std::span<const Coalition> maximal) {
  check_bundle_count(n);
  FeasibleFamily f;
  f.n_ = n;
  f.conflict_mask_.assign(n, 0);
  for (Coalition s : maximal) {
    if (!is_subset(s, full_coalition(n))) {
      throw ValidationError("auction: maximal set " + format_coalition(s) +
                            " names a bundle outside 1.." + std::to_string(n));
    }
  }
  f.maximal_ = std::vector<Coalition>(maximal.begin(), maximal.end());
  f.materialize();
  return f;
}

FeasibleFamily FeasibleFamily::unrestricted(int n) { return from_conflicts(n, {}); }

bool FeasibleFamily::contains(Coalition s) const {
  if (!is_subset(s, full_coalition(n_))) return false;
  if (maximal_) {
    if (s == 0) return true;
    return std::any_of(maximal_->begin(), maximal_->end(),
                       [s](Coalition m) { return is_subset(s, m); });
  }
  for (int i : members(s)) {
    if (conflict_mask_[i] & s) return false;
  }
  return true;
}

bool FeasibleFamily::is_unrestricted() const {
  return sets_.size() == (std::size_t{1} << n_);
}

bool FeasibleFamily::downward_closed() const {
  if (sets_.empty() || sets_.front() != 0) return false;
  for (Coalition s : sets_) {
    for (int i : members(s)) {
      if (!std::binary_search(sets_.begin(), sets_.end(), s & ~player_bit(i))) return false;
    }
  }
  return true;
}

void FeasibleFamily::materialize() {
  sets_.clear();
  const Coalition limit = full_coalition(n_);
  for (Coalition s = 0;; ++s) {
    if (contains(s)) sets_.push_back(s);
    if (s == limit) break;
  }
}

void AuctionInstance::validate(bool allow_negative_bids) const {
  const int n = size();
  check_bundle_count(n);
  if (oracle.players() != n) {
    throw ValidationError("auction: oracle has " + std::to_string(oracle.players()) +
                          " players but there are " + std::to_string(n) + " bids");
  }
  if (family.size() != n) {
    throw ValidationError("auction: feasible family covers " + std::to_string(family.size()) +
                          " bundles but there are " + std::to_string(n) + " bids");
  }
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(bids[i])) throw ValidationError("auction: bid " + std::to_string(i + 1) + " is not finite");
    if (!allow_negative_bids && bids[i] < 0.0) {
      throw ValidationError("auction: bid " + std::to_string(i + 1) +
                            " is negative; negative bids are only admitted in scenarios");
    }
  }
}

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::kMyerson: return "myerson";
    case Mechanism::kMevMax: return "mev_max";
    case Mechanism::kPayYourBid: return "pay_your_bid";
  }
  return "?";
}

Mechanism parse_mechanism(std::string_view name) {
  if (name == "myerson") return Mechanism::kMyerson;
  if (name == "mev_max" || name == "mev-max") return Mechanism::kMevMax;
  if (name == "pay_your_bid" || name == "pay-your-bid") return Mechanism::kPayYourBid;
  throw ValidationError("unknown mechanism '" + std::string(name) +
                        "' (expected myerson|mev_max|pay_your_bid)");
}

double allocation_objective(const AuctionInstance& inst, Mechanism m, Coalition s) {
  double total = 0.0;
  for (int i : members(s)) total += inst.bids[i];
  if (m == Mechanism::kMevMax) total += inst.oracle(s);
  return total;
}

std::vector<Coalition> argmax_sets(const AuctionInstance& inst, Mechanism m) {
  const auto& sets = inst.family.sets();
  double best = -std::numeric_limits<double>::infinity();
  for (Coalition s : sets) best = std::max(best, allocation_objective(inst, m, s));
  std::vector<Coalition> out;
  const double tol = tie_tolerance(best);
  for (Coalition s : sets) {
    if (allocation_objective(inst, m, s) >= best - tol) out.push_back(s);
  }
  return out;
}

double threshold_payment(const AuctionInstance& inst, Mechanism m, int bundle,
                         const AuctionOptions& options) {
  if (bundle < 0 || bundle >= inst.size()) {
    throw ValidationError("auction: bundle " + std::to_string(bundle + 1) + " out of range");
  }
  if (m == Mechanism::kPayYourBid) return inst.bids[bundle];
  double with = -std::numeric_limits<double>::infinity();
  double without = -std::numeric_limits<double>::infinity();
  for (Coalition s : inst.family.sets()) {
    const double value = allocation_objective(inst, m, s);
    if (contains(s, bundle)) {
      with = std::max(with, value - inst.bids[bundle]);
    } else {
      without = std::max(without, value);
    }
  }
  const double t = without - with;
  return options.rule == ThresholdRule::kClamped ? std::max(0.0, t) : t;
}

Outcome settle(const AuctionInstance& inst, Mechanism m, Coalition allocation,
               const AuctionOptions& options) {
  inst.validate(options.allow_negative_bids);
  if (!inst.family.contains(allocation)) {
    throw ValidationError("auction: allocation " + format_coalition(allocation) +
                          " is not feasible");
  }
  Outcome out;
  out.allocation = allocation;
  out.payments.assign(inst.size(), 0.0);
  for (int i : members(allocation)) {
    out.payments[i] = threshold_payment(inst, m, i, options);
    out.builder_payment += out.payments[i];
    out.welfare += inst.bids[i] - out.payments[i];
  }
  out.revenue = inst.oracle(allocation) + out.builder_payment;
  out.deficit = out.revenue < -kTolerance;
  return out;
}

Outcome run_mechanism(const AuctionInstance& inst, Mechanism m, const AuctionOptions& options) {
  inst.validate(options.allow_negative_bids);
  const std::vector<Coalition> best = argmax_sets(inst, m);
  Coalition chosen = best.front();
  if (best.size() > 1) {
    std::mt19937_64 rng(inst.seed);
    std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
    chosen = best[pick(rng)];
  }
  Outcome out = settle(inst, m, chosen, options);
  out.argmax_count = static_cast<int>(best.size());
  out.tie = best.size() > 1;
  return out;
}

Outcome tau_mechanism(const Game& bundles, OperatorId op, std::span<const double> bids,
                      const OperatorConfig& config) {
  if (op != OperatorId::kTheta && op != OperatorId::kPsiBar &&
      op != OperatorId::kBanzhafClamped) {
    throw ValidationError("tau mechanism: operator '" + std::string(to_string(op)) +
                          "' is not one of theta, psi_bar, banzhaf_clamped");
  }
  const int n = bundles.players();
  if (!bids.empty() && static_cast<int>(bids.size()) != n) {
    throw ValidationError("tau mechanism: bid count differs from the game's player count");
  }
  const RebateVector tau = evaluate(op, bundles, config);
  Outcome out;
  out.allocation = bundles.grand_coalition();
  out.payments.resize(n);
  for (int i = 0; i < n; ++i) {
    out.payments[i] = -tau[i];
    out.builder_payment += out.payments[i];
    out.welfare += (bids.empty() ? 0.0 : bids[i]) + tau[i];
  }
  out.revenue = bundles.grand_value() + out.builder_payment;
  out.deficit = out.revenue < -kTolerance;
  return out;
}

Outcome tau_mechanism(const AuctionInstance& inst, OperatorId op, const OperatorConfig& config) {
  inst.validate();
  if (!inst.family.is_unrestricted()) {
    throw ValidationError("tau mechanism: requires a conflict-free family (F = 2^N)");
  }
  return tau_mechanism(inst.oracle, op, inst.bids, config);
}

ProbeReport truthfulness_probe(Mechanism m, int trials, std::uint64_t seed, int max_n,
                               const AuctionOptions& options) {
  if (trials < 0) throw ValidationError("truthfulness probe: trials must be >= 0");
  if (max_n < 2 || max_n > 10) throw ValidationError("truthfulness probe: max_n must lie in [2, 10]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size_dist(2, max_n);
  std::uniform_real_distribution<double> bid_dist(0.0, 10.0);
  std::uniform_real_distribution<double> deviation_dist(0.0, 15.0);
  std::bernoulli_distribution edge(0.35);

  ProbeReport report;
  report.mechanism = m;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const int n = size_dist(rng);
    std::vector<std::pair<int, int>> conflicts;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (edge(rng)) conflicts.emplace_back(a, b);
      }
    }
    AuctionInstance inst;
    inst.family = FeasibleFamily::from_conflicts(n, conflicts);
    for (int i = 0; i < n; ++i) inst.bids.push_back(bid_dist(rng));
    inst.oracle = m == Mechanism::kMevMax ? random_monotone_game(n, rng).scaled(2.0) : zero_game(n);
    inst.seed = rng();
    const int bundle = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const double deviation = deviation_dist(rng);

    const double value = inst.bids[bundle];
    const double truthful = user_utility(run_mechanism(inst, m, options), bundle, value);
    AuctionInstance lie = inst;
    lie.bids[bundle] = deviation;
    const double lying = user_utility(run_mechanism(lie, m, options), bundle, value);
    if (truthful < lying - kTolerance) {
      ++report.violations;
      if (!report.witness) report.witness = ProbeWitness{inst, bundle, deviation, truthful, lying};
    }
  }
  return report;
}

SybilSplitReport sybil_split_scenario(double epsilon, Mechanism m, std::uint64_t seed) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("sybil split scenario: epsilon must be finite and >= 0");
  }
  SybilSplitReport r;
  r.mechanism = m;
  r.epsilon = epsilon;

  const std::pair<int, int> pre_conflict[] = {{0, 1}};
  r.before_instance.bids = {1.0, 1.0 + epsilon};
  r.before_instance.family = FeasibleFamily::from_conflicts(2, pre_conflict);
  r.before_instance.oracle = Game::make(2, {0.0, 10.0, 10.0, 10.0}, true);
  r.before_instance.seed = seed;

  // Bundles t1, t2a, t2b: both halves conflict with t1 and carry MEV only together.
  const std::pair<int, int> post_conflicts[] = {{0, 1}, {0, 2}};
  r.after_instance.bids = {1.0, 1.0, 1.0};
  r.after_instance.family = FeasibleFamily::from_conflicts(3, post_conflicts);
  std::vector<double> v(8, 0.0);
  for (Coalition s = 1; s < 8; ++s) {
    if (contains(s, 0) || is_subset(0b110, s)) v[s] = 10.0;
  }
  r.after_instance.oracle = Game::make(3, std::move(v), true);
  r.after_instance.seed = seed;

  r.before = run_mechanism(r.before_instance, m);
  r.after = run_mechanism(r.after_instance, m);
  const double value = 1.0 + epsilon;
  r.payment_before = r.before.payments[1];
  r.utility_before = (contains(r.before.allocation, 1) ? value : 0.0) - r.payment_before;
  r.payments_after = {r.after.payments[1], r.after.payments[2]};
  const bool both = is_subset(0b110, r.after.allocation);
  r.utility_after = (both ? value : 0.0) - r.payments_after.first - r.payments_after.second;
  return r;
}

NegativeResultReport negative_result_scenario(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ValidationError("negative result scenario: scale must be positive");
  }
  NegativeResultReport r;
  r.scale = scale;
  r.instance.bids = {0.0, 0.0};
  r.instance.family = FeasibleFamily::unrestricted(2);
  r.instance.oracle = Game::make(2, {0.0, 0.0, 0.0, scale}, true);
  const AuctionOptions signed_costs{ThresholdRule::kSigned, true};
  r.welfare_positive = run_mechanism(r.instance, Mechanism::kMevMax, signed_costs);
  r.empty = settle(r.instance, Mechanism::kMevMax, 0, signed_costs);
  r.deficit = std::max(0.0, -r.welfare_positive.revenue);
  return r;
}

NonComparabilityReport non_comparability() {
  const std::pair<int, int> conflict[] = {{0, 1}};
  const auto make = [&](double b1, double b2, double mev, ThresholdRule rule) {
    ComparisonWitness w;
    w.instance.bids = {b1, b2};
    w.instance.family = FeasibleFamily::from_conflicts(2, conflict);
    w.instance.oracle = Game::make(2, {0.0, mev, 0.0, mev}, true);
    w.options.rule = rule;
    w.myerson = myerson_allocate(w.instance, w.options);
    w.mev_max = mev_max_allocate(w.instance, w.options);
    return w;
  };
  NonComparabilityReport r;
  r.myerson_better = make(1.0, 5.5, 5.0, ThresholdRule::kClamped);
  // b1 + v − b2 needs the rebate b2 − v < 0 to reach the winner.
  r.mev_max_better = make(1.0, 2.0, 5.0, ThresholdRule::kSigned);
  return r;
}

}  // namespace mevr
