#include "mevr/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mevr/kernels.hpp"

namespace mevr {
namespace {

constexpr std::array kOperators = {OperatorId::kShapley, OperatorId::kBanzhaf,
                                   OperatorId::kTheta,   OperatorId::kPsi,
                                   OperatorId::kPsiBar,  OperatorId::kBanzhafClamped};

constexpr double kIncreaseSlack = 1e-12;

double pow2(int e) { return std::ldexp(1.0, e); }

// Sum of Shapley payments to the coalition, computing only those players.
double shapley_mass(const Game& g, Coalition who) {
  const auto phi = kernels::parallel::shapley(g.players(), g.values(), who);
  double sum = 0.0;
  for (int p : members(who)) sum += phi[p];
  return sum;
}

std::optional<ScaledUnanimity> as_scaled_unanimity(const Game& g) {
  const auto d = unanimity_coefficients(g);
  const double tol = kTolerance * std::max(1.0, g.grand_value());
  std::optional<ScaledUnanimity> found;
  for (std::size_t r = 1; r < d.coefficients.size(); ++r) {
    if (std::abs(d.coefficients[r]) <= tol) continue;
    if (found || d.coefficients[r] < 0.0) return std::nullopt;
    found = ScaledUnanimity{static_cast<Coalition>(r), d.coefficients[r]};
  }
  return found;
}

// Best Aitken Δ² estimate over triples inside the strictly increasing prefix
// of the sequence whose increments shrink.
std::optional<double> aitken_limit(const std::vector<double>& seq) {
  std::optional<double> best;
  for (std::size_t j = 0; j + 2 < seq.size(); ++j) {
    const double d1 = seq[j + 1] - seq[j];
    const double d2 = seq[j + 2] - seq[j + 1];
    if (!(d1 > kIncreaseSlack && d2 > kIncreaseSlack)) break;
    const double curvature = d2 - d1;
    if (curvature >= 0.0) continue;
    const double estimate = seq[j + 2] - d2 * d2 / curvature;
    if (!best || estimate > *best) best = estimate;
  }
  return best;
}

// Sup over explored extensions of the Shapley mass on the player's identities,
// in game-value units (before the 2^{1−n} factor).
double psi_supremum(const Game& g, int player, double honest, const PsiSearch& search) {
  double best = honest;
  std::vector<double> copies{honest};
  std::vector<double> splits{honest};
  for_each_sybil_chain(g, player, search.k_max, true,
                       [&](const std::vector<SybilStep>& steps, const Game& ext, Coalition ids) {
                         const double mass = shapley_mass(ext, ids);
                         best = std::max(best, mass);
                         if (steps.size() == 1) {
                           (steps[0].family == SybilFamily::kCopy ? copies : splits).push_back(mass);
                         }
                       });
  if (search.extrapolate) {
    for (const auto* seq : {&copies, &splits}) {
      if (auto limit = aitken_limit(*seq)) best = std::max(best, *limit);
    }
  }
  return std::min(best, g.grand_value());
}

}  // namespace

std::string_view to_string(OperatorId op) {
  switch (op) {
    case OperatorId::kShapley: return "shapley";
    case OperatorId::kBanzhaf: return "banzhaf";
    case OperatorId::kTheta: return "theta";
    case OperatorId::kPsi: return "psi";
    case OperatorId::kPsiBar: return "psi_bar";
    case OperatorId::kBanzhafClamped: return "banzhaf_clamped";
  }
  return "?";
}

OperatorId parse_operator(std::string_view name) {
  for (OperatorId op : kOperators) {
    if (to_string(op) == name) return op;
  }
  if (name == "banzhaf-clamped") return OperatorId::kBanzhafClamped;
  if (name == "psi-bar") return OperatorId::kPsiBar;
  throw ValidationError("unknown operator '" + std::string(name) +
                        "' (expected shapley|banzhaf|theta|psi|psi_bar|banzhaf_clamped)");
}

std::span<const OperatorId> all_operators() { return kOperators; }

RebateVector shapley(const Game& g) {
  require_enumerable(g);
  return RebateVector(kernels::parallel::shapley(g.players(), g.values()));
}

RebateVector shapley_permutation_oracle(const Game& g) {
  const int n = g.players();
  if (n > 9) throw ValidationError("permutation oracle enumerates n! orders; n must be at most 9");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
  long long orders = 0;
  do {
    Coalition s = 0;
    for (int p : order) {
      sum[p] += g(s | player_bit(p)) - g(s);
      s |= player_bit(p);
    }
    ++orders;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& x : sum) x /= static_cast<double>(orders);
  return RebateVector(std::move(sum));
}

RebateVector banzhaf(const Game& g) {
  require_enumerable(g);
  return RebateVector(kernels::parallel::banzhaf(g.players(), g.values()));
}

double banzhaf_welfare_formula(const Game& g) {
  require_enumerable(g);
  const int n = g.players();
  double sum = 0.0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    sum += (2.0 * cardinality(static_cast<Coalition>(s)) - n) * g(static_cast<Coalition>(s));
  }
  return sum / pow2(n - 1);
}

RebateVector banzhaf_clamped(const Game& g) {
  auto beta = banzhaf(g);
  const double total = beta.total();
  if (total > g.grand_value() && total > 0.0) {
    const double factor = g.grand_value() / total;
    for (std::size_t i = 0; i < beta.size(); ++i) beta[i] *= factor;
  }
  return beta;
}

RebateVector theta(const Game& g) {
  require_enumerable(g);
  return RebateVector(kernels::parallel::min_marginal(g.players(), g.values()));
}

OperatorReport psi(const Game& g, const PsiSearch& search) {
  require_enumerable(g);
  if (search.k_max < 0) throw ValidationError("psi: k_max must be non-negative");
  const int n = g.players();
  const double scale = 1.0 / pow2(n - 1);
  const double upper = g.grand_value() * scale;

  OperatorReport out;
  out.op = OperatorId::kPsi;
  std::vector<double> pay(static_cast<std::size_t>(n), 0.0);
  std::vector<PlayerBounds> bounds(static_cast<std::size_t>(n), {0.0, upper});

  const auto unanimity = search.exact_unanimity ? as_scaled_unanimity(g) : std::nullopt;
  if (unanimity) {
    // Split chains drive the carrier's share k/(|R|+k−1) toward the whole
    // value; players outside the carrier stay null under every extension.
    for (int i = 0; i < n; ++i) {
      pay[i] = contains(unanimity->carrier, i) ? unanimity->scale * scale : 0.0;
      bounds[i] = {pay[i], pay[i]};
    }
  } else {
    const auto phi = kernels::parallel::shapley(n, g.values());
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
      pay[i] = psi_supremum(g, i, phi[i], search) * scale;
      bounds[i].lower = pay[i];
    }
  }
  out.payments = RebateVector(std::move(pay));
  out.welfare = out.payments.total();
  out.bounds = std::move(bounds);
  return out;
}

OperatorReport psi_bar(const Game& g, const PsiSearch& search) {
  const auto base = psi(g, search);
  const auto th = theta(g);
  const int n = g.players();
  const double shrink = 1.0 / (1.0 + n / pow2(n - 1));

  OperatorReport out;
  out.op = OperatorId::kPsiBar;
  std::vector<double> pay(static_cast<std::size_t>(n));
  std::vector<PlayerBounds> bounds(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pay[i] = std::max(base.payments[i], th[i]) * shrink;
    bounds[i] = {pay[i], std::max((*base.bounds)[i].upper, th[i]) * shrink};
  }
  out.payments = RebateVector(std::move(pay));
  out.welfare = out.payments.total();
  out.bounds = std::move(bounds);
  return out;
}

RebateVector pro_rata(std::span<const double> shares, double total) {
  double sum = 0.0;
  for (double s : shares) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("pro-rata: shares must be non-negative");
    sum += s;
  }
  if (shares.empty() || std::abs(sum - 1.0) > kTolerance) {
    throw ValidationError("pro-rata: shares must sum to 1, got " + std::to_string(sum));
  }
  std::vector<double> pay(shares.size());
  for (std::size_t i = 0; i < shares.size(); ++i) pay[i] = shares[i] * total;
  return RebateVector(std::move(pay));
}

RebateVector evaluate(OperatorId op, const Game& g, const OperatorConfig& config) {
  switch (op) {
    case OperatorId::kShapley: return shapley(g);
    case OperatorId::kBanzhaf: return banzhaf(g);
    case OperatorId::kTheta: return theta(g);
    case OperatorId::kPsi: return psi(g, config.psi).payments;
    case OperatorId::kPsiBar: return psi_bar(g, config.psi).payments;
    case OperatorId::kBanzhafClamped: return banzhaf_clamped(g);
  }
  throw InternalError("unhandled operator");
}

OperatorReport report(OperatorId op, const Game& g, const OperatorConfig& config) {
  if (op == OperatorId::kPsi) return psi(g, config.psi);
  if (op == OperatorId::kPsiBar) return psi_bar(g, config.psi);
  OperatorReport out;
  out.op = op;
  out.payments = evaluate(op, g, config);
  out.welfare = out.payments.total();
  return out;
}

std::string_view to_string(AttackFamily family) {
  switch (family) {
    case AttackFamily::kCopy: return "copy";
    case AttackFamily::kSplit: return "split";
    case AttackFamily::kMixed: return "mixed";
  }
  return "?";
}

AttackFamily parse_attack_family(std::string_view name) {
  if (name == "copy") return AttackFamily::kCopy;
  if (name == "split") return AttackFamily::kSplit;
  if (name == "mixed") return AttackFamily::kMixed;
  throw ValidationError("unknown attack family '" + std::string(name) +
                        "' (expected copy|split|mixed)");
}

SybilAttackReport optimal_sybil_strategy(const Game& g, int player, OperatorId op,
                                         AttackFamily family, int k_max,
                                         const OperatorConfig& config) {
  if (player < 0 || player >= g.players()) {
    throw ValidationError("sybil search: player " + std::to_string(player + 1) + " not in game");
  }
  if (k_max < 0) throw ValidationError("sybil search: k_max must be non-negative");
  if (g.players() + k_max > kMaxEnumerationPlayers) {
    throw ValidationError("sybil search: n + k_max = " + std::to_string(g.players() + k_max) +
                          " exceeds the enumeration cap of " +
                          std::to_string(kMaxEnumerationPlayers));
  }

  SybilAttackReport out;
  out.op = op;
  out.player = player;
  out.family = family;
  out.payoffs.assign(static_cast<std::size_t>(k_max) + 1, -std::numeric_limits<double>::infinity());
  out.chains.assign(static_cast<std::size_t>(k_max) + 1, {});
  out.payoffs[0] = evaluate(op, g, config)[static_cast<std::size_t>(player)];

  const bool mixed = family == AttackFamily::kMixed;
  for_each_sybil_chain(g, player, k_max, mixed,
                       [&](const std::vector<SybilStep>& steps, const Game& ext, Coalition ids) {
                         if (!mixed) {
                           const auto wanted = family == AttackFamily::kCopy ? SybilFamily::kCopy
                                                                             : SybilFamily::kSplit;
                           if (steps[0].family != wanted) return;
                         }
                         int added = 0;
                         for (const auto& s : steps) added += s.k;
                         const double payoff = evaluate(op, ext, config).total(ids);
                         if (payoff > out.payoffs[added]) {
                           out.payoffs[added] = payoff;
                           out.chains[added] = steps;
                         }
                       });

  double best = out.payoffs[0];
  for (double p : out.payoffs) best = std::max(best, p);
  // Smallest k within rounding of the maximum wins.
  for (int k = 0; k <= k_max; ++k) {
    if (out.payoffs[k] >= best - kIncreaseSlack) {
      out.best_k = k;
      out.best_payoff = out.payoffs[k];
      break;
    }
  }
  out.divergent = k_max >= 1 && out.payoffs[k_max] > out.payoffs[k_max - 1] + kIncreaseSlack;
  return out;
}

}  // namespace mevr
