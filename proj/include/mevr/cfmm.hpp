#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mevr/game.hpp"
#include "mevr/operators.hpp"

namespace mevr {

enum class PoolKind { kConstantProduct, kWeightedGeometric };

std::string_view to_string(PoolKind kind);
PoolKind parse_pool_kind(std::string_view name);

/// A two-asset fee-free CFMM. The weighted-geometric invariant is
/// x^w · y^(1−w) with x the first reserve; constant product is w = 1/2.
struct Pool {
  std::array<std::string, 2> pair;
  std::array<double, 2> reserves{1.0, 1.0};
  PoolKind kind = PoolKind::kConstantProduct;
  double weight = 0.5;
  /// 0-based player that provides the liquidity.
  int owner = 0;

  void validate() const;
  double first_weight() const { return kind == PoolKind::kConstantProduct ? 0.5 : weight; }
  /// Amount of the other asset received for `amount_in` of asset `side_in` (0 or 1).
  double swap_output(int side_in, double amount_in) const;
  /// Price of the first asset in units of the second.
  double marginal_price() const;
  Pool scaled(double factor) const;
  /// 0 or 1 for a token of the pair, −1 otherwise.
  int side_of(std::string_view token) const;
};

/// A pool facing an external market with reference prices in numéraire units.
struct ArbInstance {
  Pool pool;
  std::array<double, 2> prices{1.0, 1.0};
};

struct ArbResult {
  double profit = 0.0;
  /// Change of the pool reserves produced by the optimal trade.
  std::array<double, 2> reserve_change{0.0, 0.0};
};

/// Optimal arbitrage against the reference prices: closed form for constant
/// product, golden-section search for weighted-geometric pools.
ArbResult arb(const ArbInstance& inst);

/// v(S) = arb(pool with reserves scaled by Σ_{i∈S} s_i).
Game lp_game(std::span<const double> shares, const Pool& pool, const std::array<double, 2>& prices);

struct TokenGraph {
  std::string numeraire;
  std::vector<Pool> pools;

  void validate() const;
  /// max owner + 1.
  int players() const;
};

struct ArbCycle {
  /// Pool indices in trade order; the first pool takes the numéraire.
  std::vector<int> pools;
  /// Tokens visited, numéraire first and last.
  std::vector<std::string> tokens;
  Coalition owners = 0;
};

struct CycleArbResult {
  double profit = 0.0;
  double input = 0.0;
  std::optional<ArbCycle> cycle;
};

/// Every simple cycle through the numéraire of at most max_len pools, once
/// per orientation.
std::vector<ArbCycle> enumerate_cycles(const TokenGraph& graph, int max_len);

/// Numéraire out minus numéraire in when `input` is routed around the cycle.
double cycle_profit(const TokenGraph& graph, const ArbCycle& cycle, double input);

/// Best single-cycle arbitrage, restricted to pools whose owner lies in `owners`.
CycleArbResult cyclic_arb(const TokenGraph& graph, int max_len = 6,
                          Coalition owners = ~Coalition{0});

Game graph_game(const TokenGraph& graph, int max_len = 6);

struct TokenSplitReport {
  OperatorId op = OperatorId::kShapley;
  int owner = 0;
  Game before;
  Game after;
  /// The owner's identities in `after`.
  Coalition identities = 0;
  double before_payoff = 0.0;
  double after_payoff = 0.0;
  std::optional<TokenGraph> split_graph;

  bool profitable(double tol = kTolerance) const { return after_payoff > before_payoff + tol; }
};

/// Replaces pools[pool_index] (tokens A, B) by A-D and D-B through a fresh
/// token D. The D-B pool goes to a new identity of the same owner, labelled
/// players(). Constant-product pools compose exactly; weighted pools are
/// routed through a deep 1:1 constant-product D-B pool.
TokenGraph split_pool(const TokenGraph& graph, int pool_index);

TokenSplitReport token_split_attack(const TokenGraph& graph, int pool_index, OperatorId op,
                                    int max_len = 6, const OperatorConfig& config = {});

/// The same attack on the game directly: the owner becomes two complementary identities.
TokenSplitReport idealized_token_split(const Game& g, int owner, OperatorId op,
                                       const OperatorConfig& config = {});

/// Owners 1, 2, 3 hold A-B, B-C and C-A; only the full triangle is profitable.
TokenGraph triangle_graph();

}  // namespace mevr
