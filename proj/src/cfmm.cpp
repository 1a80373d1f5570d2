#include "mevr/cfmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>

#include "mevr/sybil.hpp"

namespace mevr {
namespace {

constexpr int kGoldenIterations = 200;
constexpr int kMaxCycleLength = 6;

// Maximizes a concave f on [lo, hi].
template <typename F>
double golden_section_argmax(F&& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < kGoldenIterations && b - a > 0.0; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double pool_profit_at(const Pool& pool, const std::array<double, 2>& prices, double t) {
  const double w = pool.first_weight();
  const double a = w / (1.0 - w);
  const auto [x, y] = pool.reserves;
  return prices[0] * x * -std::expm1(t) + prices[1] * y * -std::expm1(-a * t);
}

}  // namespace

std::string_view to_string(PoolKind kind) {
  return kind == PoolKind::kConstantProduct ? "cp" : "wg";
}

PoolKind parse_pool_kind(std::string_view name) {
  if (name == "cp" || name == "constant-product") return PoolKind::kConstantProduct;
  if (name == "wg" || name == "weighted-geometric") return PoolKind::kWeightedGeometric;
  throw ValidationError("unknown pool kind '" + std::string(name) + "' (expected cp|wg)");
}

void Pool::validate() const {
  if (pair[0].empty() || pair[1].empty() || pair[0] == pair[1]) {
    throw ValidationError("pool: pair must name two distinct tokens");
  }
  for (double r : reserves) {
    if (!std::isfinite(r) || r <= 0.0) throw ValidationError("pool: reserves must be positive");
  }
  if (kind == PoolKind::kWeightedGeometric && !(weight > 0.0 && weight < 1.0)) {
    throw ValidationError("pool: weighted-geometric weight must lie in (0, 1)");
  }
  if (owner < 0 || owner >= kMaxPlayers) throw ValidationError("pool: owner out of range");
}

double Pool::swap_output(int side_in, double amount_in) const {
  if (amount_in <= 0.0) return 0.0;
  const double w0 = first_weight();
  const double w_in = side_in == 0 ? w0 : 1.0 - w0;
  const double r_in = reserves[side_in];
  const double r_out = reserves[1 - side_in];
  return r_out * -std::expm1((w_in / (1.0 - w_in)) * std::log(r_in / (r_in + amount_in)));
}

double Pool::marginal_price() const {
  const double w = first_weight();
  return (w / (1.0 - w)) * reserves[1] / reserves[0];
}

Pool Pool::scaled(double factor) const {
  Pool out = *this;
  out.reserves = {reserves[0] * factor, reserves[1] * factor};
  return out;
}

int Pool::side_of(std::string_view token) const {
  if (pair[0] == token) return 0;
  if (pair[1] == token) return 1;
  return -1;
}

ArbResult arb(const ArbInstance& inst) {
  inst.pool.validate();
  const auto& p = inst.prices;
  if (!(p[0] > 0.0 && p[1] > 0.0) || !std::isfinite(p[0]) || !std::isfinite(p[1])) {
    throw ValidationError("arb: reference prices must be positive");
  }
  const auto [x, y] = inst.pool.reserves;
  ArbResult out;
  if (inst.pool.kind == PoolKind::kConstantProduct) {
    // Move to the reserves where the pool price y'/x' equals p0/p1 on xy = k.
    const double k = x * y;
    const double x_new = std::sqrt(k * p[1] / p[0]);
    const double y_new = k / x_new;
    out.profit = std::max(0.0, p[0] * x + p[1] * y - 2.0 * std::sqrt(k * p[0] * p[1]));
    out.reserve_change = {x_new - x, y_new - y};
    if (out.profit == 0.0) out.reserve_change = {0.0, 0.0};
    return out;
  }
  // Reserves after the trade are (x·e^t, y·e^{−a·t}), a = w/(1−w); profit is concave in t.
  const double w = inst.pool.first_weight();
  const double a = w / (1.0 - w);
  const double radius = std::abs(std::log(p[1] * y * a / (p[0] * x))) + 1.0;
  const auto f = [&](double t) { return pool_profit_at(inst.pool, p, t); };
  const double t = golden_section_argmax(f, -radius, radius);
  const double profit = f(t);
  if (profit > 0.0) {
    out.profit = profit;
    out.reserve_change = {x * std::expm1(t), y * std::expm1(-a * t)};
  }
  return out;
}

Game lp_game(std::span<const double> shares, const Pool& pool,
             const std::array<double, 2>& prices) {
  const int n = static_cast<int>(shares.size());
  if (n < 1 || n > kMaxEnumerationPlayers) {
    throw ValidationError("lp_game: share count must lie in [1, " +
                          std::to_string(kMaxEnumerationPlayers) + "]");
  }
  double sum = 0.0;
  for (double s : shares) {
    if (!std::isfinite(s) || s < 0.0) throw ValidationError("lp_game: shares must be >= 0");
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("lp_game: shares must sum to 1");
  pool.validate();

  std::vector<double> v(std::size_t{1} << n, 0.0);
  for (std::size_t s = 1; s < v.size(); ++s) {
    double mass = 0.0;
    for (int i : members(static_cast<Coalition>(s))) mass += shares[i];
    if (mass > 0.0) v[s] = arb({pool.scaled(mass), prices}).profit;
  }
  return Game::from_trusted(n, std::move(v), true);
}

void TokenGraph::validate() const {
  if (numeraire.empty()) throw ValidationError("token graph: numeraire is empty");
  if (pools.empty()) throw ValidationError("token graph: no pools");
  for (const Pool& p : pools) p.validate();
  if (players() > kMaxEnumerationPlayers) {
    throw ValidationError("token graph: " + std::to_string(players()) +
                          " owners exceed the cap of " +
                          std::to_string(kMaxEnumerationPlayers));
  }
}

int TokenGraph::players() const {
  int n = 0;
  for (const Pool& p : pools) n = std::max(n, p.owner + 1);
  return n;
}

std::vector<ArbCycle> enumerate_cycles(const TokenGraph& graph, int max_len) {
  graph.validate();
  if (max_len < 2 || max_len > kMaxCycleLength) {
    throw ValidationError("cyclic arb: cycle length bound must lie in [2, 6]");
  }
  std::vector<ArbCycle> cycles;
  std::vector<char> used(graph.pools.size(), 0);
  std::set<std::string> visited{graph.numeraire};
  ArbCycle path;
  path.tokens.push_back(graph.numeraire);

  const auto dfs = [&](auto&& self, const std::string& at) -> void {
    for (std::size_t e = 0; e < graph.pools.size(); ++e) {
      if (used[e]) continue;
      const Pool& pool = graph.pools[e];
      const int side = pool.side_of(at);
      if (side < 0) continue;
      const std::string& next = pool.pair[1 - side];
      const bool closes = next == graph.numeraire;
      if (!closes && visited.count(next)) continue;

      used[e] = 1;
      path.pools.push_back(static_cast<int>(e));
      path.tokens.push_back(next);
      if (closes) {
        if (path.pools.size() >= 2) {
          ArbCycle c = path;
          for (int idx : c.pools) c.owners |= player_bit(graph.pools[idx].owner);
          cycles.push_back(std::move(c));
        }
      } else if (static_cast<int>(path.pools.size()) < max_len) {
        visited.insert(next);
        self(self, next);
        visited.erase(next);
      }
      path.tokens.pop_back();
      path.pools.pop_back();
      used[e] = 0;
    }
  };
  dfs(dfs, graph.numeraire);
  return cycles;
}

double cycle_profit(const TokenGraph& graph, const ArbCycle& cycle, double input) {
  double amount = input;
  for (std::size_t h = 0; h < cycle.pools.size(); ++h) {
    const Pool& pool = graph.pools[cycle.pools[h]];
    amount = pool.swap_output(pool.side_of(cycle.tokens[h]), amount);
  }
  return amount - input;
}

namespace {

CycleArbResult optimize_cycle(const TokenGraph& graph, const ArbCycle& cycle) {
  const Pool& last = graph.pools[cycle.pools.back()];
  // Output never exceeds the last pool's numéraire reserve, so neither can a profitable input.
  const double hi = last.reserves[last.side_of(graph.numeraire)];
  const auto f = [&](double a) { return cycle_profit(graph, cycle, a); };
  const double a = golden_section_argmax(f, 0.0, hi);
  CycleArbResult out;
  const double profit = f(a);
  if (profit > 0.0) {
    out.profit = profit;
    out.input = a;
    out.cycle = cycle;
  }
  return out;
}

}  // namespace

CycleArbResult cyclic_arb(const TokenGraph& graph, int max_len, Coalition owners) {
  CycleArbResult best;
  for (const ArbCycle& c : enumerate_cycles(graph, max_len)) {
    if (!is_subset(c.owners, owners)) continue;
    CycleArbResult r = optimize_cycle(graph, c);
    if (r.profit > best.profit) best = std::move(r);
  }
  return best;
}

Game graph_game(const TokenGraph& graph, int max_len) {
  const std::vector<ArbCycle> cycles = enumerate_cycles(graph, max_len);
  std::vector<double> profit(cycles.size());
  for (std::size_t c = 0; c < cycles.size(); ++c) profit[c] = optimize_cycle(graph, cycles[c]).profit;

  const int n = graph.players();
  std::vector<double> v(std::size_t{1} << n, 0.0);
  const auto count = static_cast<long>(v.size());
#pragma omp parallel for schedule(static)
  for (long s = 1; s < count; ++s) {
    double best = 0.0;
    for (std::size_t c = 0; c < cycles.size(); ++c) {
      if (is_subset(cycles[c].owners, static_cast<Coalition>(s))) best = std::max(best, profit[c]);
    }
    v[s] = best;
  }
  return Game::from_trusted(n, std::move(v), true);
}

TokenGraph split_pool(const TokenGraph& graph, int pool_index) {
  graph.validate();
  if (pool_index < 0 || pool_index >= static_cast<int>(graph.pools.size())) {
    throw ValidationError("token split: pool index " + std::to_string(pool_index) +
                          " out of range");
  }
  std::set<std::string> tokens;
  for (const Pool& p : graph.pools) tokens.insert(p.pair.begin(), p.pair.end());
  std::string fresh = "D";
  while (tokens.count(fresh)) fresh += "'";

  const Pool original = graph.pools[pool_index];
  const int identity = graph.players();
  if (identity + 1 > kMaxEnumerationPlayers) {
    throw ValidationError("token split: no room for another identity");
  }
  const auto [a, b] = original.reserves;

  Pool first = original;
  Pool second;
  second.owner = identity;
  second.kind = PoolKind::kConstantProduct;
  if (original.kind == PoolKind::kConstantProduct) {
    // (2a, m) then (m, 2b) compose to exactly the original swap in both directions.
    const double m = 2.0 * std::sqrt(a * b);
    first.pair = {original.pair[0], fresh};
    first.reserves = {2.0 * a, m};
    second.pair = {fresh, original.pair[1]};
    second.reserves = {m, 2.0 * b};
  } else {
    const double deep = 1e6 * std::max(a, b);
    first.pair = {original.pair[0], fresh};
    second.pair = {fresh, original.pair[1]};
    second.reserves = {deep, deep};
  }

  TokenGraph out = graph;
  out.pools[pool_index] = first;
  out.pools.push_back(second);
  return out;
}

TokenSplitReport token_split_attack(const TokenGraph& graph, int pool_index, OperatorId op,
                                    int max_len, const OperatorConfig& config) {
  TokenSplitReport out;
  out.op = op;
  out.split_graph = split_pool(graph, pool_index);
  out.owner = graph.pools[pool_index].owner;
  out.before = graph_game(graph, max_len);
  // Cycles grow by one pool when routed through the new token.
  out.after = graph_game(*out.split_graph, std::min(max_len + 1, kMaxCycleLength));
  out.identities = player_bit(out.owner) | player_bit(graph.players());
  out.before_payoff = evaluate(op, out.before, config)[out.owner];
  out.after_payoff = evaluate(op, out.after, config).total(out.identities);
  return out;
}

TokenSplitReport idealized_token_split(const Game& g, int owner, OperatorId op,
                                       const OperatorConfig& config) {
  const SybilExtension ext = split_extension(g, owner, 1);
  TokenSplitReport out;
  out.op = op;
  out.owner = owner;
  out.before = g;
  out.after = ext.extended;
  out.identities = ext.identities();
  out.before_payoff = evaluate(op, g, config)[owner];
  out.after_payoff = ext.attacker_payoff(evaluate(op, ext.extended, config));
  return out;
}

TokenGraph triangle_graph() {
  TokenGraph g;
  g.numeraire = "A";
  g.pools = {
      {{"A", "B"}, {100.0, 100.0}, PoolKind::kConstantProduct, 0.5, 0},
      {{"B", "C"}, {100.0, 100.0}, PoolKind::kConstantProduct, 0.5, 1},
      {{"C", "A"}, {100.0, 130.0}, PoolKind::kConstantProduct, 0.5, 2},
  };
  return g;
}

}  // namespace mevr
