#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mevr/cfmm.hpp"
#include "mevr/operators.hpp"
#include "oracles.hpp"

using namespace mevr;

namespace {

Pool cp(const std::string& a, const std::string& b, double x, double y, int owner) {
  Pool p;
  p.pair = {a, b};
  p.reserves = {x, y};
  p.owner = owner;
  return p;
}

bool is_monotone(const Game& g) {
  for (Coalition s = 0; s <= g.grand_coalition(); ++s) {
    for (int i = 0; i < g.players(); ++i) {
      if (!contains(s, i) && g(s | player_bit(i)) < g(s) - 1e-12) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("single-pool arbitrage") {
  SUBCASE("pool already at the reference price") {
    CHECK(arb({cp("X", "Y", 100, 100, 0), {1, 1}}).profit == doctest::Approx(0.0));
  }
  SUBCASE("closed form against the grid") {
    const ArbInstance inst{cp("X", "Y", 100, 100, 0), {1, 4}};
    const ArbResult r = arb(inst);
    CHECK(r.profit == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(r.reserve_change[0] == doctest::Approx(100.0));
    CHECK(r.reserve_change[1] == doctest::Approx(-50.0));
    CHECK(oracle::grid_arb(inst, 1'000'000) == doctest::Approx(r.profit).epsilon(1e-6));
  }
  SUBCASE("reserves scale the profit linearly") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
      Pool pool = oracle::random_cp_pool(rng);
      if (t % 2) {
        pool.kind = PoolKind::kWeightedGeometric;
        pool.weight = 0.3;
      }
      const std::array<double, 2> prices{1.0, 0.5 + t * 0.2};
      const double base = arb({pool, prices}).profit;
      const double lambda = 0.25 + t * 0.5;
      CHECK(arb({pool.scaled(lambda), prices}).profit == doctest::Approx(lambda * base).epsilon(1e-9));
    }
  }
}

TEST_CASE("arbitrage matches the grid oracle on random pools") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> price(0.2, 5.0);
  std::uniform_real_distribution<double> weight(0.2, 0.8);
  for (int t = 0; t < 50; ++t) {
    Pool pool = oracle::random_cp_pool(rng);
    if (t % 2) {
      pool.kind = PoolKind::kWeightedGeometric;
      pool.weight = weight(rng);
    }
    const ArbInstance inst{pool, {price(rng), price(rng)}};
    const double lib = arb(inst).profit;
    const double grid = oracle::grid_arb(inst, 200'000);
    CAPTURE(t);
    REQUIRE(std::abs(lib - grid) <= 1e-6 * std::max(1.0, std::abs(grid)));
    REQUIRE(lib >= grid - 1e-9 * std::max(1.0, grid));
  }
}

TEST_CASE("LP games of homogeneous pools are additive and pay pro rata") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 5;
    std::vector<double> shares(n);
    double sum = 0.0;
    for (double& s : shares) sum += (s = std::uniform_real_distribution<double>(0.1, 1.0)(rng));
    for (double& s : shares) s /= sum;
    const Pool pool = oracle::random_cp_pool(rng);
    const std::array<double, 2> prices{1.0, 2.5};
    const Game g = lp_game(shares, pool, prices);
    CHECK(classify(g, 1e-9 * (1.0 + g.grand_value())).additive);
    const RebateVector phi = shapley(g);
    const RebateVector pr = pro_rata(shares, g.grand_value());
    for (int i = 0; i < n; ++i) REQUIRE(std::abs(phi[i] - pr[i]) <= 1e-8);
  }
  const std::vector<double> one{1.0};
  const Pool pool = cp("X", "Y", 50, 80, 0);
  CHECK(lp_game(one, pool, {1, 2})(1) == doctest::Approx(arb({pool, {1, 2}}).profit));
}

TEST_CASE("cyclic arbitrage") {
  SUBCASE("parallel pools with equal prices") {
    TokenGraph g{"A", {cp("A", "B", 100, 200, 0), cp("A", "B", 50, 100, 1)}};
    CHECK(cyclic_arb(g).profit == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("parallel pools with different prices") {
    TokenGraph g{"A", {cp("A", "B", 100, 200, 0), cp("A", "B", 100, 100, 1)}};
    const CycleArbResult r = cyclic_arb(g);
    CHECK(r.profit > 1.0);
    CHECK(r.profit == doctest::Approx(oracle::grid_cyclic_arb(g, 6, 20'000)).epsilon(1e-6));
    REQUIRE(r.cycle.has_value());
    CHECK(r.cycle->owners == 0b11);
  }
  SUBCASE("the triangle needs every edge") {
    const TokenGraph tri = triangle_graph();
    CHECK(cyclic_arb(tri).profit == doctest::Approx(0.654971660057).epsilon(1e-9));
    for (std::size_t drop = 0; drop < 3; ++drop) {
      TokenGraph g = tri;
      g.pools.erase(g.pools.begin() + static_cast<long>(drop));
      CHECK(cyclic_arb(g).profit == 0.0);
      CHECK(cyclic_arb(tri, 6, full_coalition(3) & ~player_bit(static_cast<int>(drop))).profit == 0.0);
    }
  }
  CHECK_THROWS_AS(cyclic_arb(triangle_graph(), 1), ValidationError);
}

TEST_CASE("cyclic arbitrage matches the grid oracle on random graphs") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> reserve(20.0, 500.0);
  const std::vector<std::string> tokens{"N", "A", "B"};
  for (int t = 0; t < 50; ++t) {
    TokenGraph g;
    g.numeraire = "N";
    const int pools = 2 + t % 3;
    for (int k = 0; k < pools; ++k) {
      const int a = static_cast<int>(rng() % 3);
      const int b = (a + 1 + static_cast<int>(rng() % 2)) % 3;
      Pool p = cp(tokens[a], tokens[b], reserve(rng), reserve(rng), k);
      if (rng() % 3 == 0) {
        p.kind = PoolKind::kWeightedGeometric;
        p.weight = 0.3 + 0.4 * std::uniform_real_distribution<double>(0, 1)(rng);
      }
      g.pools.push_back(p);
    }
    const double lib = cyclic_arb(g, 4).profit;
    const double grid = oracle::grid_cyclic_arb(g, 4, 20'000);
    CAPTURE(t);
    REQUIRE(std::abs(lib - grid) <= 1e-6 * std::max(1.0, grid));
  }
}

TEST_CASE("graph games") {
  SUBCASE("triangle is a scaled unanimity game") {
    const Game g = graph_game(triangle_graph());
    const GameProfile p = classify(g);
    REQUIRE(p.unanimity.has_value());
    CHECK(p.unanimity->carrier == 0b111);
    const RebateVector phi = shapley(g);
    for (int i = 0; i < 3; ++i) CHECK(phi[i] == doctest::Approx(g.grand_value() / 3));
  }
  SUBCASE("an owner with its own profitable pair earns alone") {
    TokenGraph g = triangle_graph();
    g.pools.push_back(cp("A", "E", 100, 100, 0));
    g.pools.push_back(cp("A", "E", 100, 150, 0));
    const Game game = graph_game(g);
    CHECK(game(0b001) > 0.0);
    CHECK(game(0b001) == doctest::Approx(cyclic_arb(TokenGraph{"A", {g.pools[3], g.pools[4]}}).profit));
  }
  SUBCASE("monotone on random graphs") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
      TokenGraph g{"A", {}};
      const std::vector<std::string> tok{"A", "B", "C"};
      for (int k = 0; k < 4; ++k) {
        const int a = static_cast<int>(rng() % 3);
        const int b = (a + 1) % 3;
        g.pools.push_back(cp(tok[a], tok[b], 50.0 + static_cast<double>(rng() % 100),
                             50.0 + static_cast<double>(rng() % 100), k));
      }
      CHECK(is_monotone(graph_game(g)));
    }
  }
}

TEST_CASE("token split attack") {
  const TokenGraph tri = triangle_graph();
  const double v = graph_game(tri).grand_value();

  SUBCASE("splitting a constant-product pool composes exactly") {
    const TokenGraph split = split_pool(tri, 0);
    REQUIRE(split.pools.size() == 4);
    const Pool& ad = split.pools[0];
    const Pool& db = split.pools[3];
    for (double in : {0.5, 3.0, 40.0}) {
      const double via = db.swap_output(db.side_of("D"), ad.swap_output(ad.side_of("A"), in));
      CHECK(via == doctest::Approx(tri.pools[0].swap_output(0, in)).epsilon(1e-12));
    }
    CHECK(db.owner == 3);
  }
  SUBCASE("shapley pays the splitting owner half") {
    const TokenSplitReport game_level = idealized_token_split(graph_game(tri), 0, OperatorId::kShapley);
    CHECK(game_level.before_payoff == doctest::Approx(v / 3).epsilon(1e-12));
    CHECK(game_level.after_payoff == doctest::Approx(v / 2).epsilon(1e-12));
    const RebateVector after = shapley(game_level.after);
    CHECK(after[1] == doctest::Approx(v / 4).epsilon(1e-12));
    CHECK(after[2] == doctest::Approx(v / 4).epsilon(1e-12));
    CHECK(game_level.profitable());

    const TokenSplitReport pool_level = token_split_attack(tri, 0, OperatorId::kShapley);
    CHECK(pool_level.after_payoff == doctest::Approx(v / 2).epsilon(1e-9));
  }
  SUBCASE("banzhaf does not reward the split") {
    const TokenSplitReport r = token_split_attack(tri, 0, OperatorId::kBanzhaf);
    CHECK_FALSE(r.profitable());
    CHECK(r.after_payoff <= r.before_payoff + 1e-9);
    CHECK_FALSE(idealized_token_split(graph_game(tri), 0, OperatorId::kBanzhaf).profitable());
  }
  SUBCASE("splitting a pool off every cycle changes nothing") {
    TokenGraph g = tri;
    g.pools.push_back(cp("D", "E", 100, 100, 3));
    const TokenSplitReport r = token_split_attack(g, 3, OperatorId::kShapley);
    CHECK(r.before_payoff == 0.0);
    CHECK(r.after_payoff == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(split_pool(tri, 3), ValidationError);
}

TEST_CASE("pool validation") {
  CHECK_THROWS_AS(cp("A", "A", 1, 1, 0).validate(), ValidationError);
  CHECK_THROWS_AS(cp("A", "B", 0, 1, 0).validate(), ValidationError);
  Pool w = cp("A", "B", 1, 1, 0);
  w.kind = PoolKind::kWeightedGeometric;
  w.weight = 1.0;
  CHECK_THROWS_AS(w.validate(), ValidationError);
  CHECK_THROWS_AS(arb({cp("A", "B", 1, 1, 0), {0, 1}}), ValidationError);
  CHECK(parse_pool_kind("wg") == PoolKind::kWeightedGeometric);
}
