#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mevr/game.hpp"
#include "mevr/operators.hpp"
#include "mevr/regressions.hpp"
#include "mevr/sybil.hpp"
#include "oracles.hpp"

using namespace mevr;

namespace {

std::vector<Game> sample_games(std::uint64_t seed, int count, int min_n, int max_n) {
  std::mt19937_64 rng(seed);
  std::vector<Game> out;
  for (int t = 0; t < count; ++t) out.push_back(random_monotone_game(min_n + t % (max_n - min_n + 1), rng));
  return out;
}

double two_pow(int e) { return std::ldexp(1.0, e); }

}  // namespace

TEST_CASE("shapley on unanimity and additive games") {
  for (int n = 1; n <= 6; ++n) {
    for (Coalition r = 1; r <= full_coalition(n); ++r) {
      const RebateVector phi = shapley(unanimity_game(n, r));
      for (int i = 0; i < n; ++i) {
        REQUIRE(phi[i] == doctest::Approx(contains(r, i) ? 1.0 / cardinality(r) : 0.0));
      }
    }
  }
  const std::vector<double> a{0.5, 2.0, 7.0, 1.25};
  const RebateVector phi = shapley(additive_game(a));
  for (int i = 0; i < 4; ++i) CHECK(phi[i] == doctest::Approx(a[i]));
}

TEST_CASE("shapley matches both order-averaging oracles") {
  const Game g = banzhaf_deficit_game();
  const RebateVector phi = shapley(g);
  const auto orders = oracle::shapley_by_orders(g);
  const RebateVector lib = shapley_permutation_oracle(g);
  for (int i = 0; i < 3; ++i) {
    CHECK(phi[i] == doctest::Approx(orders[i]).epsilon(1e-12));
    CHECK(lib[i] == doctest::Approx(orders[i]).epsilon(1e-12));
  }
  for (const Game& h : sample_games(17, 40, 1, 7)) {
    const RebateVector s = shapley(h);
    const auto o = oracle::shapley_by_orders(h);
    const RebateVector p = shapley_permutation_oracle(h);
    for (int i = 0; i < h.players(); ++i) {
      REQUIRE(std::abs(s[i] - o[i]) <= 1e-9);
      REQUIRE(std::abs(p[i] - o[i]) <= 1e-9);
    }
  }
  CHECK(shapley_permutation_oracle(Game::make(1, {0, 3}))[0] == 3.0);
  CHECK_THROWS_AS(shapley_permutation_oracle(unanimity_game(10, 1)), ValidationError);
}

TEST_CASE("shapley axioms on samples") {
  const auto games = sample_games(23, 60, 2, 6);
  for (std::size_t t = 0; t + 1 < games.size(); ++t) {
    const Game& v = games[t];
    const RebateVector phi = shapley(v);
    REQUIRE(phi.total() == doctest::Approx(v.grand_value()).epsilon(1e-9));
    if (games[t + 1].players() == v.players()) {
      const Game& w = games[t + 1];
      const RebateVector sum = shapley(v + w);
      const RebateVector pw = shapley(w);
      for (int i = 0; i < v.players(); ++i) REQUIRE(std::abs(sum[i] - phi[i] - pw[i]) <= 1e-9);
    }
  }
  // Symmetry and null player on unanimity games with an extra null player.
  const RebateVector phi = shapley(unanimity_game(5, 0b00111));
  CHECK(phi[0] == phi[1]);
  CHECK(phi[1] == phi[2]);
  CHECK(phi[3] == 0.0);
  CHECK(phi[4] == 0.0);
}

TEST_CASE("banzhaf values") {
  SUBCASE("deficit game") {
    const Game g = banzhaf_deficit_game();
    const RebateVector b = banzhaf(g);
    CHECK(b[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(b[2] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(b.total() == doctest::Approx(5.5).epsilon(1e-12));
    CHECK(banzhaf_welfare_formula(g) == doctest::Approx(5.5).epsilon(1e-12));
  }
  SUBCASE("additive game") {
    const std::vector<double> a{3.0, 0.0, 1.5};
    const RebateVector b = banzhaf(additive_game(a));
    for (int i = 0; i < 3; ++i) CHECK(b[i] == doctest::Approx(a[i]));
  }
  SUBCASE("two players coincide with shapley") {
    for (const Game& g : sample_games(31, 20, 2, 2)) {
      const RebateVector b = banzhaf(g);
      const RebateVector s = shapley(g);
      CHECK(b[0] == doctest::Approx(s[0]).epsilon(1e-12));
      CHECK(b[1] == doctest::Approx(s[1]).epsilon(1e-12));
    }
  }
  SUBCASE("definition oracle and welfare formula") {
    for (const Game& g : sample_games(37, 60, 1, 8)) {
      const RebateVector b = banzhaf(g);
      const auto o = oracle::banzhaf_by_definition(g);
      for (int i = 0; i < g.players(); ++i) REQUIRE(std::abs(b[i] - o[i]) <= 1e-9);
      REQUIRE(std::abs(banzhaf_welfare_formula(g) - b.total()) <= 1e-9);
    }
    CHECK(banzhaf_welfare_formula(unanimity_game(1, 1)) == 1.0);
    CHECK(banzhaf_welfare_formula(Game::make(3, std::vector<double>(8, 0.0))) == 0.0);
  }
  SUBCASE("sybil-proof optimal equality on unanimity games") {
    for (int n = 1; n <= 6; ++n) {
      for (Coalition r = 1; r <= full_coalition(n); ++r) {
        const RebateVector b = banzhaf(unanimity_game(n, r));
        for (int i : members(r)) REQUIRE(b[i] == 1.0 / two_pow(cardinality(r) - 1));
      }
    }
  }
}

TEST_CASE("banzhaf resists copy and split attacks") {
  for (const Game& g : sample_games(41, 120, 1, 5)) {
    const RebateVector base = banzhaf(g);
    for (int i = 0; i < g.players(); ++i) {
      for (int k = 1; k <= 3; ++k) {
        for (const SybilExtension& ext : {copy_extension(g, i, k), split_extension(g, i, k)}) {
          REQUIRE(ext.attacker_payoff(banzhaf(ext.extended)) <= base[i] + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("banzhaf_clamped never runs a deficit") {
  const RebateVector b = banzhaf_clamped(banzhaf_deficit_game());
  CHECK(b.total() == doctest::Approx(5.0));
  for (const Game& g : sample_games(43, 60, 2, 5)) REQUIRE(banzhaf_clamped(g).total() <= g.grand_value() + 1e-9);
}

TEST_CASE("theta is the minimal marginal contribution") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const RebateVector add = theta(additive_game(a));
  for (int i = 0; i < 3; ++i) CHECK(add[i] == a[i]);

  const RebateVector u = theta(unanimity_game(4, 0b0111));
  for (int i = 0; i < 4; ++i) CHECK(u[i] == 0.0);

  const RebateVector d = theta(banzhaf_deficit_game());
  CHECK(d[0] == 1.0);
  CHECK(d[1] == 1.0);
  CHECK(d[2] == 1.0);
  CHECK(d.total() <= 5.0);
}

TEST_CASE("strong monotonicity spot check") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> bump(0.0, 1.0);
  for (const Game& w : sample_games(53, 30, 2, 4)) {
    const int n = w.players();
    const int i = static_cast<int>(rng() % n);
    const double c = bump(rng);
    std::vector<double> values(w.values().begin(), w.values().end());
    for (Coalition s = 0; s <= w.grand_coalition(); ++s) {
      if (contains(s, i)) values[s] += c * cardinality(s);
    }
    const Game v = Game::make(n, values, true);
    REQUIRE(banzhaf(v)[i] >= banzhaf(w)[i] - 1e-12);
    REQUIRE(psi(v).payments[i] >= psi(w).payments[i] - 1e-9);
  }
}

TEST_CASE("psi on scaled unanimity games is exact") {
  for (int n = 1; n <= 6; ++n) {
    const double c = 0.5 + n;
    const OperatorReport r = psi(unanimity_game(n, full_coalition(n)).scaled(c));
    REQUIRE(r.bounds.has_value());
    for (int i = 0; i < n; ++i) {
      CHECK(r.payments[i] == doctest::Approx(c / two_pow(n - 1)).epsilon(1e-12));
      CHECK((*r.bounds)[i].upper == doctest::Approx(c / two_pow(n - 1)));
    }
  }
  const OperatorReport zero = psi(Game::make(3, std::vector<double>(8, 0.0)));
  for (double x : zero.payments) CHECK(x == 0.0);
}

TEST_CASE("psi bounds and psi_bar guarantees on random games") {
  for (const Game& g : sample_games(59, 60, 2, 5)) {
    const int n = g.players();
    const double scale = two_pow(n - 1);
    const OperatorReport p = psi(g);
    const RebateVector phi = shapley(g);
    const RebateVector th = theta(g);
    const OperatorReport pb = psi_bar(g);
    REQUIRE(p.welfare == doctest::Approx(p.payments.total()));
    REQUIRE(p.payments.total() <= n * g.grand_value() / scale + 1e-9);
    for (int i = 0; i < n; ++i) {
      REQUIRE(p.payments[i] <= g.grand_value() / scale + 1e-9);
      REQUIRE(p.payments[i] >= phi[i] / scale - 1e-9);
      const double expected = std::max(p.payments[i], th[i]) / (1.0 + n / scale);
      REQUIRE(pb.payments[i] == doctest::Approx(expected).epsilon(1e-12));
      REQUIRE(pb.payments[i] >= th[i] / (1.0 + n / scale) - 1e-9);
    }
    REQUIRE(pb.payments.total() <= g.grand_value() + 1e-9);
  }
}

TEST_CASE("psi_bar on symmetric and additive games") {
  for (int n = 2; n <= 5; ++n) {
    const double scale = two_pow(n - 1);
    const OperatorReport r = psi_bar(unanimity_game(n, full_coalition(n)));
    for (int i = 0; i < n; ++i) {
      CHECK(r.payments[i] == doctest::Approx((1.0 / scale) / (1.0 + n / scale)));
    }
  }
  const std::vector<double> a{2.0, 1.0, 4.0};
  const OperatorReport r = psi_bar(additive_game(a));
  for (int i = 0; i < 3; ++i) CHECK(r.payments[i] == doctest::Approx(a[i] / (1.0 + 3.0 / 4.0)));
}

TEST_CASE("psi lower bounds grow with the search budget") {
  for (const Game& g : sample_games(61, 15, 2, 4)) {
    std::vector<double> previous(g.players(), 0.0);
    for (int k = 1; k <= 4; ++k) {
      PsiSearch search;
      search.k_max = k;
      const OperatorReport r = psi(g, search);
      for (int i = 0; i < g.players(); ++i) {
        REQUIRE(r.payments[i] >= previous[i] - 1e-12);
        previous[i] = r.payments[i];
      }
    }
  }
}

TEST_CASE("pro rata") {
  const std::vector<double> half{0.5, 0.5};
  const std::vector<double> all{1.0, 0.0};
  CHECK(pro_rata(half, 10.0)[0] == 5.0);
  CHECK(pro_rata(all, 7.0)[0] == 7.0);
  CHECK(pro_rata(all, 7.0)[1] == 0.0);
  const std::vector<double> bad{0.7, 0.7};
  const std::vector<double> negative{1.5, -0.5};
  CHECK_THROWS_AS(pro_rata(bad, 1.0), ValidationError);
  CHECK_THROWS_AS(pro_rata(negative, 1.0), ValidationError);
}

TEST_CASE("optimal sybil strategy") {
  SUBCASE("shapley split attack on a unanimity member diverges") {
    const SybilAttackReport r =
        optimal_sybil_strategy(unanimity_game(3, 0b111), 0, OperatorId::kShapley, AttackFamily::kSplit, 6);
    REQUIRE(r.payoffs.size() == 7);
    for (int m = 0; m <= 6; ++m) CHECK(r.payoffs[m] == doctest::Approx((m + 1.0) / (3.0 + m)));
    CHECK(r.divergent);
    CHECK(r.best_k == 6);
    CHECK(r.profitable());
  }
  SUBCASE("shapley copy attack on the or-game is profitable") {
    std::vector<double> values(16, 1.0);
    values[0] = 0.0;
    const Game any = Game::make(4, values, true);
    const SybilAttackReport r = optimal_sybil_strategy(any, 0, OperatorId::kShapley, AttackFamily::kCopy, 3);
    CHECK(r.payoffs[1] == doctest::Approx(2.0 / 5.0));
    CHECK(r.profitable());
  }
  SUBCASE("banzhaf has no profitable copy or split attack") {
    for (const Game& g : sample_games(67, 20, 2, 4)) {
      for (AttackFamily f : {AttackFamily::kCopy, AttackFamily::kSplit}) {
        const SybilAttackReport r = optimal_sybil_strategy(g, 0, OperatorId::kBanzhaf, f, 3);
        REQUIRE(r.best_k == 0);
        REQUIRE_FALSE(r.profitable());
      }
    }
  }
  SUBCASE("banzhaf loses to a copy followed by a split") {
    // On v({1}) = 1 the chain yields v = [c or (1 and s)], worth 3/4 + 1/4 + 1/4 to the attacker.
    const SybilAttackReport r =
        optimal_sybil_strategy(Game::make(1, {0, 1}), 0, OperatorId::kBanzhaf, AttackFamily::kMixed, 2);
    CHECK(r.payoffs[0] == doctest::Approx(1.0));
    CHECK(r.payoffs[2] == doctest::Approx(1.25));
    CHECK(r.best_k == 2);
    REQUIRE(r.chains[2].size() == 2);
  }
  SUBCASE("shapley payoffs are flat on additive games") {
    const std::vector<double> a{2.0, 1.0, 3.0};
    for (AttackFamily f : {AttackFamily::kCopy, AttackFamily::kSplit}) {
      const SybilAttackReport r = optimal_sybil_strategy(additive_game(a), 0, OperatorId::kShapley, f, 3);
      for (double x : r.payoffs) CHECK(x == doctest::Approx(2.0));
      CHECK(r.best_k == 0);
    }
  }
}

TEST_CASE("operator names roundtrip") {
  for (OperatorId op : all_operators()) CHECK(parse_operator(to_string(op)) == op);
  CHECK_THROWS_AS(parse_operator("nucleolus"), ValidationError);
}
