#include "mevr/regressions.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "mevr/auctions.hpp"
#include "mevr/audit.hpp"
#include "mevr/cfmm.hpp"
#include "mevr/game.hpp"
#include "mevr/operators.hpp"
#include "mevr/prior.hpp"
#include "mevr/sybil.hpp"

namespace mevr {
namespace {

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

std::string show(std::span<const double> xs) {
  std::ostringstream out;
  out.precision(12);
  out << '(';
  for (std::size_t k = 0; k < xs.size(); ++k) out << (k ? ", " : "") << xs[k];
  out << ')';
  return out.str();
}

std::string show(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

using Check = std::function<RegressionResult()>;

RegressionResult result(std::string name, bool pass, std::string detail) {
  return {std::move(name), pass, std::move(detail)};
}

std::vector<Game> seeded_games(int count, int min_n, int max_n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Game> out;
  for (int k = 0; k < count; ++k) {
    out.push_back(random_monotone_game(min_n + k % (max_n - min_n + 1), rng));
  }
  return out;
}

std::vector<Check> checks() {
  std::vector<Check> c;

  c.push_back([] {
    const Game g = banzhaf_deficit_game();
    const RebateVector b = banzhaf(g);
    const bool ok = near(b[0], 1.5, 1e-12) && near(b[1], 2.5, 1e-12) && near(b[2], 1.5, 1e-12) &&
                    near(b.total(), 5.5, 1e-12) && g.grand_value() == 5.0;
    return result("banzhaf deficit game: beta = (1.5, 2.5, 1.5), welfare 5.5 > 5", ok,
                  "beta = " + show(b.payments()) + ", welfare " + show(b.total()));
  });

  c.push_back([] {
    const double m = marginal_contribution(banzhaf_deficit_game(), 0, 0b110);
    return result("deficit game: marginal of player 1 to {2,3} is 1", near(m, 1.0), show(m));
  });

  c.push_back([] {
    const Game w = unanimity_game(3, 0b111);
    bool ok = true;
    for (Coalition s = 0; s < 8; ++s) ok = ok && w(s) == (s == 0b111 ? 1.0 : 0.0);
    return result("unanimity game on {1,2,3} is 1 only at N", ok, show(w.values()));
  });

  c.push_back([] {
    bool ok = true;
    for (int n = 1; n <= 5; ++n) {
      for (Coalition r = 1; r <= full_coalition(n); ++r) {
        const RebateVector phi = shapley(unanimity_game(n, r));
        for (int i = 0; i < n; ++i) {
          ok = ok && near(phi[i], contains(r, i) ? 1.0 / cardinality(r) : 0.0);
        }
      }
    }
    return result("shapley on w_R pays 1/|R| inside R", ok, "all R, n <= 5");
  });

  c.push_back([] {
    const double a[] = {0.5, 2.0, 1.25, 3.0};
    const Game g = additive_game(a);
    const RebateVector phi = shapley(g);
    const RebateVector beta = banzhaf(g);
    bool ok = true;
    for (int i = 0; i < 4; ++i) ok = ok && near(phi[i], a[i]) && near(beta[i], a[i]);
    return result("additive game: shapley = banzhaf = singleton values", ok,
                  "phi = " + show(phi.payments()));
  });

  c.push_back([] {
    bool ok = true;
    for (const Game& g : seeded_games(20, 2, 2, 7)) {
      const RebateVector phi = shapley(g);
      const RebateVector beta = banzhaf(g);
      ok = ok && near(phi[0], beta[0]) && near(phi[1], beta[1]);
    }
    return result("two players: banzhaf equals shapley", ok, "20 seeded games");
  });

  c.push_back([] {
    bool ok = true;
    for (int k = 1; k <= 3; ++k) {
      const SybilExtension ext = split_extension(unanimity_game(3, 0b011), 0, k);
      const Coalition r = 0b011 | (full_coalition(3 + k) & ~full_coalition(3));
      ok = ok && ext.extended.values().size() == (std::size_t{1} << (3 + k)) &&
           std::equal(ext.extended.values().begin(), ext.extended.values().end(),
                      unanimity_game(3 + k, r).values().begin());
    }
    return result("split of a player in R turns w_R into w_{R u K}", ok, "k = 1..3");
  });

  c.push_back([] {
    const Game g = banzhaf_deficit_game();
    const MergedGame m = reduced_game(g, g.grand_coalition());
    const bool ok = m.game.players() == 1 && m.game(1) == g.grand_value();
    return result("merging N gives the one-player game v({p}) = v(N)", ok,
                  "v({p}) = " + show(m.game(1)));
  });

  c.push_back([] {
    const SybilAttackReport r =
        optimal_sybil_strategy(unanimity_game(3, 0b111), 0, OperatorId::kShapley,
                               AttackFamily::kSplit, 6);
    bool ok = r.divergent && r.profitable();
    for (int k = 1; k <= 6; ++k) {
      ok = ok && r.payoffs[k] > 1.0 / 3.0 && r.payoffs[k] > r.payoffs[k - 1] &&
           near(r.payoffs[k], (k + 1.0) / (3.0 + k));
    }
    return result("shapley sybil exploit on w_R, |R| = 3: payoff (k+1)/(3+k), divergent", ok,
                  "payoffs " + show(r.payoffs));
  });

  c.push_back([] {
    bool ok = true;
    for (const Game& g : seeded_games(20, 2, 4, 11)) {
      for (int i = 0; i < g.players(); ++i) {
        for (AttackFamily f : {AttackFamily::kCopy, AttackFamily::kSplit}) {
          ok = ok && optimal_sybil_strategy(g, i, OperatorId::kBanzhaf, f, 3).best_k == 0;
        }
      }
    }
    return result("banzhaf: no profitable sybil attack", ok, "20 seeded games, k <= 3");
  });

  c.push_back([] {
    const Axiom nd[] = {Axiom::kNoDeficit};
    const Game games[] = {banzhaf_deficit_game()};
    const auto a = audit_games(OperatorId::kBanzhaf, nd, games, AuditSample{});
    const bool ok = !a[0].pass && a[0].witness && a[0].witness->games.front() == games[0];
    return result("audit: banzhaf fails ND on the deficit game", ok,
                  a[0].witness ? a[0].witness->description : "no witness");
  });

  c.push_back([] {
    const Axiom sp[] = {Axiom::kSybilProof};
    const Game games[] = {unanimity_game(2, 0b11)};
    const auto a = audit_games(OperatorId::kShapley, sp, games, AuditSample{});
    return result("audit: shapley fails SP on w_{1,2}", !a[0].pass && a[0].witness.has_value(),
                  a[0].witness ? a[0].witness->description : "no witness");
  });

  c.push_back([] {
    const Axiom axioms[] = {Axiom::kSymmetry, Axiom::kTwoEfficiency, Axiom::kMarginality};
    const auto a = audit(OperatorId::kBanzhaf, axioms);
    bool ok = true;
    for (const auto& x : a) ok = ok && x.pass;
    return result("audit: banzhaf passes S, 2-EF and M on the full sample", ok,
                  std::to_string(a[0].games_checked) + " games");
  });

  c.push_back([] {
    const Axiom gsp[] = {Axiom::kGeneralSybilProof};
    const auto a = audit(OperatorId::kShapley, gsp, trilemma_sample());
    return result("audit: shapley fails GSP", !a[0].pass,
                  a[0].witness ? a[0].witness->description : "no witness");
  });

  c.push_back([] {
    bool ok = true;
    for (int n = 1; n <= 6; ++n) {
      const double scale = 1.5 + n;
      const OperatorReport r = psi(unanimity_game(n, full_coalition(n)).scaled(scale));
      for (int i = 0; i < n; ++i) ok = ok && near(r.payments[i], scale / std::ldexp(1.0, n - 1));
    }
    return result("psi on c * w_N pays c / 2^(n-1)", ok, "n = 1..6");
  });

  c.push_back([] {
    bool ok = true;
    for (const Game& g : seeded_games(40, 2, 4, 13)) {
      const RebateVector phi = shapley(g);
      const OperatorReport r = psi(g);
      const double scale = std::ldexp(1.0, g.players() - 1);
      for (int i = 0; i < g.players(); ++i) ok = ok && r.payments[i] >= phi[i] / scale - 1e-9;
    }
    return result("psi >= shapley / 2^(n-1)", ok, "40 seeded games");
  });

  c.push_back([] {
    bool ok = true;
    double worst = -1e300;
    for (const Game& g : seeded_games(200, 2, 5, 17)) {
      const double gap = psi_bar(g).payments.total() - g.grand_value();
      worst = std::max(worst, gap);
      ok = ok && gap <= 1e-9;
    }
    return result("psi_bar runs no deficit", ok, "max(sum - v(N)) = " + show(worst));
  });

  c.push_back([] {
    bool ok = true;
    for (int n = 1; n <= 10; ++n) {
      const RebatePolicy p = solve_prior_optimal(PriorModel::point_mass(n));
      ok = ok && near(p.expected_welfare, 1.0, 1e-7) && near(p.share(n), 1.0, 1e-7);
      for (int k = 1; k <= n; ++k) ok = ok && (k == n || p.share(k) == 0.0);
    }
    return result("prior LP: a point mass has welfare 1", ok, "n = 1..10");
  });

  c.push_back([] {
    const bool ok = near(prior_free_bound(3), 0.75, 0.0);
    return result("prior-free bound at n = 3 is 3/4", ok, show(prior_free_bound(3)));
  });

  c.push_back([] {
    const PriorModel prior = PriorModel::make({0.0, 0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3});
    const double opt = solve_prior_optimal(prior).expected_welfare;
    const double free = prior_free_welfare(prior);
    return result("prior LP beats the prior-free policy inside the {3,4,5} simplex",
                  opt > free + 1e-4, "optimal " + show(opt) + " vs prior-free " + show(free));
  });

  c.push_back([] {
    const Pool pool{{"X", "Y"}, {100.0, 100.0}, PoolKind::kConstantProduct, 0.5, 0};
    Pool weighted = pool;
    weighted.kind = PoolKind::kWeightedGeometric;
    weighted.weight = 0.3;
    bool ok = true;
    for (const Pool& p : {pool, weighted}) {
      const double base = arb({p, {1.0, 4.0}}).profit;
      for (double lambda : {0.5, 2.0, 10.0}) {
        ok = ok && std::abs(arb({p.scaled(lambda), {1.0, 4.0}}).profit - lambda * base) <=
                       1e-8 * lambda * base;
      }
    }
    return result("arbitrage profit is 1-homogeneous in the reserves", ok, "cp and wg(0.3)");
  });

  c.push_back([] {
    const Pool pool{{"X", "Y"}, {100.0, 250.0}, PoolKind::kConstantProduct, 0.5, 0};
    const double shares[] = {0.1, 0.2, 0.3, 0.4};
    const Game g = lp_game(shares, pool, {2.0, 1.0});
    const RebateVector phi = shapley(g);
    const RebateVector pr = pro_rata(shares, g.grand_value());
    bool ok = classify(g, 1e-9).additive;
    for (int i = 0; i < 4; ++i) ok = ok && near(phi[i], pr[i]);
    return result("LP game is additive and shapley equals pro-rata", ok,
                  "phi = " + show(phi.payments()));
  });

  c.push_back([] {
    const Game g = graph_game(triangle_graph());
    const double v = g.grand_value();
    const RebateVector phi = shapley(g);
    bool ok = v > 0.0;
    for (Coalition s = 1; s < 7; ++s) ok = ok && g(s) == 0.0;
    for (int i = 0; i < 3; ++i) ok = ok && near(phi[i], v / 3.0);
    return result("triangle pools: shapley pays v/3 each", ok, "v = " + show(v));
  });

  c.push_back([] {
    const Game g = graph_game(triangle_graph());
    const double v = g.grand_value();
    const TokenSplitReport ideal = idealized_token_split(g, 0, OperatorId::kShapley);
    const RebateVector phi = shapley(ideal.after);
    const TokenSplitReport pools = token_split_attack(triangle_graph(), 0, OperatorId::kShapley);
    const bool ok = near(phi[1], v / 4) && near(phi[2], v / 4) && near(ideal.after_payoff, v / 2) &&
                    near(ideal.before_payoff, v / 3) && near(pools.after_payoff, v / 2, 1e-7) &&
                    pools.profitable();
    return result("token D split: shapley v/3 -> v/2, honest owners v/4", ok,
                  "idealized " + show(ideal.after_payoff) + ", pool-level " +
                      show(pools.after_payoff) + ", v/2 = " + show(v / 2));
  });

  c.push_back([] {
    const std::pair<int, int> conflict[] = {{0, 1}};
    AuctionInstance inst;
    inst.bids = {1.0, 1.01};
    inst.family = FeasibleFamily::from_conflicts(2, conflict);
    inst.oracle = Game::make(2, {0, 0, 0, 0});
    const Outcome o = myerson_allocate(inst);
    return result("myerson: bids (1, 1+eps) allocate {2} with payment 1",
                  o.allocation == 0b10 && near(o.payments[1], 1.0),
                  "p = " + show(o.payments));
  });

  c.push_back([] {
    const NonComparabilityReport r = non_comparability();
    const auto& w = r.mev_max_better;
    const double b1 = w.instance.bids[0];
    const double b2 = w.instance.bids[1];
    const double v = w.instance.oracle(0b01);
    const bool ok = w.mev_max.allocation == 0b01 && near(w.mev_max.welfare, b1 + v - b2) &&
                    near(w.myerson.welfare, b2 - b1) && w.mev_max.welfare > w.myerson.welfare;
    return result("mev_max user welfare b1 + v - b2 exceeds myerson's b2 - b1", ok,
                  show(w.mev_max.welfare) + " vs " + show(w.myerson.welfare));
  });

  c.push_back([] {
    const SybilSplitReport r = sybil_split_scenario(0.01);
    const bool ok = near(r.payment_before, 1.0) && near(r.utility_before, 0.01) &&
                    r.after.allocation == 0b110 && r.payments_after.first == 0.0 &&
                    r.payments_after.second == 0.0 && r.profitable();
    return result("block auction sybil split: payment 1 -> (0, 0)", ok,
                  "utility " + show(r.utility_before) + " -> " + show(r.utility_after));
  });

  c.push_back([] {
    const NegativeResultReport r = negative_result_scenario(1.0);
    const bool ok = r.welfare_positive.allocation == 0b11 &&
                    near(r.welfare_positive.payments[0], -1.0) &&
                    near(r.welfare_positive.payments[1], -1.0) && r.welfare_positive.deficit &&
                    near(r.deficit, 1.0) && r.empty.welfare == 0.0 && !r.empty.deficit;
    return result("complementary pair: rebates 2 against value 1, deficit 1", ok,
                  "deficit " + show(r.deficit));
  });

  return c;
}

}  // namespace

Game banzhaf_deficit_game() {
  return Game::make(3, {0.0, 1.0, 1.0, 4.0, 1.0, 2.0, 4.0, 5.0}, true);
}

std::vector<RegressionResult> published_regressions() {
  std::vector<RegressionResult> out;
  for (const Check& check : checks()) {
    try {
      out.push_back(check());
    } catch (const std::exception& e) {
      out.push_back({"(threw)", false, e.what()});
    }
  }
  return out;
}

}  // namespace mevr
