// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mevr/auctions.hpp"
#include "mevr/audit.hpp"
#include "mevr/cfmm.hpp"
#include "mevr/game.hpp"
#include "mevr/operators.hpp"
#include "mevr/prior.hpp"
#include "mevr/regressions.hpp"
#include "mevr/sybil.hpp"
#include "oracles.hpp"

using namespace mevr;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Checker {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && v_.pass) {
      v_.pass = false;
      v_.detail = what;
    }
  }
  void note(const std::string& s) {
    if (v_.pass) v_.detail = s;
  }
  Verdict verdict() const { return v_; }

 private:
  Verdict v_;
};

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(12);
  ss << x;
  return ss.str();
}

double two_pow(int e) { return std::ldexp(1.0, e); }

Verdict banzhaf_deficit() {
  Checker c;
  const RebateVector b = banzhaf(banzhaf_deficit_game());
  const double expected[] = {1.5, 2.5, 1.5};
  for (int i = 0; i < 3; ++i) c.require(std::abs(b[i] - expected[i]) <= 1e-12, "beta_" + std::to_string(i + 1) + " = " + fmt(b[i]));
  c.require(std::abs(b.total() - 5.5) <= 1e-12, "sum = " + fmt(b.total()));
  c.require(b.total() > 5.0, "no deficit");
  c.note("beta = (" + fmt(b[0]) + ", " + fmt(b[1]) + ", " + fmt(b[2]) + "), sum 5.5 > v(N) = 5");
  return c.verdict();
}

Verdict shapley_exploit() {
  Checker c;
  const SybilAttackReport r =
      optimal_sybil_strategy(unanimity_game(3, 0b111), 0, OperatorId::kShapley, AttackFamily::kSplit, 6);
  // payoffs[m] belongs to k = m + 1 identities in total.
  for (int m = 1; m <= 6; ++m) {
    c.require(r.payoffs[m] > 1.0 / 3.0 + 1e-12, "k = " + std::to_string(m + 1) + " not profitable");
    c.require(r.payoffs[m] > r.payoffs[m - 1] + 1e-12, "not increasing at k = " + std::to_string(m + 1));
  }
  c.require(r.divergent, "divergence flag not set");
  c.note("extended game w_{R u K} (split family): payoff " + fmt(r.payoffs[1]) + " at k = 2 rising to " +
         fmt(r.payoffs[6]) + " at k = 7, divergent");
  return c.verdict();
}

Verdict banzhaf_sybil_sweep() {
  Checker c;
  std::mt19937_64 rng(2023);
  int checks = 0;
  int violations = 0;
  for (int t = 0; t < 200; ++t) {
    const Game g = random_monotone_game(1 + t % 5, rng);
    const RebateVector base = banzhaf(g);
    for (int i = 0; i < g.players(); ++i) {
      for (int k = 1; k <= 3; ++k) {
        for (const SybilExtension& ext : {copy_extension(g, i, k), split_extension(g, i, k)}) {
          ++checks;
          if (ext.attacker_payoff(banzhaf(ext.extended)) > base[i] + 1e-9) ++violations;
        }
      }
    }
  }
  c.require(violations == 0, std::to_string(violations) + " violations");
  c.note(std::to_string(checks) + " copy/split extensions on 200 games, 0 violations");
  return c.verdict();
}

Verdict spo_equality() {
  Checker c;
  int checked = 0;
  for (Coalition r = 1; r <= full_coalition(6); ++r) {
    const RebateVector b = banzhaf(unanimity_game(6, r));
    for (int i : members(r)) {
      ++checked;
      c.require(b[i] == 1.0 / two_pow(cardinality(r) - 1), "R = " + format_coalition(r));
    }
  }
  c.note(std::to_string(checked) + " (R, i) pairs exact");
  return c.verdict();
}

const std::vector<Game>& full_sample() {
  static const std::vector<Game> games = audit_games(AuditSample{});
  return games;
}

Verdict psi_checks() {
  Checker c;
  for (int n = 1; n <= 6; ++n) {
    for (double scale : {0.5, 1.0, 3.0}) {
      const OperatorReport r = psi(unanimity_game(n, full_coalition(n)).scaled(scale));
      for (int i = 0; i < n; ++i) {
        c.require(std::abs(r.payments[i] - scale / two_pow(n - 1)) <= 1e-9, "c*w_N at n = " + std::to_string(n));
      }
    }
  }
  for (const Game& g : full_sample()) {
    const int n = g.players();
    const OperatorReport r = psi(g);
    const RebateVector phi = shapley(g);
    for (int i = 0; i < n; ++i) {
      c.require(r.payments[i] <= g.grand_value() / two_pow(n - 1) + 1e-9, "psi above v(N)/2^(n-1)");
      c.require(r.payments[i] >= phi[i] / two_pow(n - 1) - 1e-9, "psi below phi/2^(n-1)");
    }
  }
  c.note("exact on c*w_N for n <= 6; bounds hold on " + std::to_string(full_sample().size()) + " games");
  return c.verdict();
}

Verdict psi_bar_checks() {
  Checker c;
  double worst = -1e300;
  for (const Game& g : full_sample()) {
    const int n = g.players();
    const RebateVector pb = psi_bar(g).payments;
    const RebateVector th = theta(g);
    worst = std::max(worst, pb.total() - g.grand_value());
    c.require(pb.total() <= g.grand_value() + 1e-9, "deficit");
    const double alpha = 1.0 / (1.0 + n / two_pow(n - 1));
    for (int i = 0; i < n; ++i) c.require(pb[i] >= alpha * th[i] - 1e-9, "separability");
  }
  c.note("max(sum - v(N)) = " + fmt(worst) + " over " + std::to_string(full_sample().size()) + " games");
  return c.verdict();
}

Verdict prior_lp() {
  Checker c;
  for (int n = 1; n <= 10; ++n) {
    const double w = solve_prior_optimal(PriorModel::point_mass(n)).expected_welfare;
    c.require(std::abs(w - 1.0) <= 1e-7, "point mass at " + std::to_string(n) + ": " + fmt(w));
  }
  const auto rows = sweep_priors({3, 4, 5}, 0.1);
  c.require(rows.size() == 66, std::to_string(rows.size()) + " grid priors");
  for (const auto& r : rows) c.require(r.optimal_welfare >= r.prior_free_welfare - 1e-9, "dominance");
  const PriorModel mid = PriorModel::make({0, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3});
  const double opt = solve_prior_optimal(mid).expected_welfare;
  const double free = prior_free_welfare(mid);
  c.require(opt > free + 1e-4, "midpoint gap " + fmt(opt - free));
  c.note("point masses 1.0; 66 priors dominate; midpoint " + fmt(opt) + " vs " + fmt(free));
  return c.verdict();
}

Verdict cfmm_pro_rata() {
  Checker c;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::uniform_real_distribution<double> price(0.2, 5.0);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 5;
    std::vector<double> shares(n);
    double sum = 0.0;
    for (double& s : shares) sum += (s = u(rng));
    for (double& s : shares) s /= sum;
    const Pool pool = oracle::random_cp_pool(rng);
    const Game g = lp_game(shares, pool, {price(rng), price(rng)});
    const RebateVector phi = shapley(g);
    const RebateVector pr = pro_rata(shares, g.grand_value());
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(phi[i] - pr[i]));
  }
  c.require(worst <= 1e-8, "max gap " + fmt(worst));
  c.note("20 pools, max |shapley - pro rata| = " + fmt(worst));
  return c.verdict();
}

Verdict token_d() {
  Checker c;
  const Game g = graph_game(triangle_graph());
  const double v = g.grand_value();
  const TokenSplitReport s = idealized_token_split(g, 0, OperatorId::kShapley);
  const RebateVector before = shapley(g);
  const RebateVector after = shapley(s.after);
  for (int i = 0; i < 3; ++i) c.require(std::abs(before[i] - v / 3) <= 1e-12, "before != v/3");
  c.require(std::abs(after[1] - v / 4) <= 1e-12 && std::abs(after[2] - v / 4) <= 1e-12, "honest != v/4");
  c.require(std::abs(s.after_payoff - v / 2) <= 1e-12, "attacker != v/2");
  const TokenSplitReport b = idealized_token_split(g, 0, OperatorId::kBanzhaf);
  c.require(b.after_payoff <= b.before_payoff + 1e-12, "banzhaf payoff rose");
  const TokenSplitReport pool_level = token_split_attack(triangle_graph(), 0, OperatorId::kShapley);
  c.require(std::abs(pool_level.after_payoff - v / 2) <= 1e-9, "pool-level split != v/2");
  c.note("v = " + fmt(v) + ": shapley v/3 -> v/4, v/4 and v/2 for the attacker; banzhaf " +
         fmt(b.before_payoff) + " -> " + fmt(b.after_payoff));
  return c.verdict();
}

Verdict truthfulness() {
  Checker c;
  const ProbeReport my = truthfulness_probe(Mechanism::kMyerson, 1000, 42);
  const ProbeReport mm = truthfulness_probe(Mechanism::kMevMax, 1000, 43);
  const ProbeReport pb = truthfulness_probe(Mechanism::kPayYourBid, 1000, 44);
  c.require(my.violations == 0, "myerson violations " + std::to_string(my.violations));
  c.require(mm.violations == 0, "mev_max violations " + std::to_string(mm.violations));
  c.require(pb.violations >= 1 && pb.witness.has_value(), "control found nothing");
  c.note("myerson 0/1000, mev_max 0/1000, pay-your-bid " + std::to_string(pb.violations) + "/1000");
  return c.verdict();
}

Verdict auction_counterexamples() {
  Checker c;
  const SybilSplitReport s = sybil_split_scenario(0.01);
  c.require(std::abs(s.payment_before - 1.0) <= 1e-12, "p_2 = " + fmt(s.payment_before));
  c.require(s.payments_after.first == 0.0 && s.payments_after.second == 0.0, "post-split payments nonzero");
  const NegativeResultReport n = negative_result_scenario(1.0);
  c.require(std::abs(n.deficit - 1.0) <= 1e-12, "deficit = " + fmt(n.deficit));
  c.note("p_2 = 1 -> (0, 0); complementary pair deficit " + fmt(n.deficit));
  return c.verdict();
}

Verdict oracle_equivalences() {
  Checker c;
  std::ostringstream detail;

  std::mt19937_64 rng(314);
  int shapley_games = 0;
  for (int t = 0; t < 70; ++t) {
    const Game g = random_monotone_game(1 + t % 7, rng);
    const RebateVector s = shapley(g);
    const auto o = oracle::shapley_by_orders(g);
    for (int i = 0; i < g.players(); ++i) c.require(std::abs(s[i] - o[i]) <= 1e-9, "shapley oracle");
    ++shapley_games;
  }
  for (int n = 1; n <= 6; ++n) {
    for (Coalition r = 1; r <= full_coalition(n); ++r) {
      const Game g = unanimity_game(n, r);
      const RebateVector s = shapley(g);
      const auto o = oracle::shapley_by_orders(g);
      for (int i = 0; i < n; ++i) c.require(std::abs(s[i] - o[i]) <= 1e-9, "shapley oracle (unanimity)");
      ++shapley_games;
    }
  }
  detail << "shapley " << shapley_games << " games";

  std::uniform_real_distribution<double> bid(0.0, 10.0);
  int winners = 0;
  for (int t = 0; t < 100; ++t) {
    AuctionInstance inst;
    const int n = 2 + t % 4;
    for (int i = 0; i < n; ++i) inst.bids.push_back(bid(rng));
    std::vector<std::pair<int, int>> conflicts;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng() % 5 < 2) conflicts.emplace_back(i, j);
      }
    }
    inst.family = FeasibleFamily::from_conflicts(n, conflicts);
    const bool mev = t % 2 == 1;
    inst.oracle = mev ? random_monotone_game(n, rng) : Game::make(n, std::vector<double>(1U << n, 0.0));
    const Mechanism m = mev ? Mechanism::kMevMax : Mechanism::kMyerson;
    const Outcome o = run_mechanism(inst, m);
    for (int i = 0; i < n; ++i) {
      if (!contains(o.allocation, i)) continue;
      ++winners;
      c.require(std::abs(o.payments[i] - oracle::bisect_threshold(inst, m, i)) <= 1e-9, "threshold vs bisection");
    }
  }
  detail << "; thresholds " << winners << " winners";

  std::uniform_real_distribution<double> price(0.2, 5.0);
  std::uniform_real_distribution<double> reserve(20.0, 500.0);
  const std::string tokens[] = {"N", "A", "B"};
  for (int t = 0; t < 50; ++t) {
    Pool pool = oracle::random_cp_pool(rng);
    if (t % 2) {
      pool.kind = PoolKind::kWeightedGeometric;
      pool.weight = 0.25 + 0.5 * std::uniform_real_distribution<double>(0, 1)(rng);
    }
    const ArbInstance inst{pool, {price(rng), price(rng)}};
    const double lib = arb(inst).profit;
    const double grid = oracle::grid_arb(inst, 200'000);
    c.require(std::abs(lib - grid) <= 1e-6 * std::max(1.0, grid), "arb vs grid");

    TokenGraph g{"N", {}};
    for (int k = 0; k < 2 + t % 3; ++k) {
      const int a = static_cast<int>(rng() % 3);
      const int b = (a + 1 + static_cast<int>(rng() % 2)) % 3;
      Pool p;
      p.pair = {tokens[a], tokens[b]};
      p.reserves = {reserve(rng), reserve(rng)};
      p.owner = k;
      g.pools.push_back(p);
    }
    const double cyc = cyclic_arb(g, 4).profit;
    const double cyc_grid = oracle::grid_cyclic_arb(g, 4, 20'000);
    c.require(std::abs(cyc - cyc_grid) <= 1e-6 * std::max(1.0, cyc_grid), "cyclic arb vs grid");
  }
  detail << "; arb 50 + cyclic 50";

  const std::vector<std::vector<double>> priors{{0, 0.5, 0.5}, {0.2, 0.3, 0.5}, {0, 0, 0.6, 0.4}, {0, 0.3, 0.3, 0.4}};
  for (const auto& p : priors) {
    const PriorModel prior = PriorModel::make(p);
    const double lp = solve_prior_optimal(prior).expected_welfare;
    const double grid = oracle::grid_prior_optimum(p, 0.01, prior.y_max());
    c.require(lp >= grid - 1e-9 && lp - grid <= 0.02, "prior LP vs grid");
  }
  detail << "; prior LP 4 priors";

  for (int t = 0; t < 100; ++t) {
    const Game g = random_monotone_game(1 + t % 6, rng);
    const Game back = reconstruct_from_coefficients(unanimity_coefficients(g));
    for (Coalition s = 0; s <= g.grand_coalition(); ++s) c.require(std::abs(back(s) - g(s)) <= 1e-9, "roundtrip");
  }
  detail << "; roundtrip 100 games";
  c.note(detail.str());
  return c.verdict();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"Banzhaf deficit on the three-player game", banzhaf_deficit},
      {"Shapley Sybil exploit on w_R, |R| = 3", shapley_exploit},
      {"Banzhaf copy/split Sybil-proofness sweep", banzhaf_sybil_sweep},
      {"Sybil-proof-optimal equality of Banzhaf on w_R", spo_equality},
      {"psi exact on scaled unanimity games and bounded on the sample", psi_checks},
      {"psi_bar no deficit and separability", psi_bar_checks},
      {"prior-optimal rebate LP", prior_lp},
      {"CFMM LP game pays pro rata", cfmm_pro_rata},
      {"token D split on the triangle", token_d},
      {"auction truthfulness probe", truthfulness},
      {"auction split and deficit counterexamples", auction_counterexamples},
      {"oracle equivalences", oracle_equivalences},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::printf("%s  %2zu  %s: %s (%.2fs)\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                v.detail.c_str(), secs);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
