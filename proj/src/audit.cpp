#include "mevr/audit.hpp"

#include <array>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>

#include "mevr/sybil.hpp"

namespace mevr {
namespace {

constexpr std::array kAxioms = {
    Axiom::kEfficiency,        Axiom::kSymmetry,         Axiom::kNullPlayer,
    Axiom::kAdditivity,        Axiom::kMarginality,      Axiom::kStrongMonotonicity,
    Axiom::kSybilProof,        Axiom::kGeneralSybilProof, Axiom::kTwoEfficiency,
    Axiom::kNoDeficit,         Axiom::kCollusionProof,   Axiom::kSeparable,
    Axiom::kSybilProofOptimal,
};

std::string num(double x) {
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

std::string who(int player) { return "player " + std::to_string(player + 1); }

// Outcome of one axiom on one game.
struct Check {
  bool applicable = true;
  int violations = 0;
  std::optional<AuditWitness> witness;

  void fail(AuditWitness w) {
    ++violations;
    if (!witness) witness = std::move(w);
  }
};

struct Case {
  const Game* game = nullptr;
  const Game* partner = nullptr;  // next sampled game with the same n, for additivity
  std::optional<Coalition> unit_unanimity;
};

class Auditor {
 public:
  Auditor(OperatorId op, const AuditSample& sample) : op_(op), sample_(sample) {}

  Check run(Axiom axiom, const Case& c, const RebateVector& phi) const {
    const Game& g = *c.game;
    switch (axiom) {
      case Axiom::kEfficiency: return efficiency(g, phi);
      case Axiom::kSymmetry: return symmetry(g, phi);
      case Axiom::kNullPlayer: return null_player(g, phi);
      case Axiom::kAdditivity: return additivity(c, phi);
      case Axiom::kMarginality: return marginality(g, phi);
      case Axiom::kStrongMonotonicity: return strong_monotonicity(g, phi);
      case Axiom::kSybilProof: return sybil_proof(g, phi);
      case Axiom::kGeneralSybilProof: return merge_check(g, phi, true);
      case Axiom::kTwoEfficiency: return two_efficiency(g, phi);
      case Axiom::kNoDeficit: return no_deficit(g, phi);
      case Axiom::kCollusionProof: return merge_check(g, phi, false);
      case Axiom::kSeparable: return separable(g, phi);
      case Axiom::kSybilProofOptimal: return sybil_proof_optimal(c, phi);
    }
    throw InternalError("unhandled axiom");
  }

  RebateVector eval(const Game& g) const { return evaluate(op_, g, sample_.op_config); }

 private:
  double tol() const { return sample_.tolerance; }

  Check efficiency(const Game& g, const RebateVector& phi) const {
    Check out;
    if (std::abs(phi.total() - g.grand_value()) > tol()) {
      out.fail({"payments sum to " + num(phi.total()) + " but v(N) = " + num(g.grand_value()),
                {g}, {}, phi.total(), g.grand_value()});
    }
    return out;
  }

  Check no_deficit(const Game& g, const RebateVector& phi) const {
    Check out;
    if (phi.total() > g.grand_value() + tol()) {
      out.fail({"payments sum to " + num(phi.total()) + " > v(N) = " + num(g.grand_value()),
                {g}, {}, phi.total(), g.grand_value()});
    }
    return out;
  }

  Check symmetry(const Game& g, const RebateVector& phi) const {
    Check out;
    for (auto [i, j] : classify(g).interchangeable) {
      if (std::abs(phi[i] - phi[j]) > tol()) {
        out.fail({"interchangeable " + who(i) + " and " + who(j) + " are paid " + num(phi[i]) +
                      " and " + num(phi[j]),
                  {g}, {i, j}, phi[i], phi[j]});
      }
    }
    return out;
  }

  Check null_player(const Game& g, const RebateVector& phi) const {
    Check out;
    for (int i : classify(g).null_players) {
      if (std::abs(phi[i]) > tol()) {
        out.fail({"null " + who(i) + " is paid " + num(phi[i]), {g}, {i}, phi[i], 0.0});
      }
    }
    return out;
  }

  Check additivity(const Case& c, const RebateVector& phi) const {
    Check out;
    if (c.partner == nullptr) {
      out.applicable = false;
      return out;
    }
    const Game sum = *c.game + *c.partner;
    const auto phi_w = eval(*c.partner);
    const auto phi_sum = eval(sum);
    for (int i = 0; i < c.game->players(); ++i) {
      if (std::abs(phi_sum[i] - (phi[i] + phi_w[i])) > tol()) {
        out.fail({who(i) + " gets " + num(phi_sum[i]) + " on v+w but " + num(phi[i] + phi_w[i]) +
                      " summed separately",
                  {*c.game, *c.partner, sum}, {i}, phi_sum[i], phi[i] + phi_w[i]});
      }
    }
    return out;
  }

  // w = v + ½·w_{N\{i}} leaves every marginal contribution of i unchanged.
  Check marginality(const Game& g, const RebateVector& phi) const {
    Check out;
    const int n = g.players();
    if (n < 2) {
      out.applicable = false;
      return out;
    }
    for (int i = 0; i < n; ++i) {
      const Game w = g + unanimity_game(n, g.grand_coalition() & ~player_bit(i)).scaled(0.5);
      const double after = eval(w)[i];
      if (std::abs(after - phi[i]) > tol()) {
        out.fail({who(i) + " has identical marginals in both games but is paid " + num(phi[i]) +
                      " and " + num(after),
                  {g, w}, {i}, phi[i], after});
      }
    }
    return out;
  }

  // Adding ½·w_R with i ∈ R can only raise i's marginal contributions.
  Check strong_monotonicity(const Game& g, const RebateVector& phi) const {
    Check out;
    const int n = g.players();
    for (int i = 0; i < n; ++i) {
      for (Coalition bump : {g.grand_coalition(), player_bit(i)}) {
        const Game w = g + unanimity_game(n, bump).scaled(0.5);
        const double after = eval(w)[i];
        if (after < phi[i] - tol()) {
          out.fail({who(i) + " gains marginal contribution (bump on " + format_coalition(bump) +
                        ") but payment drops from " + num(phi[i]) + " to " + num(after),
                    {g, w}, {i}, after, phi[i]});
        }
        if (bump == player_bit(i)) break;
      }
    }
    return out;
  }

  Check sybil_proof(const Game& g, const RebateVector& phi) const {
    Check out;
    for (int i = 0; i < g.players(); ++i) {
      if (phi[i] < 0.0) continue;
      for (SybilFamily family : {SybilFamily::kSplit, SybilFamily::kCopy}) {
        for (int k = 1; k <= sample_.sybil_k_max; ++k) {
          if (g.players() + k > kMaxEnumerationPlayers) break;
          const auto ext = family == SybilFamily::kCopy ? copy_extension(g, i, k)
                                                        : split_extension(g, i, k);
          const double payoff = ext.attacker_payoff(eval(ext.extended));
          if (payoff > phi[i] + tol()) {
            out.fail({who(i) + " " + std::string(to_string(family)) + " into " +
                          std::to_string(k + 1) + " identities collects " + num(payoff) + " > " +
                          num(phi[i]),
                      {g, ext.extended}, {i}, payoff, phi[i]});
          }
        }
      }
    }
    return out;
  }

  // general = true: Σ_K φ_i(v) ≤ φ_p(v_K)  (GSP)
  // general = false: Σ_S φ_i(v) ≥ φ_p(v_S) (CP)
  Check merge_check(const Game& g, const RebateVector& phi, bool general) const {
    Check out;
    if (g.players() < 2) {
      out.applicable = false;
      return out;
    }
    for (Coalition k = 1; k <= g.grand_coalition(); ++k) {
      if (cardinality(k) < 2) continue;
      const auto merged = reduced_game(g, k);
      const double separate = phi.total(k);
      const double together = eval(merged.game)[merged.merged_player];
      const bool bad = general ? separate > together + tol() : separate < together - tol();
      if (bad) {
        out.fail({"players " + format_coalition(k) + " are paid " + num(separate) +
                      " separately and " + num(together) + " merged",
                  {g, merged.game}, members(k), separate, together});
      }
    }
    return out;
  }

  Check two_efficiency(const Game& g, const RebateVector& phi) const {
    Check out;
    if (g.players() + 1 > kMaxEnumerationPlayers) {
      out.applicable = false;
      return out;
    }
    for (int i = 0; i < g.players(); ++i) {
      const auto ext = copy_extension(g, i, 1);
      const double pair = ext.attacker_payoff(eval(ext.extended));
      if (std::abs(pair - phi[i]) > tol()) {
        out.fail({who(i) + " and one copy are paid " + num(pair) + " but " + num(phi[i]) + " alone",
                  {g, ext.extended}, {i}, pair, phi[i]});
      }
    }
    return out;
  }

  Check separable(const Game& g, const RebateVector& phi) const {
    Check out;
    const int n = g.players();
    const double alpha = sample_.alpha.value_or(1.0 / (1.0 + n / std::ldexp(1.0, n - 1)));
    const auto th = theta(g);
    for (int i = 0; i < n; ++i) {
      if (phi[i] < alpha * th[i] - tol()) {
        out.fail({who(i) + " is paid " + num(phi[i]) + " < alpha*theta = " + num(alpha * th[i]),
                  {g}, {i}, phi[i], alpha * th[i]});
      }
    }
    return out;
  }

  Check sybil_proof_optimal(const Case& c, const RebateVector& phi) const {
    Check out;
    if (!c.unit_unanimity) {
      out.applicable = false;
      return out;
    }
    const Coalition r = *c.unit_unanimity;
    for (int i = 0; i < c.game->players(); ++i) {
      const double want = contains(r, i) ? 1.0 / std::ldexp(1.0, cardinality(r) - 1) : 0.0;
      if (std::abs(phi[i] - want) > tol()) {
        out.fail({who(i) + " is paid " + num(phi[i]) + " on w_" + format_coalition(r) +
                      ", optimal Sybil-proof share is " + num(want),
                  {*c.game}, {i}, phi[i], want});
      }
    }
    return out;
  }

  OperatorId op_;
  const AuditSample& sample_;
};

std::optional<Coalition> unit_unanimity_carrier(const Game& g) {
  const auto profile = classify(g);
  if (profile.unanimity && std::abs(profile.unanimity->scale - 1.0) <= kTolerance) {
    return profile.unanimity->carrier;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::kEfficiency: return "E";
    case Axiom::kSymmetry: return "S";
    case Axiom::kNullPlayer: return "N";
    case Axiom::kAdditivity: return "A";
    case Axiom::kMarginality: return "M";
    case Axiom::kStrongMonotonicity: return "SM";
    case Axiom::kSybilProof: return "SP";
    case Axiom::kGeneralSybilProof: return "GSP";
    case Axiom::kTwoEfficiency: return "2-EF";
    case Axiom::kNoDeficit: return "ND";
    case Axiom::kCollusionProof: return "CP";
    case Axiom::kSeparable: return "alpha-SE";
    case Axiom::kSybilProofOptimal: return "SPO";
  }
  return "?";
}

Axiom parse_axiom(std::string_view name) {
  for (Axiom a : kAxioms) {
    if (to_string(a) == name) return a;
  }
  if (name == "α-SE" || name == "SE") return Axiom::kSeparable;
  if (name == "2EF") return Axiom::kTwoEfficiency;
  throw ValidationError("unknown axiom '" + std::string(name) +
                        "' (expected E|S|N|A|M|SM|SP|GSP|2-EF|ND|CP|alpha-SE|SPO)");
}

std::span<const Axiom> all_axioms() { return kAxioms; }

std::vector<Game> audit_games(const AuditSample& sample) {
  if (sample.unanimity_max_n > kMaxEnumerationPlayers || sample.random_max_n > kMaxEnumerationPlayers) {
    throw ValidationError("audit sample: game size above the enumeration cap");
  }
  std::vector<Game> games;
  for (int n = 1; n <= sample.unanimity_max_n; ++n) {
    for (Coalition r = 1; r <= full_coalition(n); ++r) games.push_back(unanimity_game(n, r));
  }
  std::mt19937_64 rng(sample.seed);
  for (int n = std::max(1, sample.random_min_n); n <= sample.random_max_n; ++n) {
    for (int t = 0; t < sample.random_games_per_n; ++t) games.push_back(random_monotone_game(n, rng));
  }
  return games;
}

std::vector<AxiomAudit> audit(OperatorId op, std::span<const Axiom> axioms,
                              const AuditSample& sample) {
  const auto games = audit_games(sample);
  return audit_games(op, axioms, games, sample);
}

std::vector<AxiomAudit> audit_games(OperatorId op, std::span<const Axiom> axioms,
                                    std::span<const Game> games, const AuditSample& sample) {
  const Auditor auditor(op, sample);
  const long long count = static_cast<long long>(games.size());

  std::vector<Case> cases(games.size());
  for (std::size_t g = 0; g < games.size(); ++g) {
    cases[g].game = &games[g];
    for (std::size_t h = g + 1; h < games.size(); ++h) {
      if (games[h].players() == games[g].players()) {
        cases[g].partner = &games[h];
        break;
      }
    }
  }

  std::vector<std::vector<Check>> results(games.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (long long g = 0; g < count; ++g) {
    try {
      cases[g].unit_unanimity = unit_unanimity_carrier(games[g]);
      const auto phi = auditor.eval(games[g]);
      results[g].reserve(axioms.size());
      for (Axiom a : axioms) results[g].push_back(auditor.run(a, cases[g], phi));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<AxiomAudit> out;
  for (std::size_t a = 0; a < axioms.size(); ++a) {
    AxiomAudit entry;
    entry.axiom = axioms[a];
    for (std::size_t g = 0; g < games.size(); ++g) {
      auto& check = results[g][a];
      if (!check.applicable) continue;
      ++entry.games_checked;
      entry.violations += check.violations;
      if (check.witness && !entry.witness) entry.witness = std::move(check.witness);
    }
    entry.pass = entry.violations == 0;
    out.push_back(std::move(entry));
  }
  return out;
}

AuditSample trilemma_sample() {
  AuditSample sample;
  sample.unanimity_max_n = 4;
  sample.random_max_n = 4;
  sample.random_games_per_n = 20;
  sample.op_config.psi.k_max = 3;
  return sample;
}

std::vector<TrilemmaRow> trilemma_demo(const AuditSample& sample) {
  constexpr std::array axioms = {Axiom::kSymmetry, Axiom::kCollusionProof,
                                 Axiom::kGeneralSybilProof};
  const auto games = audit_games(sample);
  std::vector<TrilemmaRow> rows;
  for (OperatorId op : all_operators()) {
    auto audits = audit_games(op, axioms, games, sample);
    TrilemmaRow row{op, std::move(audits[0]), std::move(audits[1]), std::move(audits[2])};
    if (row.passes_all()) {
      throw InternalError("trilemma: operator " + std::string(to_string(op)) +
                          " passed symmetry, collusion-proofness and general Sybil-proofness");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mevr
