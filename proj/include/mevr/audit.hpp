#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mevr/game.hpp"
#include "mevr/operators.hpp"

namespace mevr {

enum class Axiom {
  kEfficiency,          // E
  kSymmetry,            // S
  kNullPlayer,          // N
  kAdditivity,          // A
  kMarginality,         // M
  kStrongMonotonicity,  // SM
  kSybilProof,          // SP
  kGeneralSybilProof,   // GSP
  kTwoEfficiency,       // 2-EF
  kNoDeficit,           // ND
  kCollusionProof,      // CP
  kSeparable,           // α-SE
  kSybilProofOptimal,   // SPO
};

std::string_view to_string(Axiom axiom);
Axiom parse_axiom(std::string_view name);
std::span<const Axiom> all_axioms();

/// Games and budgets an audit runs over. The sample is deterministic in the seed.
struct AuditSample {
  std::uint64_t seed = 42;
  /// Every unanimity game w_R on n = 1..unanimity_max_n players.
  int unanimity_max_n = 6;
  int random_min_n = 2;
  int random_max_n = 5;
  int random_games_per_n = 200;
  /// Identities added per player in SP checks.
  int sybil_k_max = 3;
  /// α for α-SE; when unset, 1/(1 + n/2^{n−1}) for each game's n.
  std::optional<double> alpha;
  double tolerance = kTolerance;
  OperatorConfig op_config;
};

struct AuditWitness {
  std::string description;
  /// The audited game first, then any derived game (extension, merge, sum).
  std::vector<Game> games;
  std::vector<int> players;
  /// The two sides of the violated inequality or equation.
  double lhs = 0.0;
  double rhs = 0.0;
};

struct AxiomAudit {
  Axiom axiom = Axiom::kEfficiency;
  bool pass = true;
  int games_checked = 0;
  int violations = 0;
  /// Present exactly when the verdict is fail; the first violation in sample order.
  std::optional<AuditWitness> witness;
};

/// The unanimity games followed by the seeded random monotone games.
std::vector<Game> audit_games(const AuditSample& sample);

std::vector<AxiomAudit> audit(OperatorId op, std::span<const Axiom> axioms,
                              const AuditSample& sample = {});

/// Same as audit() over an explicit list of games.
std::vector<AxiomAudit> audit_games(OperatorId op, std::span<const Axiom> axioms,
                                    std::span<const Game> games, const AuditSample& sample);

struct TrilemmaRow {
  OperatorId op = OperatorId::kShapley;
  AxiomAudit symmetry;
  AxiomAudit collusion_proof;
  AxiomAudit general_sybil_proof;

  bool passes_all() const {
    return symmetry.pass && collusion_proof.pass && general_sybil_proof.pass;
  }
};

/// Audits S, CP and GSP for each built-in operator; throws InternalError
/// if some operator passes all three.
std::vector<TrilemmaRow> trilemma_demo(const AuditSample& sample);

/// The reduced sample trilemma_demo uses by default.
AuditSample trilemma_sample();

}  // namespace mevr
