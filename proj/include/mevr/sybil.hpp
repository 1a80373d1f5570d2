#pragma once

#include <string_view>
#include <vector>

#include "mevr/game.hpp"

namespace mevr {

enum class SybilFamily { kCopy, kSplit };

std::string_view to_string(SybilFamily family);
SybilFamily parse_sybil_family(std::string_view name);

struct SybilStep {
  SybilFamily family = SybilFamily::kCopy;
  int k = 1;
};

/// A game extended by one player's fake identities. New identities occupy
/// the highest indices. A chain of steps always targets the original player.
struct SybilExtension {
  Game base;
  int player = 0;
  std::vector<SybilStep> steps;
  Game extended;

  SybilFamily family() const { return steps.front().family; }
  int added() const { return extended.players() - base.players(); }
  /// The attacker's identities in the extended game: the player plus every new index.
  Coalition identities() const;
  /// Σ_{j∈{i}∪K} payments_j.
  double attacker_payoff(const RebateVector& payments) const;
};

/// Copies substitute for the player: ṽ(S) = v((S∩N) ∪ {i}) when S meets K.
Game copy_extended_game(const Game& g, int player, int k);

/// Parts are jointly required: ṽ(S) = v((S∩N) ∪ {i}) when {i}∪K ⊆ S,
/// otherwise v(S∩N \ {i}).
Game split_extended_game(const Game& g, int player, int k);

SybilExtension copy_extension(const Game& g, int player, int k);
SybilExtension split_extension(const Game& g, int player, int k);

/// Appends one more step to a chain, again targeting the original player.
SybilExtension extend(const SybilExtension& prior, SybilFamily family, int k);

/// A game in which the players of a coalition act as one merged player p.
/// The merged player sits at the index of the smallest merged member; the
/// remaining players keep their relative order.
struct MergedGame {
  Game game;
  int merged_player = 0;
  Coalition merged = 0;
  /// new_index[j] is the index of original player j in `game`.
  std::vector<int> new_index;
};

/// v_p(S) = v(S) when p ∉ S and v((S \ {p}) ∪ K) when p ∈ S.
MergedGame reduced_game(const Game& g, Coalition merged);

/// Same construction as reduced_game; read with the collusion inequality.
MergedGame collusion_game(const Game& g, Coalition colluders);

}  // namespace mevr
