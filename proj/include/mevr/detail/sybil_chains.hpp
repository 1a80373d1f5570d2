#pragma once

#include <optional>
#include <vector>

namespace mevr {
namespace detail {

template <typename Visitor>
void walk_chains(const Game& game, int player, int base_players, int remaining,
                 std::optional<SybilFamily> last, bool mixed, std::vector<SybilStep>& steps,
                 Visitor& visit) {
  for (SybilFamily family : {SybilFamily::kCopy, SybilFamily::kSplit}) {
    if (last && (*last == family || !mixed)) continue;
    for (int k = 1; k <= remaining; ++k) {
      if (game.players() + k > kMaxEnumerationPlayers) break;
      const Game next = family == SybilFamily::kCopy ? copy_extended_game(game, player, k)
                                                     : split_extended_game(game, player, k);
      const Coalition identities =
          player_bit(player) | (next.grand_coalition() & ~full_coalition(base_players));
      steps.push_back({family, k});
      visit(static_cast<const std::vector<SybilStep>&>(steps), next, identities);
      if (mixed) walk_chains(next, player, base_players, remaining - k, family, mixed, steps, visit);
      steps.pop_back();
    }
  }
}

}  // namespace detail

template <typename Visitor>
void for_each_sybil_chain(const Game& g, int player, int k_max, bool mixed, Visitor&& visit) {
  std::vector<SybilStep> steps;
  detail::walk_chains(g, player, g.players(), k_max, std::nullopt, mixed, steps, visit);
}

}  // namespace mevr
