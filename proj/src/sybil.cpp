#include "mevr/sybil.hpp"

#include <string>

namespace mevr {
namespace {

void check_extension_args(const Game& g, int player, int k) {
  if (player < 0 || player >= g.players()) {
    throw ValidationError("sybil extension: player " + std::to_string(player + 1) +
                          " not in game with " + std::to_string(g.players()) + " players");
  }
  if (k < 1) throw ValidationError("sybil extension: k must be at least 1");
  if (g.players() + k > kMaxPlayers) {
    throw ValidationError("sybil extension: " + std::to_string(g.players()) + " + " +
                          std::to_string(k) + " identities exceeds the cap of " +
                          std::to_string(kMaxPlayers));
  }
}

}  // namespace

std::string_view to_string(SybilFamily family) {
  return family == SybilFamily::kCopy ? "copy" : "split";
}

SybilFamily parse_sybil_family(std::string_view name) {
  if (name == "copy") return SybilFamily::kCopy;
  if (name == "split") return SybilFamily::kSplit;
  throw ValidationError("unknown sybil family '" + std::string(name) + "' (expected copy|split)");
}

Coalition SybilExtension::identities() const {
  return player_bit(player) | (extended.grand_coalition() & ~base.grand_coalition());
}

double SybilExtension::attacker_payoff(const RebateVector& payments) const {
  return payments.total(identities());
}

Game copy_extended_game(const Game& g, int player, int k) {
  check_extension_args(g, player, k);
  const int n = g.players();
  const Coalition base = g.grand_coalition();
  const Coalition self = player_bit(player);
  std::vector<double> v(std::size_t{1} << (n + k));
  for (std::size_t s = 0; s < v.size(); ++s) {
    const auto ss = static_cast<Coalition>(s);
    const Coalition inside = ss & base;
    v[s] = (ss & ~base) != 0 ? g(inside | self) : g(inside);
  }
  return Game::from_trusted(n + k, std::move(v), g.monotone());
}

Game split_extended_game(const Game& g, int player, int k) {
  check_extension_args(g, player, k);
  const int n = g.players();
  const Coalition base = g.grand_coalition();
  const Coalition self = player_bit(player);
  const Coalition parts = self | (full_coalition(n + k) & ~base);
  std::vector<double> v(std::size_t{1} << (n + k));
  for (std::size_t s = 0; s < v.size(); ++s) {
    const auto ss = static_cast<Coalition>(s);
    v[s] = is_subset(parts, ss) ? g(ss & base) : g(ss & base & ~self);
  }
  return Game::from_trusted(n + k, std::move(v), g.monotone());
}

SybilExtension copy_extension(const Game& g, int player, int k) {
  return {g, player, {{SybilFamily::kCopy, k}}, copy_extended_game(g, player, k)};
}

SybilExtension split_extension(const Game& g, int player, int k) {
  return {g, player, {{SybilFamily::kSplit, k}}, split_extended_game(g, player, k)};
}

SybilExtension extend(const SybilExtension& prior, SybilFamily family, int k) {
  SybilExtension next = prior;
  next.steps.push_back({family, k});
  next.extended = family == SybilFamily::kCopy
                      ? copy_extended_game(prior.extended, prior.player, k)
                      : split_extended_game(prior.extended, prior.player, k);
  return next;
}

MergedGame reduced_game(const Game& g, Coalition merged) {
  const int n = g.players();
  if (merged == 0) throw ValidationError("merge: coalition must be nonempty");
  if (!is_subset(merged, g.grand_coalition())) {
    throw ValidationError("merge: coalition " + format_coalition(merged) + " out of range");
  }
  const int anchor = std::countr_zero(merged);
  MergedGame out;
  out.merged = merged;
  out.new_index.assign(static_cast<std::size_t>(n), -1);
  // old coalition represented by each new player
  std::vector<Coalition> represents;
  for (int j = 0; j < n; ++j) {
    if (j == anchor) {
      out.merged_player = static_cast<int>(represents.size());
      represents.push_back(merged);
    } else if (!contains(merged, j)) {
      out.new_index[j] = static_cast<int>(represents.size());
      represents.push_back(player_bit(j));
    }
  }
  for (int j : members(merged)) out.new_index[j] = out.merged_player;

  const int m = static_cast<int>(represents.size());
  std::vector<double> v(std::size_t{1} << m);
  for (std::size_t s = 0; s < v.size(); ++s) {
    Coalition old = 0;
    for (int p : members(static_cast<Coalition>(s))) old |= represents[p];
    v[s] = g(old);
  }
  out.game = Game::from_trusted(m, std::move(v), g.monotone());
  return out;
}

MergedGame collusion_game(const Game& g, Coalition colluders) {
  return reduced_game(g, colluders);
}

}  // namespace mevr
