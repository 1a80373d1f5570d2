#include "mevr/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "mevr/kernels.hpp"

namespace mevr {

std::vector<int> members(Coalition s) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(cardinality(s)));
  while (s != 0) {
    out.push_back(std::countr_zero(s));
    s &= s - 1;
  }
  return out;
}

std::string format_coalition(Coalition s) {
  std::string out = "{";
  bool first = true;
  for (int p : members(s)) {
    if (!first) out += ",";
    out += std::to_string(p + 1);
    first = false;
  }
  return out + "}";
}

Game Game::make(int n, std::vector<double> values, bool require_monotone) {
  if (n < 1 || n > kMaxPlayers) {
    throw ValidationError("game: player count " + std::to_string(n) + " outside [1, " +
                          std::to_string(kMaxPlayers) + "]");
  }
  const std::size_t expected = std::size_t{1} << n;
  if (values.size() != expected) {
    throw ValidationError("game: expected " + std::to_string(expected) + " values for n=" +
                          std::to_string(n) + ", got " + std::to_string(values.size()));
  }
  if (values[0] != 0.0) {
    throw ValidationError("game: value of the empty coalition must be 0");
  }
  for (std::size_t s = 0; s < values.size(); ++s) {
    if (!std::isfinite(values[s]) || values[s] < 0.0) {
      std::ostringstream msg;
      msg << "game: value of " << format_coalition(static_cast<Coalition>(s))
          << " must be finite and non-negative, got " << values[s];
      throw ValidationError(msg.str());
    }
  }
  if (require_monotone) {
    for (std::size_t s = 0; s < values.size(); ++s) {
      for (int i = 0; i < n; ++i) {
        const auto ss = static_cast<Coalition>(s);
        if (contains(ss, i)) continue;
        const Coalition t = ss | player_bit(i);
        if (values[ss] > values[t]) {
          std::ostringstream msg;
          msg << "game: not monotone, v(" << format_coalition(ss) << ")=" << values[ss]
              << " > v(" << format_coalition(t) << ")=" << values[t];
          throw ValidationError(msg.str());
        }
      }
    }
  }
  return Game(n, std::move(values), require_monotone);
}

Game Game::from_trusted(int n, std::vector<double> values, bool monotone) {
  return Game(n, std::move(values), monotone);
}

Game Game::operator+(const Game& other) const {
  if (other.n_ != n_) throw ValidationError("game sum: player counts differ");
  std::vector<double> sum(values_.size());
  for (std::size_t s = 0; s < sum.size(); ++s) sum[s] = values_[s] + other.values_[s];
  return Game(n_, std::move(sum), monotone_ && other.monotone_);
}

Game Game::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw ValidationError("game scale factor must be finite and non-negative");
  }
  std::vector<double> out(values_);
  for (auto& x : out) x *= factor;
  return Game(n_, std::move(out), monotone_);
}

double RebateVector::total() const {
  double sum = 0.0;
  for (double p : payments_) sum += p;
  return sum;
}

double RebateVector::total(Coalition s) const {
  double sum = 0.0;
  for (int p : members(s)) sum += payments_.at(static_cast<std::size_t>(p));
  return sum;
}

Game unanimity_game(int n, Coalition carrier) {
  if (n < 1 || n > kMaxPlayers) throw ValidationError("unanimity game: bad player count");
  if (carrier == 0) throw ValidationError("unanimity game: carrier must be nonempty");
  if (!is_subset(carrier, full_coalition(n))) {
    throw ValidationError("unanimity game: carrier " + format_coalition(carrier) +
                          " not within " + std::to_string(n) + " players");
  }
  std::vector<double> v(std::size_t{1} << n, 0.0);
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (is_subset(carrier, static_cast<Coalition>(s))) v[s] = 1.0;
  }
  return Game::from_trusted(n, std::move(v), true);
}

Game additive_game(std::span<const double> singleton_values) {
  const int n = static_cast<int>(singleton_values.size());
  if (n < 1 || n > kMaxPlayers) throw ValidationError("additive game: bad player count");
  std::vector<double> v(std::size_t{1} << n, 0.0);
  for (std::size_t s = 1; s < v.size(); ++s) {
    const int low = std::countr_zero(static_cast<Coalition>(s));
    v[s] = v[s & (s - 1)] + singleton_values[low];
  }
  return Game::make(n, std::move(v), true);
}

UnanimityDecomposition unanimity_coefficients(const Game& g) {
  return {g.players(), kernels::parallel::moebius(g.players(), g.values())};
}

Game reconstruct_from_coefficients(const UnanimityDecomposition& d) {
  if (d.coefficients.size() != (std::size_t{1} << d.n)) {
    throw ValidationError("decomposition: coefficient count does not match n");
  }
  auto v = kernels::parallel::zeta(d.n, d.coefficients);
  for (auto& x : v) {
    if (x < 0.0 && x > -1e-12) x = 0.0;
  }
  return Game::make(d.n, std::move(v));
}

double marginal_contribution(const Game& g, int player, Coalition s) {
  if (player < 0 || player >= g.players()) throw ValidationError("marginal: unknown player");
  if (contains(s, player)) {
    throw ValidationError("marginal: player " + std::to_string(player + 1) + " already in " +
                          format_coalition(s));
  }
  if (!is_subset(s, g.grand_coalition())) throw ValidationError("marginal: coalition out of range");
  return g(s | player_bit(player)) - g(s);
}

GameProfile classify(const Game& g, double tolerance) {
  const int n = g.players();
  const Coalition grand = g.grand_coalition();
  GameProfile profile;

  profile.additive = true;
  profile.monotone = true;
  for (Coalition s = 1; s <= grand; ++s) {
    double sum = 0.0;
    for (int p : members(s)) sum += g(player_bit(p));
    if (std::abs(sum - g(s)) > tolerance) profile.additive = false;
    for (int p : members(s)) {
      if (g(s ^ player_bit(p)) > g(s) + tolerance) profile.monotone = false;
    }
    if (s == grand) break;
  }

  for (int i = 0; i < n; ++i) {
    bool null = true;
    for (Coalition s = 0; s <= grand && null; ++s) {
      if (!contains(s, i) && std::abs(g(s | player_bit(i)) - g(s)) > tolerance) null = false;
      if (s == grand) break;
    }
    if (null) profile.null_players.push_back(i);
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Coalition pair = player_bit(i) | player_bit(j);
      bool same = true;
      for (Coalition s = 0; s <= grand && same; ++s) {
        if ((s & pair) == 0 && std::abs(g(s | player_bit(i)) - g(s | player_bit(j))) > tolerance) {
          same = false;
        }
        if (s == grand) break;
      }
      if (same) profile.interchangeable.emplace_back(i, j);
    }
  }

  const auto d = unanimity_coefficients(g);
  Coalition carrier = 0;
  int nonzero = 0;
  for (Coalition r = 1; r <= grand; ++r) {
    if (std::abs(d.coefficients[r]) > tolerance) {
      ++nonzero;
      carrier = r;
    }
    if (r == grand) break;
  }
  if (nonzero == 1 && d.coefficients[carrier] > 0.0) {
    profile.unanimity = ScaledUnanimity{carrier, d.coefficients[carrier]};
  }
  return profile;
}

Game random_monotone_game(int n, std::mt19937_64& rng) {
  if (n < 1 || n > kMaxPlayers) throw ValidationError("random game: bad player count");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(std::size_t{1} << n, 0.0);
  for (std::size_t s = 1; s < v.size(); ++s) {
    double floor = 0.0;
    for (int p : members(static_cast<Coalition>(s))) floor = std::max(floor, v[s ^ player_bit(p)]);
    v[s] = floor + unit(rng);
  }
  return Game::from_trusted(n, std::move(v), true);
}

void require_enumerable(const Game& g, int cap) {
  if (g.players() > cap) {
    throw ValidationError("game has " + std::to_string(g.players()) +
                          " players; this operator enumerates subsets and is capped at " +
                          std::to_string(cap));
  }
}

}  // namespace mevr
