#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "mevr/types.hpp"

namespace mevr {

/// A transferable-utility game v: 2^N -> R>=0 stored densely by coalition
/// bitmask. Values are immutable once constructed; v(empty) is always 0.
class Game {
 public:
  /// An empty placeholder (n = 0); every real game comes from make().
  Game() = default;

  /// Validates and builds a game. Throws ValidationError on a wrong length,
  /// a negative or non-finite entry, a nonzero empty-coalition value, or
  /// (when require_monotone is set) a monotonicity violation; the message
  /// names the witness pair S ⊂ T.
  static Game make(int n, std::vector<double> values, bool require_monotone = false);

  /// Skips validation. For constructions whose invariants are already
  /// established (extensions, merges, Moebius reconstructions).
  static Game from_trusted(int n, std::vector<double> values, bool monotone);

  int players() const { return n_; }
  Coalition grand_coalition() const { return full_coalition(n_); }
  std::size_t size() const { return values_.size(); }

  double operator()(Coalition s) const { return values_[s]; }
  double grand_value() const { return values_.back(); }
  std::span<const double> values() const { return values_; }

  /// True when monotonicity was verified or is inherited from a monotone base.
  bool monotone() const { return monotone_; }

  Game operator+(const Game& other) const;
  Game scaled(double factor) const;

  friend bool operator==(const Game&, const Game&) = default;

 private:
  Game(int n, std::vector<double> values, bool monotone)
      : n_(n), values_(std::move(values)), monotone_(monotone) {}

  int n_ = 0;
  std::vector<double> values_;
  bool monotone_ = false;
};

/// Per-identity payments produced by a value operator.
class RebateVector {
 public:
  RebateVector() = default;
  explicit RebateVector(std::vector<double> payments) : payments_(std::move(payments)) {}
  explicit RebateVector(std::size_t n) : payments_(n, 0.0) {}

  std::size_t size() const { return payments_.size(); }
  double operator[](std::size_t i) const { return payments_[i]; }
  double& operator[](std::size_t i) { return payments_[i]; }
  auto begin() const { return payments_.begin(); }
  auto end() const { return payments_.end(); }
  std::span<const double> payments() const { return payments_; }

  double total() const;
  /// Sum of the payments to the players in s.
  double total(Coalition s) const;

 private:
  std::vector<double> payments_;
};

/// Coordinates of a game in the unanimity basis {w_R}. Indexed by coalition
/// mask; the entry for the empty set is always 0.
struct UnanimityDecomposition {
  int n = 0;
  std::vector<double> coefficients;

  double coefficient(Coalition r) const { return coefficients[r]; }
};

struct ScaledUnanimity {
  Coalition carrier = 0;
  double scale = 0.0;
};

struct GameProfile {
  bool additive = false;
  bool monotone = false;
  std::vector<int> null_players;
  std::vector<std::pair<int, int>> interchangeable;
  std::optional<ScaledUnanimity> unanimity;
};

/// w_R(S) = 1 iff R ⊆ S.
Game unanimity_game(int n, Coalition carrier);

/// v(S) = Σ_{i∈S} a_i.
Game additive_game(std::span<const double> singleton_values);

UnanimityDecomposition unanimity_coefficients(const Game& g);

/// Inverse of unanimity_coefficients. Rounding noise below 1e-12 is snapped
/// to zero; genuinely negative reconstructions are rejected.
Game reconstruct_from_coefficients(const UnanimityDecomposition& d);

/// v(S ∪ {i}) − v(S); requires i ∉ S.
double marginal_contribution(const Game& g, int player, Coalition s);

GameProfile classify(const Game& g, double tolerance = kTolerance);

/// Monotone game built by accumulating uniform increments along the subset
/// lattice: v(S) = max_{j∈S} v(S\{j}) + U(0,1).
Game random_monotone_game(int n, std::mt19937_64& rng);

/// Verifies n is within the cap an enumerating operator supports.
void require_enumerable(const Game& g, int cap = kMaxEnumerationPlayers);

}  // namespace mevr
