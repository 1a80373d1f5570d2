#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mevr {

// A coalition is a bitmask over players; player p (0-based) occupies bit p.
using Coalition = std::uint32_t;

inline constexpr int kMaxPlayers = 24;
// Operators that enumerate subsets per player refuse games above this size.
inline constexpr int kMaxEnumerationPlayers = 20;
inline constexpr double kTolerance = 1e-9;

constexpr Coalition player_bit(int player) { return Coalition{1} << player; }

constexpr bool contains(Coalition s, int player) { return (s >> player) & 1U; }

constexpr bool is_subset(Coalition s, Coalition t) { return (s & ~t) == 0; }

constexpr int cardinality(Coalition s) { return std::popcount(s); }

constexpr Coalition full_coalition(int n) {
  return n >= 32 ? ~Coalition{0} : (Coalition{1} << n) - 1;
}

// Players of s in ascending order.
std::vector<int> members(Coalition s);

// "{1,3}" using 1-based player labels.
std::string format_coalition(Coalition s);

// Malformed input or a violated precondition. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A broken internal invariant. The CLI maps this to exit code 2.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mevr
