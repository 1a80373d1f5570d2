#pragma once

#include <string>
#include <vector>

#include "mevr/game.hpp"

namespace mevr {

struct RegressionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The published worked examples and numeric claims, each re-derived from
/// the library. Deterministic; runs in a few seconds.
std::vector<RegressionResult> published_regressions();

/// The 3-player deficit game: singletons 1, v({1,3}) = 2, v({1,2}) = v({2,3}) = 4, v(N) = 5.
Game banzhaf_deficit_game();

}  // namespace mevr
