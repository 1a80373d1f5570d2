#include "mevr/kernels.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mevr::kernels {
namespace {

// |S|!(n−|S|−1)!/n! = 1 / (n · C(n−1, |S|)).
std::vector<double> shapley_weights(int n) {
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  double binom = 1.0;  // C(n−1, s)
  for (int s = 0; s < n; ++s) {
    w[s] = 1.0 / (static_cast<double>(n) * binom);
    binom = binom * static_cast<double>(n - 1 - s) / static_cast<double>(s + 1);
  }
  return w;
}

// Spreads the n−1 bits of t around position `player`, producing the t-th
// coalition that excludes the player.
inline Coalition insert_zero_bit(Coalition t, int player) {
  const Coalition low = t & (player_bit(player) - 1);
  return ((t >> player) << (player + 1)) | low;
}

}  // namespace

namespace serial {

std::vector<double> shapley(int n, std::span<const double> v) {
  const auto w = shapley_weights(n);
  std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
  const Coalition grand = full_coalition(n);
  for (Coalition s = 0; s <= grand; ++s) {
    const double weight = cardinality(s) < n ? w[cardinality(s)] : 0.0;
    for (int i = 0; i < n; ++i) {
      if (contains(s, i)) continue;
      phi[i] += weight * (v[s | player_bit(i)] - v[s]);
    }
    if (s == grand) break;
  }
  return phi;
}

std::vector<double> banzhaf(int n, std::span<const double> v) {
  std::vector<double> beta(static_cast<std::size_t>(n), 0.0);
  const Coalition grand = full_coalition(n);
  for (Coalition s = 0; s <= grand; ++s) {
    for (int i = 0; i < n; ++i) {
      if (contains(s, i)) continue;
      beta[i] += v[s | player_bit(i)] - v[s];
    }
    if (s == grand) break;
  }
  const double scale = 1.0 / static_cast<double>(Coalition{1} << (n - 1));
  for (auto& b : beta) b *= scale;
  return beta;
}

std::vector<double> min_marginal(int n, std::span<const double> v) {
  std::vector<double> theta(static_cast<std::size_t>(n),
                            std::numeric_limits<double>::infinity());
  const Coalition grand = full_coalition(n);
  for (Coalition s = 0; s <= grand; ++s) {
    for (int i = 0; i < n; ++i) {
      if (contains(s, i)) continue;
      theta[i] = std::min(theta[i], v[s | player_bit(i)] - v[s]);
    }
    if (s == grand) break;
  }
  return theta;
}

std::vector<double> moebius(int n, std::span<const double> v) {
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> c(size, 0.0);
  for (std::size_t r = 1; r < size; ++r) {
    const auto rr = static_cast<Coalition>(r);
    const int rsize = cardinality(rr);
    double acc = 0.0;
    // Walk every submask T of R, including the empty set.
    for (Coalition t = rr;; t = (t - 1) & rr) {
      const double sign = ((rsize - cardinality(t)) & 1) ? -1.0 : 1.0;
      acc += sign * v[t];
      if (t == 0) break;
    }
    c[r] = acc;
  }
  return c;
}

std::vector<double> zeta(int n, std::span<const double> c) {
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> v(size, 0.0);
  for (std::size_t s = 1; s < size; ++s) {
    const auto ss = static_cast<Coalition>(s);
    double acc = 0.0;
    for (Coalition r = ss; r != 0; r = (r - 1) & ss) acc += c[r];
    v[s] = acc;
  }
  return v;
}

}  // namespace serial

namespace parallel {

std::vector<double> shapley(int n, std::span<const double> v, Coalition players) {
  const auto w = shapley_weights(n);
  std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
  const long long half = 1LL << (n - 1);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    if (!contains(players, i)) continue;
    const Coalition bit = player_bit(i);
    double acc = 0.0;
    for (long long t = 0; t < half; ++t) {
      const Coalition s = insert_zero_bit(static_cast<Coalition>(t), i);
      acc += w[cardinality(s)] * (v[s | bit] - v[s]);
    }
    phi[i] = acc;
  }
  return phi;
}

std::vector<double> shapley(int n, std::span<const double> v) {
  return shapley(n, v, full_coalition(n));
}

std::vector<double> banzhaf(int n, std::span<const double> v) {
  std::vector<double> beta(static_cast<std::size_t>(n), 0.0);
  const long long half = 1LL << (n - 1);
  const double scale = 1.0 / static_cast<double>(half);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    const Coalition bit = player_bit(i);
    double acc = 0.0;
    for (long long t = 0; t < half; ++t) {
      const Coalition s = insert_zero_bit(static_cast<Coalition>(t), i);
      acc += v[s | bit] - v[s];
    }
    beta[i] = acc * scale;
  }
  return beta;
}

std::vector<double> min_marginal(int n, std::span<const double> v) {
  std::vector<double> theta(static_cast<std::size_t>(n), 0.0);
  const long long half = 1LL << (n - 1);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    const Coalition bit = player_bit(i);
    double best = std::numeric_limits<double>::infinity();
    for (long long t = 0; t < half; ++t) {
      const Coalition s = insert_zero_bit(static_cast<Coalition>(t), i);
      best = std::min(best, v[s | bit] - v[s]);
    }
    theta[i] = best;
  }
  return theta;
}

std::vector<double> moebius(int n, std::span<const double> v) {
  std::vector<double> c(v.begin(), v.end());
  const long long size = 1LL << n;
  for (int i = 0; i < n; ++i) {
    const Coalition bit = player_bit(i);
#pragma omp parallel for schedule(static)
    for (long long s = 0; s < size; ++s) {
      if (static_cast<Coalition>(s) & bit) c[s] -= c[s ^ bit];
    }
  }
  return c;
}

std::vector<double> zeta(int n, std::span<const double> c) {
  std::vector<double> v(c.begin(), c.end());
  v[0] = 0.0;
  const long long size = 1LL << n;
  for (int i = 0; i < n; ++i) {
    const Coalition bit = player_bit(i);
#pragma omp parallel for schedule(static)
    for (long long s = 0; s < size; ++s) {
      if (static_cast<Coalition>(s) & bit) v[s] += v[s ^ bit];
    }
  }
  return v;
}

}  // namespace parallel

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace mevr::kernels
