// Serial reference kernels against their OpenMP counterparts, n = 16..20.

#include <benchmark/benchmark.h>

#include <random>
#include <span>
#include <vector>

#include "mevr/game.hpp"
#include "mevr/kernels.hpp"

namespace {

const mevr::Game& game_for(int n) {
  static std::vector<mevr::Game> cache(mevr::kMaxEnumerationPlayers + 1);
  if (cache[n].players() != n) {
    std::mt19937_64 rng(1000 + n);
    cache[n] = mevr::random_monotone_game(n, rng);
  }
  return cache[n];
}

using Kernel = std::vector<double> (*)(int, std::span<const double>);

template <Kernel kernel>
void run(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto values = game_for(n).values();
  for (auto _ : state) benchmark::DoNotOptimize(kernel(n, values));
  state.SetComplexityN(n);
  state.counters["threads"] = mevr::kernels::thread_count();
}

std::vector<double> parallel_shapley(int n, std::span<const double> v) {
  return mevr::kernels::parallel::shapley(n, v);
}

}  // namespace

namespace serial = mevr::kernels::serial;
namespace parallel = mevr::kernels::parallel;

BENCHMARK(run<serial::shapley>)->Name("shapley/serial")->DenseRange(16, 20, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(run<parallel_shapley>)->Name("shapley/parallel")->DenseRange(16, 20, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(run<serial::banzhaf>)->Name("banzhaf/serial")->DenseRange(16, 20, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(run<parallel::banzhaf>)->Name("banzhaf/parallel")->DenseRange(16, 20, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(run<serial::min_marginal>)->Name("theta/serial")->DenseRange(16, 20, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(run<parallel::min_marginal>)->Name("theta/parallel")->DenseRange(16, 20, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(run<serial::moebius>)->Name("moebius/serial")->Arg(14)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(run<parallel::moebius>)->Name("moebius/parallel")->DenseRange(14, 20, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
