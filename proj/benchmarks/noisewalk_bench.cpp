#include <benchmark/benchmark.h>

#include "noisewalk/exact.hpp"
#include "noisewalk/flow.hpp"
#include "noisewalk/stats.hpp"

using namespace noisewalk;

namespace {

const MarkedGroup& f2() {
  static const MarkedGroup g = MarkedGroup::free_group(2);
  return g;
}

const FiniteMeasure& srw() {
  static const FiniteMeasure mu = FiniteMeasure::uniform_generators(f2());
  return mu;
}

void BM_ConvolveSingle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(convolve_n(f2(), srw(), n).size());
}
BENCHMARK(BM_ConvolveSingle)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ConvolvePair(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto pi = noisy_coupling(srw(), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_pair_n(f2(), pi, n).size());
}
BENCHMARK(BM_ConvolvePair)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_TotalVariation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = convolve_pair_n(f2(), noisy_coupling(srw(), 0.5), n);
  const auto b = convolve_pair_n(f2(), product_measure(srw()), n);
  for (auto _ : state) benchmark::DoNotOptimize(tv_distance(a, b));
}
BENCHMARK(BM_TotalVariation)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_SampleWalk(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const WalkSampler sampler(f2(), srw());
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler(steps, SeedRecord{1, i++}).endpoint().size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleWalk)->Arg(1 << 10)->Arg(1 << 14);

void BM_SamplePair(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  const ResamplingSampler sampler(f2(), srw(), 0.5);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler(steps, SeedRecord{2, i++}).first.endpoint().size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplePair)->Arg(1 << 10)->Arg(1 << 14);

// Layered random bipartite network: source -> L -> R -> sink.
void BM_MaxFlowBipartite(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  std::uint64_t x = 88172645463325252ULL;
  auto next = [&] {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    return x;
  };
  std::vector<std::array<std::size_t, 2>> edges;
  for (std::size_t i = 0; i < side; ++i)
    for (int k = 0; k < 8; ++k) edges.push_back({i, next() % side});
  std::vector<std::int64_t> cap(2 * side);
  for (auto& c : cap) c = static_cast<std::int64_t>(next() % (1ULL << 40)) + 1;
  for (auto _ : state) {
    MaxFlow f(2 * side + 2);
    const std::size_t s = 2 * side, t = s + 1;
    for (std::size_t i = 0; i < side; ++i) {
      f.add_edge(s, i, cap[i]);
      f.add_edge(side + i, t, cap[side + i]);
    }
    for (const auto& [l, r] : edges) f.add_edge(l, side + r, std::int64_t{1} << 62);
    benchmark::DoNotOptimize(f.solve(s, t));
  }
}
BENCHMARK(BM_MaxFlowBipartite)->Arg(1 << 10)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

void BM_SeparationU(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = convolve_pair_n(f2(), noisy_coupling(srw(), 0.0), n);
  const auto b = convolve_pair_n(f2(), noisy_coupling(srw(), 1.0), n);
  for (auto _ : state) benchmark::DoNotOptimize(separation_U(f2(), a, b, 1.0));
}
BENCHMARK(BM_SeparationU)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
