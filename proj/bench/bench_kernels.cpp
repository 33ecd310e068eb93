// Serial reference against the OpenMP kernels.

#include "klext/characters.hpp"
#include "klext/klpoly.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <tuple>

using namespace klext;

namespace {

std::shared_ptr<const GroupSlice> slice(char t, int r, std::uint32_t L) {
  static std::map<std::tuple<char, int, std::uint32_t>, std::shared_ptr<const GroupSlice>> memo;
  auto& s = memo[{t, r, L}];
  if (!s) s = std::make_shared<const GroupSlice>(std::make_shared<const AffineWeylGroup>(build_root_system(t, r)), L);
  return s;
}

void BM_KLFill(benchmark::State& state, char t, int r) {
  auto sl = slice(t, r, static_cast<std::uint32_t>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    KLTable table(sl);
    table.fill(workers);
    benchmark::DoNotOptimize(table.complete());
  }
  state.counters["elements"] = static_cast<double>(sl->size());
}

void BM_Tensor(benchmark::State& state) {
  auto rs = build_root_system('B', 2);
  const Weight a{state.range(0), state.range(0)};
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(tensor_decompose(rs, a, a, workers));
}

}  // namespace

BENCHMARK_CAPTURE(BM_KLFill, A2, 'A', 2)->ArgsProduct({{12, 18}, {1, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_KLFill, B2, 'B', 2)->ArgsProduct({{12, 16}, {1, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Tensor)->ArgsProduct({{4, 8}, {1, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
