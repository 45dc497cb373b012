// Estimator timings against workload size: closed-form global cost (GC),
// table local cost (LC), their brute-force counterparts (NGC, NLC) and the
// one-off initialisation passes (IGC, ILC).

#include <benchmark/benchmark.h>

#include <map>

#include "bmc/cost_global.hpp"
#include "bmc/cost_local.hpp"
#include "bmc/oracle.hpp"

namespace {

using namespace bmc;

const Workload& workload(int dims, std::size_t n) {
  static std::map<std::pair<int, std::size_t>, Workload> cache;
  auto& w = cache[{dims, n}];
  if (w.queries.empty()) {
    const Grid grid{dims, dims == 2 ? 10 : 6};
    const auto data = gen_dataset(DataKind::kSkewed, 10000, grid, 7);
    w = gen_queries(data, n, QueryExtent::cube(dims, dims == 2 ? 32 : 10), 8);
  }
  return w;
}

BmcSpec zorder(const Workload& w) { return standard_curve(StandardCurve::kZOrder, w.grid); }

void BM_GC(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const auto acc = init_global(w);
  const auto c = zorder(w);
  for (auto _ : state) benchmark::DoNotOptimize(global_cost_closed(c, acc));
}

void BM_LC(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const auto tables = build_pattern_tables(w);
  const auto c = zorder(w);
  for (auto _ : state) benchmark::DoNotOptimize(local_cost_from_tables(c, tables));
}

void BM_NGC(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const auto c = zorder(w);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::naive_global_cost(c, w));
}

void BM_NLC(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const auto c = zorder(w);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::naive_local_cost(c, w));
}

void BM_IGC(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(init_global(w));
}

void BM_ILC(benchmark::State& state) {
  const auto& w = workload(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(build_pattern_tables(w));
}

void sweep(benchmark::internal::Benchmark* b) {
  for (int dims : {2, 3}) {
    for (int e = 0; e <= 10; e += 2) b->Args({dims, 1 << e});
  }
  b->ArgNames({"d", "n"});
}

BENCHMARK(BM_GC)->Apply(sweep);
BENCHMARK(BM_LC)->Apply(sweep);
BENCHMARK(BM_NGC)->Apply(sweep);
BENCHMARK(BM_NLC)->Apply(sweep)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IGC)->Apply(sweep);
BENCHMARK(BM_ILC)->Apply(sweep)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
