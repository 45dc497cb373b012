#include <benchmark/benchmark.h>

#include "bmc/hilbert.hpp"
#include "bmc/simulator.hpp"

namespace {

using namespace bmc;

const Grid kGrid{2, 12};

const Dataset& dataset() {
  static const Dataset d = gen_dataset(DataKind::kSkewed, 100000, kGrid, 3);
  return d;
}

const Workload& queries() {
  static const Workload w = gen_queries(dataset(), 200, QueryExtent::aspect(4096, 16, 1), 4);
  return w;
}

CurveOrder order_for(int which) {
  switch (which) {
    case 0: return parse_curve_order("ZC", kGrid);
    case 1: return parse_curve_order("LC", kGrid);
    default: return parse_curve_order("HC", kGrid);
  }
}

void BM_BuildIndex(benchmark::State& state) {
  const auto order = order_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_index(dataset(), order, 128));
  state.SetLabel(order.name());
}

void BM_RunQueries(benchmark::State& state) {
  const auto order = order_for(static_cast<int>(state.range(0)));
  const auto mode = state.range(1) ? QueryMode::kPerSection : QueryMode::kFullRange;
  const auto index = build_index(dataset(), order, 128);
  std::size_t blocks = 0;
  for (auto _ : state) {
    for (const auto& q : queries().queries) blocks += run_query(index, q, mode).blocks;
  }
  benchmark::DoNotOptimize(blocks);
  state.SetLabel(order.name() + " " + std::string(to_string(mode)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries().size()));
}

void BM_HilbertIndex(benchmark::State& state) {
  const auto& d = dataset();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hilbert_index(d.point(i), kGrid.bits));
    if (++i == d.size()) i = 0;
  }
}

BENCHMARK(BM_BuildIndex)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunQueries)->ArgsProduct({{0, 1, 2}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HilbertIndex);

}  // namespace

BENCHMARK_MAIN();
