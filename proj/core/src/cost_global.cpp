#include "bmc/cost_global.hpp"

#include "bmc/error.hpp"

namespace bmc {

void GlobalCostAccumulator::add(const RangeQuery& q) {
  const int bits = grid_.bits;
  for (int dim = 0; dim < grid_.dims; ++dim) {
    const Coord lo = q.lo[dim];
    const Coord hi = q.hi[dim];
    std::int64_t* row = a_.data() + dim * bits;
    for (int k = 0; k < bits; ++k) {
      row[k] += static_cast<std::int64_t>((hi >> k) & 1u) - static_cast<std::int64_t>((lo >> k) & 1u);
    }
  }
  ++n_;
}

void GlobalCostAccumulator::merge(const GlobalCostAccumulator& other) {
  if (!(other.grid_ == grid_)) throw ValidationError("cannot merge accumulators of different grids");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
  n_ += other.n_;
}

Count global_cost_naive(const BmcSpec& curve, const RangeQuery& q) {
  return Count{curve_value(curve, q.hi)} - curve_value(curve, q.lo) + 1;
}

GlobalCostAccumulator init_global(const Workload& workload) {
  GlobalCostAccumulator acc(workload.grid);
  for (const auto& q : workload.queries) acc.add(q);
  return acc;
}

Count global_cost_closed(const BmcSpec& curve, const GlobalCostAccumulator& acc) {
  if (!(curve.grid() == acc.grid())) {
    throw ValidationError("curve and accumulator were built for different grids");
  }
  SignedCount total = 0;
  const int width = curve.width();
  for (int r = 0; r < width; ++r) {
    total += static_cast<SignedCount>(acc.a(curve.slot(r), curve.slot_bit(r))) << r;
  }
  return static_cast<Count>(total + static_cast<SignedCount>(acc.query_count()));
}

}  // namespace bmc
