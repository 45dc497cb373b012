#pragma once

// Brute-force reference computations. Deliberately slow and direct; used to
// check the closed-form estimators and as the naive baselines in benchmarks.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bmc/curve.hpp"
#include "bmc/wide_int.hpp"
#include "bmc/workload.hpp"

namespace bmc::oracle {

inline constexpr Count kDefaultCellBudget = Count{1} << 22;

struct Section {
  CurveValue first;
  CurveValue last;

  friend bool operator==(const Section&, const Section&) = default;
};

// Sorted, disjoint, non-adjacent runs of curve values.
using SectionList = std::vector<Section>;

// Calls `fn(std::span<const Coord>)` for every cell of q in row-major order.
template <typename Fn>
void for_each_cell(const RangeQuery& q, Fn&& fn) {
  const int d = q.dims();
  std::vector<Coord> cell(q.lo.vec());
  while (true) {
    fn(std::span<const Coord>(cell));
    int i = d - 1;
    while (i >= 0) {
      const auto ui = static_cast<std::size_t>(i);
      if (cell[ui] < q.hi[i]) {
        ++cell[ui];
        break;
      }
      cell[ui] = q.lo[i];
      --i;
    }
    if (i < 0) return;
  }
}

Count naive_global_cost(const BmcSpec& curve, const Workload& workload);

// Curve value of every cell, sorted, merged into maximal runs.
SectionList enumerate_sections(const BmcSpec& curve, const RangeQuery& q,
                               Count budget = kDefaultCellBudget);

// Number of v with both decode(v) and decode(v + 1) inside q.
Count naive_edge_count(const BmcSpec& curve, const RangeQuery& q,
                       Count budget = kDefaultCellBudget);

// Sum of section counts over the workload.
Count naive_local_cost(const BmcSpec& curve, const Workload& workload,
                       Count budget = kDefaultCellBudget);

// Every valid curve for the grid in lexicographic order of the MSB-first
// dimension sequence; (d*l)! / (l!)^d of them.
std::vector<BmcSpec> all_curves(Grid grid, std::size_t budget = 1'000'000);

struct BestCurve {
  BmcSpec curve;
  double cost;
  std::size_t candidates;
};

// Scores every curve with naive global cost * naive local cost and returns
// the first minimum in all_curves order.
BestCurve exhaustive_best_bmc(const Workload& workload, std::size_t budget = 1'000'000);

}  // namespace bmc::oracle
