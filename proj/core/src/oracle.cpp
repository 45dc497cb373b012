#include "bmc/oracle.hpp"

#include <algorithm>
#include <limits>

#include "bmc/error.hpp"

namespace bmc::oracle {

namespace {

void check_budget(const RangeQuery& q, Count budget) {
  if (cell_count(q) > budget) {
    throw BudgetExceeded("query holds " + to_string(cell_count(q)) + " cells, budget is " +
                         to_string(budget));
  }
}

void check_grid(const BmcSpec& curve, const RangeQuery& q) { q.validate(curve.grid()); }

}  // namespace

Count naive_global_cost(const BmcSpec& curve, const Workload& workload) {
  Count total = 0;
  for (const auto& q : workload.queries) {
    total += Count{curve_value(curve, q.hi)} - curve_value(curve, q.lo) + 1;
  }
  return total;
}

SectionList enumerate_sections(const BmcSpec& curve, const RangeQuery& q, Count budget) {
  check_grid(curve, q);
  check_budget(q, budget);
  std::vector<CurveValue> values;
  values.reserve(static_cast<std::size_t>(cell_count(q)));
  for_each_cell(q, [&](std::span<const Coord> cell) { values.push_back(curve_value(curve, cell)); });
  std::sort(values.begin(), values.end());
  SectionList sections;
  for (CurveValue v : values) {
    if (!sections.empty() && sections.back().last + 1 == v) {
      sections.back().last = v;
    } else {
      sections.push_back({v, v});
    }
  }
  return sections;
}

Count naive_edge_count(const BmcSpec& curve, const RangeQuery& q, Count budget) {
  check_grid(curve, q);
  check_budget(q, budget);
  const CurveValue last_value =
      curve.width() == 64 ? std::numeric_limits<CurveValue>::max()
                          : (CurveValue{1} << curve.width()) - 1;
  Count edges = 0;
  for_each_cell(q, [&](std::span<const Coord> cell) {
    const CurveValue v = curve_value(curve, cell);
    if (v == last_value) return;
    const GridPoint next = curve_decode(curve, v + 1);
    if (q.contains(next.coords())) ++edges;
  });
  return edges;
}

Count naive_local_cost(const BmcSpec& curve, const Workload& workload, Count budget) {
  Count total = 0;
  for (const auto& q : workload.queries) total += enumerate_sections(curve, q, budget).size();
  return total;
}

std::vector<BmcSpec> all_curves(Grid grid, std::size_t budget) {
  grid.validate();
  std::vector<int> msb_first;
  for (int i = 0; i < grid.dims; ++i) {
    msb_first.insert(msb_first.end(), static_cast<std::size_t>(grid.bits), i);
  }
  std::vector<BmcSpec> out;
  do {
    if (out.size() == budget) {
      throw BudgetExceeded("more than " + std::to_string(budget) + " candidate curves");
    }
    std::vector<int> lsb_first(msb_first.rbegin(), msb_first.rend());
    out.emplace_back(grid, std::move(lsb_first));
  } while (std::next_permutation(msb_first.begin(), msb_first.end()));
  return out;
}

BestCurve exhaustive_best_bmc(const Workload& workload, std::size_t budget) {
  auto curves = all_curves(workload.grid, budget);
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const double cost = to_double(naive_global_cost(curves[i], workload)) *
                        to_double(naive_local_cost(curves[i], workload));
    if (cost < best_cost) {
      best_cost = cost;
      best = i;
    }
  }
  return {curves[best], best_cost, curves.size()};
}

}  // namespace bmc::oracle
