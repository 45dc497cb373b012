#pragma once

#include <array>
#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "bmc/curve.hpp"
#include "bmc/wide_int.hpp"
#include "bmc/workload.hpp"

namespace bmc {

// Per-(dimension, bit) sums of (upper-corner bit - lower-corner bit) over a
// workload. Independent of any curve; one pass over the queries builds it and
// every curve is then scored in O(d * l).
class GlobalCostAccumulator {
 public:
  explicit GlobalCostAccumulator(Grid grid) : grid_(grid) {}

  const Grid& grid() const { return grid_; }
  std::uint64_t query_count() const { return n_; }
  // Bit is 0-based (the k-th least significant bit is bit k-1).
  std::int64_t a(int dim, int bit) const { return a_[index(dim, bit)]; }

  void add(const RangeQuery& q);
  void merge(const GlobalCostAccumulator& other);

  friend bool operator==(const GlobalCostAccumulator&, const GlobalCostAccumulator&) = default;

 private:
  std::size_t index(int dim, int bit) const {
    return static_cast<std::size_t>(dim * grid_.bits + bit);
  }

  Grid grid_;
  std::array<std::int64_t, kMaxCurveBits> a_{};
  std::uint64_t n_ = 0;

  friend GlobalCostAccumulator global_accumulator_from_json(const nlohmann::json& j);
};

// F(hi) - F(lo) + 1.
Count global_cost_naive(const BmcSpec& curve, const RangeQuery& q);

GlobalCostAccumulator init_global(const Workload& workload);

// sum_j sum_k A_j^k * 2^rank(j, k) + n; equals the naive sum over the workload.
Count global_cost_closed(const BmcSpec& curve, const GlobalCostAccumulator& acc);

}  // namespace bmc
