#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bmc/cost_global.hpp"
#include "bmc/curve.hpp"
#include "bmc/wide_int.hpp"
#include "bmc/workload.hpp"

namespace bmc {

// Number of rise anchors a with both a*2^k + 2^(k-1) - 1 and a*2^k + 2^(k-1)
// inside [lo, hi], i.e. steps where bit k (1-based) of the coordinate flips
// 0->1 while the k-1 bits below it flip 1->0. Never negative.
Count count_rise(Coord lo, Coord hi, int k);

// Number of anchors a with both a*2^k + 2^k - 1 and a*2^k inside [lo, hi],
// i.e. the lowest k bits flip 1->0. For k = 0 this is hi - lo + 1.
Count count_drop(Coord lo, Coord hi, int k);

// Drop exponents of the d-1 non-rise dimensions, ascending by dimension index
// with the rise dimension skipped. Each entry is in [0, l].
struct DropVector {
  std::vector<int> counts;

  int total() const;
  friend bool operator==(const DropVector&, const DropVector&) = default;
};

// For the edge where bit `rise_exponent` (1-based) of `rise_dim` rises, the
// number of bits each other dimension owns below that rank under `curve`.
DropVector drop_vector_for(const BmcSpec& curve, int rise_dim, int rise_exponent);

// One table per rise dimension b, mapping (rise exponent i, DropVector) to
// sum_q N(R_b^i) * prod_b' N(D_b'^k_b'), plus the workload's total cell count.
// Curve-independent; built once per workload.
class PatternTableSet {
 public:
  explicit PatternTableSet(Grid grid);

  const Grid& grid() const { return grid_; }
  std::uint64_t query_count() const { return n_; }
  Count total_cells() const { return cells_; }

  // Table^b[i][drop]; zero when absent.
  Count value(int rise_dim, int rise_exponent, const DropVector& drop) const;
  // Non-zero entries of Table^b as (packed key, value), ascending by key.
  std::span<const std::pair<std::uint64_t, Count>> entries(int rise_dim) const {
    return tables_[static_cast<std::size_t>(rise_dim)];
  }
  std::size_t nonzero_entries() const;

  // Packed key: (i - 1) * (l+1)^(d-1) + sum_m drop[m] * (l+1)^m.
  std::uint64_t pack_key(int rise_exponent, const DropVector& drop) const;

  // Lookup by packed key; zero when absent.
  Count value_by_key(int rise_dim, std::uint64_t key) const;

  void merge(const PatternTableSet& other);

  friend bool operator==(const PatternTableSet&, const PatternTableSet&) = default;

 private:
  friend class PatternTableBuilder;
  friend PatternTableSet pattern_tables_from_json(const nlohmann::json& j);

  Grid grid_;
  std::uint64_t drop_space_ = 1;  // (l+1)^(d-1)
  std::vector<std::vector<std::pair<std::uint64_t, Count>>> tables_;
  Count cells_ = 0;
  std::uint64_t n_ = 0;
};

PatternTableSet build_pattern_tables(const Workload& workload);

// sum over (b, i) of Table^b[i][drop_vector_for(curve, b, i)], O(d^2 * l).
Count edges_via_tables(const BmcSpec& curve, const PatternTableSet& tables);

// total cells - edges = total query sections. Throws std::logic_error if the
// result is below the query count.
Count local_cost_from_tables(const BmcSpec& curve, const PatternTableSet& tables);

// Versioned JSON snapshot; 128-bit values are stored as decimal strings.
nlohmann::json to_json(const PatternTableSet& tables);
PatternTableSet pattern_tables_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GlobalCostAccumulator& acc);
GlobalCostAccumulator global_accumulator_from_json(const nlohmann::json& j);

// Snapshot of everything the learner needs from a workload.
struct WorkloadSummary {
  GlobalCostAccumulator global;
  PatternTableSet tables;
};

WorkloadSummary summarize_workload(const Workload& workload);
void save_summary(const std::filesystem::path& path, const WorkloadSummary& summary);
WorkloadSummary load_summary(const std::filesystem::path& path);

// Global cost times local cost over the whole workload, from the summaries.
double combined_cost(const BmcSpec& curve, const WorkloadSummary& summary);

}  // namespace bmc
