#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bmc/curve.hpp"
#include "bmc/oracle.hpp"
#include "bmc/workload.hpp"

namespace bmc {

// A total order over grid cells: a bit-merging curve or the Hilbert curve.
class CurveOrder {
 public:
  static CurveOrder bmc(BmcSpec curve, std::string name = {});
  static CurveOrder hilbert(Grid grid);

  const std::string& name() const { return name_; }
  const Grid& grid() const { return grid_; }
  bool is_hilbert() const { return !curve_.has_value(); }
  const BmcSpec* curve() const { return curve_ ? &*curve_ : nullptr; }

  CurveValue key(std::span<const Coord> point) const;
  // Smallest and largest key over the cells of q.
  std::pair<CurveValue, CurveValue> key_span(const RangeQuery& q,
                                             Count budget = oracle::kDefaultCellBudget) const;
  oracle::SectionList sections(const RangeQuery& q,
                               Count budget = oracle::kDefaultCellBudget) const;

 private:
  CurveOrder(Grid grid, std::optional<BmcSpec> curve, std::string name)
      : grid_(grid), curve_(std::move(curve)), name_(std::move(name)) {}

  Grid grid_;
  std::optional<BmcSpec> curve_;
  std::string name_;
};

// "ZC", "LC", "HC" or a curve in text form.
CurveOrder parse_curve_order(std::string_view text, Grid grid);

struct Block {
  CurveValue first_key;
  CurveValue last_key;
  std::size_t begin;  // into OrderedIndex::entries
  std::size_t end;
};

// Points sorted by (key, input position) and cut into blocks of `block_size`.
class OrderedIndex {
 public:
  struct Entry {
    CurveValue key;
    std::size_t point;  // row in the dataset
  };

  OrderedIndex(const Dataset& dataset, CurveOrder order, std::size_t block_size);

  const CurveOrder& order() const { return order_; }
  const Dataset& dataset() const { return *dataset_; }
  std::size_t block_size() const { return block_size_; }
  std::span<const Entry> entries() const { return entries_; }
  std::span<const Block> blocks() const { return blocks_; }

  // Blocks whose [first_key, last_key] intersects [lo, hi], as [begin, end).
  std::pair<std::size_t, std::size_t> overlapping_blocks(CurveValue lo, CurveValue hi) const;

 private:
  const Dataset* dataset_;
  CurveOrder order_;
  std::size_t block_size_;
  std::vector<Entry> entries_;
  std::vector<Block> blocks_;
};

OrderedIndex build_index(const Dataset& dataset, CurveOrder order, std::size_t block_size);

enum class QueryMode {
  kFullRange,   // scan [min key, max key] of the query once
  kPerSection,  // one scan per query section
};

QueryMode parse_query_mode(std::string_view text);
std::string_view to_string(QueryMode mode);

struct QueryOutcome {
  std::vector<std::size_t> results;  // dataset rows inside q, ascending
  std::size_t blocks = 0;            // distinct blocks read
  std::size_t retrieved = 0;         // points in those blocks
  double precision = 1.0;            // results / retrieved; 1 when nothing read
};

QueryOutcome run_query(const OrderedIndex& index, const RangeQuery& q, QueryMode mode);

struct QueryStat {
  std::size_t query_id;
  std::size_t blocks;
  std::size_t result_size;
  double precision;
};

struct SimReport {
  std::string curve;
  QueryMode mode;
  std::vector<QueryStat> queries;
  double mean_blocks = 0;
  double median_blocks = 0;
  double mean_precision = 0;
};

// Runs every query against an index per curve. Throws std::logic_error if two
// curves ever disagree on a query's result set.
std::vector<SimReport> compare_curves(const Dataset& dataset, const Workload& workload,
                                      std::span<const CurveOrder> curves, std::size_t block_size,
                                      QueryMode mode);

// Columns: curve, query_id, blocks, result_size, precision.
void write_report_csv(std::ostream& out, std::span<const SimReport> reports);
nlohmann::json report_summary_json(std::span<const SimReport> reports);

}  // namespace bmc
