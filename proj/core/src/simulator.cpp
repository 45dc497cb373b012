#include "bmc/simulator.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bmc/error.hpp"
#include "bmc/hilbert.hpp"

namespace bmc {

CurveOrder CurveOrder::bmc(BmcSpec curve, std::string name) {
  if (name.empty()) name = render_bmc(curve);
  const Grid grid = curve.grid();
  return CurveOrder(grid, std::move(curve), std::move(name));
}

CurveOrder CurveOrder::hilbert(Grid grid) {
  grid.validate();
  if (grid.dims < 2 || grid.dims > 3) throw ValidationError("Hilbert ordering supports d in {2, 3}");
  return CurveOrder(grid, std::nullopt, "HC");
}

CurveValue CurveOrder::key(std::span<const Coord> point) const {
  return curve_ ? curve_value_unchecked(*curve_, point) : hilbert_index(point, grid_.bits);
}

std::pair<CurveValue, CurveValue> CurveOrder::key_span(const RangeQuery& q, Count budget) const {
  if (curve_) {
    // Monotone in every coordinate, so the corners bound the query.
    return {curve_value(*curve_, q.lo), curve_value(*curve_, q.hi)};
  }
  const auto sections = this->sections(q, budget);
  return {sections.front().first, sections.back().last};
}

oracle::SectionList CurveOrder::sections(const RangeQuery& q, Count budget) const {
  if (curve_) return oracle::enumerate_sections(*curve_, q, budget);
  q.validate(grid_);
  if (cell_count(q) > budget) throw BudgetExceeded("query exceeds the cell budget");
  std::vector<CurveValue> values;
  values.reserve(static_cast<std::size_t>(cell_count(q)));
  oracle::for_each_cell(q, [&](std::span<const Coord> cell) {
    values.push_back(hilbert_index(cell, grid_.bits));
  });
  std::sort(values.begin(), values.end());
  oracle::SectionList out;
  for (CurveValue v : values) {
    if (!out.empty() && out.back().last + 1 == v) {
      out.back().last = v;
    } else {
      out.push_back({v, v});
    }
  }
  return out;
}

CurveOrder parse_curve_order(std::string_view text, Grid grid) {
  if (text == "ZC") return CurveOrder::bmc(standard_curve(StandardCurve::kZOrder, grid), "ZC");
  if (text == "LC") return CurveOrder::bmc(standard_curve(StandardCurve::kLexicographic, grid), "LC");
  if (text == "HC") return CurveOrder::hilbert(grid);
  return CurveOrder::bmc(parse_bmc(text, grid.dims, grid.bits));
}

OrderedIndex::OrderedIndex(const Dataset& dataset, CurveOrder order, std::size_t block_size)
    : dataset_(&dataset), order_(std::move(order)), block_size_(block_size) {
  if (block_size_ < 1) throw ValidationError("block size must be >= 1");
  if (!(dataset.grid() == order_.grid())) {
    throw ValidationError("dataset and curve use different grids");
  }
  entries_.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) entries_.push_back({order_.key(dataset.point(i)), i});
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) { return a.key < b.key; });
  for (std::size_t begin = 0; begin < entries_.size(); begin += block_size_) {
    const std::size_t end = std::min(begin + block_size_, entries_.size());
    blocks_.push_back({entries_[begin].key, entries_[end - 1].key, begin, end});
  }
}

std::pair<std::size_t, std::size_t> OrderedIndex::overlapping_blocks(CurveValue lo,
                                                                      CurveValue hi) const {
  // Blocks are sorted by both first_key and last_key.
  const auto first = std::partition_point(blocks_.begin(), blocks_.end(),
                                          [&](const Block& b) { return b.last_key < lo; });
  const auto last = std::partition_point(first, blocks_.end(),
                                         [&](const Block& b) { return b.first_key <= hi; });
  return {static_cast<std::size_t>(first - blocks_.begin()),
          static_cast<std::size_t>(last - blocks_.begin())};
}

OrderedIndex build_index(const Dataset& dataset, CurveOrder order, std::size_t block_size) {
  return OrderedIndex(dataset, std::move(order), block_size);
}

QueryMode parse_query_mode(std::string_view text) {
  if (text == "per-section") return QueryMode::kPerSection;
  if (text == "full-range") return QueryMode::kFullRange;
  throw ValidationError("unknown query mode '" + std::string(text) +
                        "' (expected per-section or full-range)");
}

std::string_view to_string(QueryMode mode) {
  return mode == QueryMode::kPerSection ? "per-section" : "full-range";
}

QueryOutcome run_query(const OrderedIndex& index, const RangeQuery& q, QueryMode mode) {
  q.validate(index.order().grid());
  // Block ranges to read, ascending and merged.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  auto add_range = [&](std::pair<std::size_t, std::size_t> r) {
    if (r.first >= r.second) return;
    if (!ranges.empty() && r.first <= ranges.back().second) {
      ranges.back().second = std::max(ranges.back().second, r.second);
    } else {
      ranges.push_back(r);
    }
  };
  if (mode == QueryMode::kFullRange) {
    const auto [lo, hi] = index.order().key_span(q);
    add_range(index.overlapping_blocks(lo, hi));
  } else {
    for (const auto& s : index.order().sections(q)) add_range(index.overlapping_blocks(s.first, s.last));
  }

  QueryOutcome out;
  const auto blocks = index.blocks();
  const auto entries = index.entries();
  for (const auto& [begin, end] : ranges) {
    out.blocks += end - begin;
    for (std::size_t b = begin; b < end; ++b) {
      out.retrieved += blocks[b].end - blocks[b].begin;
      for (std::size_t e = blocks[b].begin; e < blocks[b].end; ++e) {
        const std::size_t row = entries[e].point;
        if (q.contains(index.dataset().point(row))) out.results.push_back(row);
      }
    }
  }
  std::sort(out.results.begin(), out.results.end());
  out.precision = out.retrieved == 0 ? 1.0
                                     : static_cast<double>(out.results.size()) /
                                           static_cast<double>(out.retrieved);
  return out;
}

std::vector<SimReport> compare_curves(const Dataset& dataset, const Workload& workload,
                                      std::span<const CurveOrder> curves, std::size_t block_size,
                                      QueryMode mode) {
  workload.validate();
  if (!(workload.grid == dataset.grid())) {
    throw ValidationError("dataset and workload use different grids");
  }
  std::vector<SimReport> reports;
  std::vector<std::vector<std::size_t>> reference(workload.size());
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const OrderedIndex index(dataset, curves[c], block_size);
    SimReport report{curves[c].name(), mode, {}, 0, 0, 0};
    report.queries.reserve(workload.size());
    for (std::size_t qi = 0; qi < workload.size(); ++qi) {
      auto outcome = run_query(index, workload.queries[qi], mode);
      if (c == 0) {
        reference[qi] = outcome.results;
      } else if (outcome.results != reference[qi]) {
        throw std::logic_error("curves " + curves[0].name() + " and " + curves[c].name() +
                               " disagree on query " + std::to_string(qi));
      }
      report.queries.push_back({qi, outcome.blocks, outcome.results.size(), outcome.precision});
    }
    if (!report.queries.empty()) {
      std::vector<double> blocks;
      double precision = 0;
      for (const auto& s : report.queries) {
        blocks.push_back(static_cast<double>(s.blocks));
        precision += s.precision;
      }
      const double n = static_cast<double>(blocks.size());
      report.mean_blocks = std::accumulate(blocks.begin(), blocks.end(), 0.0) / n;
      report.mean_precision = precision / n;
      std::sort(blocks.begin(), blocks.end());
      const std::size_t mid = blocks.size() / 2;
      report.median_blocks = blocks.size() % 2 ? blocks[mid] : 0.5 * (blocks[mid - 1] + blocks[mid]);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

void write_report_csv(std::ostream& out, std::span<const SimReport> reports) {
  out << "curve,query_id,blocks,result_size,precision\n";
  for (const auto& r : reports) {
    for (const auto& s : r.queries) {
      out << r.curve << ',' << s.query_id << ',' << s.blocks << ',' << s.result_size << ','
          << s.precision << '\n';
    }
  }
}

nlohmann::json report_summary_json(std::span<const SimReport> reports) {
  auto arr = nlohmann::json::array();
  for (const auto& r : reports) {
    arr.push_back({{"curve", r.curve},
                   {"mode", to_string(r.mode)},
                   {"queries", r.queries.size()},
                   {"mean_blocks", r.mean_blocks},
                   {"median_blocks", r.median_blocks},
                   {"mean_precision", r.mean_precision}});
  }
  return arr;
}

}  // namespace bmc
