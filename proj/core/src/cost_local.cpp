#include "bmc/cost_local.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "bmc/error.hpp"

namespace bmc {

namespace {

SignedCount floor_div(SignedCount a, SignedCount b) {
  SignedCount q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

SignedCount ceil_div(SignedCount a, SignedCount b) { return -floor_div(-a, b); }

Count clamp_nonnegative(SignedCount v) { return v < 0 ? Count{0} : static_cast<Count>(v); }

constexpr std::string_view kTablesFormat = "bmc-pattern-tables";
constexpr std::string_view kGlobalFormat = "bmc-global-accumulator";
constexpr std::string_view kSummaryFormat = "bmc-workload-summary";
constexpr int kFormatVersion = 1;

// Tables up to this many cells per dimension accumulate densely while building.
constexpr std::uint64_t kDenseBuildLimit = 1u << 18;

}  // namespace

Count count_rise(Coord lo, Coord hi, int k) {
  if (k < 1 || k > 64 || lo > hi) return 0;
  const SignedCount step = SignedCount{1} << k;
  const SignedCount half = step / 2;
  const SignedCount upper = floor_div(static_cast<SignedCount>(hi) - half, step);
  const SignedCount lower = ceil_div(static_cast<SignedCount>(lo) - (half - 1), step);
  return clamp_nonnegative(upper - lower + 1);
}

Count count_drop(Coord lo, Coord hi, int k) {
  if (k < 0 || k > 64 || lo > hi) return 0;
  const SignedCount step = SignedCount{1} << k;
  const SignedCount upper = floor_div(static_cast<SignedCount>(hi) + 1, step);
  const SignedCount lower = ceil_div(static_cast<SignedCount>(lo), step);
  return clamp_nonnegative(upper - lower);
}

int DropVector::total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

DropVector drop_vector_for(const BmcSpec& curve, int rise_dim, int rise_exponent) {
  if (rise_dim < 0 || rise_dim >= curve.dims() || rise_exponent < 1 ||
      rise_exponent > curve.bits()) {
    throw ValidationError("rise pattern outside the curve's geometry");
  }
  const int gamma = curve.rank(rise_dim, rise_exponent - 1);
  std::vector<int> below(static_cast<std::size_t>(curve.dims()), 0);
  for (int r = 0; r < gamma; ++r) ++below[static_cast<std::size_t>(curve.slot(r))];
  DropVector out;
  for (int m = 0; m < curve.dims(); ++m) {
    if (m != rise_dim) out.counts.push_back(below[static_cast<std::size_t>(m)]);
  }
  return out;
}

PatternTableSet::PatternTableSet(Grid grid) : grid_(grid) {
  grid_.validate();
  drop_space_ = 1;
  for (int m = 1; m < grid_.dims; ++m) drop_space_ *= static_cast<std::uint64_t>(grid_.bits + 1);
  tables_.resize(static_cast<std::size_t>(grid_.dims));
}

std::uint64_t PatternTableSet::pack_key(int rise_exponent, const DropVector& drop) const {
  if (rise_exponent < 1 || rise_exponent > grid_.bits ||
      static_cast<int>(drop.counts.size()) != grid_.dims - 1) {
    throw ValidationError("pattern key outside the table geometry");
  }
  std::uint64_t key = 0;
  std::uint64_t weight = 1;
  for (int c : drop.counts) {
    if (c < 0 || c > grid_.bits) throw ValidationError("drop exponent outside [0, l]");
    key += static_cast<std::uint64_t>(c) * weight;
    weight *= static_cast<std::uint64_t>(grid_.bits + 1);
  }
  return static_cast<std::uint64_t>(rise_exponent - 1) * drop_space_ + key;
}

Count PatternTableSet::value_by_key(int rise_dim, std::uint64_t key) const {
  const auto& table = tables_[static_cast<std::size_t>(rise_dim)];
  const auto it = std::lower_bound(table.begin(), table.end(), key,
                                   [](const auto& entry, std::uint64_t k) { return entry.first < k; });
  return (it != table.end() && it->first == key) ? it->second : Count{0};
}

Count PatternTableSet::value(int rise_dim, int rise_exponent, const DropVector& drop) const {
  if (rise_dim < 0 || rise_dim >= grid_.dims) throw ValidationError("rise dimension out of range");
  return value_by_key(rise_dim, pack_key(rise_exponent, drop));
}

std::size_t PatternTableSet::nonzero_entries() const {
  std::size_t total = 0;
  for (const auto& t : tables_) total += t.size();
  return total;
}

void PatternTableSet::merge(const PatternTableSet& other) {
  if (!(other.grid_ == grid_)) throw ValidationError("cannot merge tables of different grids");
  for (std::size_t b = 0; b < tables_.size(); ++b) {
    std::vector<std::pair<std::uint64_t, Count>> merged;
    const auto& x = tables_[b];
    const auto& y = other.tables_[b];
    merged.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
      if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
        merged.push_back(x[i++]);
      } else if (i == x.size() || y[j].first < x[i].first) {
        merged.push_back(y[j++]);
      } else {
        merged.emplace_back(x[i].first, x[i].second + y[j].second);
        ++i;
        ++j;
      }
    }
    tables_[b] = std::move(merged);
  }
  cells_ += other.cells_;
  n_ += other.n_;
}

// Accumulates per-query pattern products, densely for small tables.
class PatternTableBuilder {
 public:
  explicit PatternTableBuilder(Grid grid) : out_(grid) {
    const auto dims = static_cast<std::size_t>(grid.dims);
    table_cells_ = static_cast<std::uint64_t>(grid.bits) * out_.drop_space_;
    dense_ = table_cells_ <= kDenseBuildLimit;
    if (dense_) {
      dense_tables_.assign(dims, std::vector<Count>(table_cells_, 0));
    } else {
      sparse_tables_.resize(dims);
    }
    rise_.resize(dims);
    drop_nonzero_.resize(dims);
    weights_.resize(dims);
    for (std::size_t b = 0; b < dims; ++b) {
      std::uint64_t w = 1;
      for (std::size_t m = 0; m < dims; ++m) {
        if (m == b) {
          weights_[b].push_back(0);
          continue;
        }
        weights_[b].push_back(w);
        w *= static_cast<std::uint64_t>(grid.bits + 1);
      }
    }
  }

  void add(const RangeQuery& q) {
    const Grid& grid = out_.grid_;
    const auto dims = static_cast<std::size_t>(grid.dims);
    for (std::size_t b = 0; b < dims; ++b) {
      const Coord lo = q.lo[static_cast<int>(b)];
      const Coord hi = q.hi[static_cast<int>(b)];
      rise_[b].assign(static_cast<std::size_t>(grid.bits), 0);
      for (int i = 1; i <= grid.bits; ++i) rise_[b][static_cast<std::size_t>(i - 1)] = count_rise(lo, hi, i);
      drop_nonzero_[b].clear();
      for (int k = 0; k <= grid.bits; ++k) {
        const Count c = count_drop(lo, hi, k);
        if (c == 0) break;  // drop counts are non-increasing in k
        drop_nonzero_[b].emplace_back(k, c);
      }
    }
    out_.cells_ += cell_count(q);
    ++out_.n_;

    std::vector<std::size_t> odometer(dims, 0);
    for (std::size_t b = 0; b < dims; ++b) {
      for (int i = 1; i <= grid.bits; ++i) {
        const Count rise = rise_[b][static_cast<std::size_t>(i - 1)];
        if (rise == 0) continue;
        const std::uint64_t row = static_cast<std::uint64_t>(i - 1) * out_.drop_space_;
        std::fill(odometer.begin(), odometer.end(), 0);
        while (true) {
          Count product = rise;
          std::uint64_t key = row;
          for (std::size_t m = 0; m < dims; ++m) {
            if (m == b) continue;
            const auto& [k, c] = drop_nonzero_[m][odometer[m]];
            product *= c;
            key += static_cast<std::uint64_t>(k) * weights_[b][m];
          }
          if (dense_) {
            dense_tables_[b][key] += product;
          } else {
            sparse_tables_[b][key] += product;
          }
          std::size_t m = 0;
          for (; m < dims; ++m) {
            if (m == b) continue;
            if (++odometer[m] < drop_nonzero_[m].size()) break;
            odometer[m] = 0;
          }
          if (m == dims) break;
        }
      }
    }
  }

  PatternTableSet finish() && {
    for (std::size_t b = 0; b < out_.tables_.size(); ++b) {
      auto& table = out_.tables_[b];
      if (dense_) {
        for (std::uint64_t key = 0; key < table_cells_; ++key) {
          if (dense_tables_[b][key] != 0) table.emplace_back(key, dense_tables_[b][key]);
        }
      } else {
        table.assign(sparse_tables_[b].begin(), sparse_tables_[b].end());
        std::erase_if(table, [](const auto& e) { return e.second == 0; });
        std::sort(table.begin(), table.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
      }
    }
    return std::move(out_);
  }

 private:
  PatternTableSet out_;
  std::uint64_t table_cells_ = 0;
  bool dense_ = true;
  std::vector<std::vector<Count>> dense_tables_;
  std::vector<std::unordered_map<std::uint64_t, Count>> sparse_tables_;
  std::vector<std::vector<Count>> rise_;
  std::vector<std::vector<std::pair<int, Count>>> drop_nonzero_;
  std::vector<std::vector<std::uint64_t>> weights_;  // weights_[b][m]: key weight of dim m
};

PatternTableSet build_pattern_tables(const Workload& workload) {
  workload.grid.validate();
  PatternTableBuilder builder(workload.grid);
  for (const auto& q : workload.queries) builder.add(q);
  return std::move(builder).finish();
}

Count edges_via_tables(const BmcSpec& curve, const PatternTableSet& tables) {
  if (!(curve.grid() == tables.grid())) {
    throw ValidationError("curve and pattern tables were built for different grids");
  }
  const int dims = curve.dims();
  const std::uint64_t base = static_cast<std::uint64_t>(curve.bits() + 1);
  const std::uint64_t drop_space = [&] {
    std::uint64_t s = 1;
    for (int m = 1; m < dims; ++m) s *= base;
    return s;
  }();
  std::array<int, kMaxCurveBits> below{};
  Count edges = 0;
  for (int r = 0; r < curve.width(); ++r) {
    const int b = curve.slot(r);
    std::uint64_t key = static_cast<std::uint64_t>(curve.slot_bit(r)) * drop_space;
    std::uint64_t weight = 1;
    for (int m = 0; m < dims; ++m) {
      if (m == b) continue;
      key += static_cast<std::uint64_t>(below[static_cast<std::size_t>(m)]) * weight;
      weight *= base;
    }
    edges += tables.value_by_key(b, key);
    ++below[static_cast<std::size_t>(b)];
  }
  return edges;
}

Count local_cost_from_tables(const BmcSpec& curve, const PatternTableSet& tables) {
  const Count edges = edges_via_tables(curve, tables);
  const Count cells = tables.total_cells();
  if (edges > cells || cells - edges < tables.query_count()) {
    throw std::logic_error("pattern tables yield fewer sections than queries");
  }
  return cells - edges;
}

nlohmann::json to_json(const PatternTableSet& tables) {
  auto per_dim = nlohmann::json::array();
  for (int b = 0; b < tables.grid().dims; ++b) {
    auto entries = nlohmann::json::array();
    for (const auto& [key, value] : tables.entries(b)) entries.push_back({key, to_string(value)});
    per_dim.push_back(std::move(entries));
  }
  return {{"format", kTablesFormat},
          {"version", kFormatVersion},
          {"d", tables.grid().dims},
          {"l", tables.grid().bits},
          {"n", tables.query_count()},
          {"cells", to_string(tables.total_cells())},
          {"tables", std::move(per_dim)}};
}

namespace {

void check_header(const nlohmann::json& j, std::string_view format) {
  if (!j.is_object() || j.value("format", std::string{}) != format) {
    throw ValidationError("not a " + std::string(format) + " snapshot");
  }
  if (j.value("version", 0) != kFormatVersion) {
    throw ValidationError("unsupported " + std::string(format) + " version");
  }
}

}  // namespace

PatternTableSet pattern_tables_from_json(const nlohmann::json& j) {
  check_header(j, kTablesFormat);
  try {
    PatternTableSet out(Grid{j.at("d").get<int>(), j.at("l").get<int>()});
    out.n_ = j.at("n").get<std::uint64_t>();
    out.cells_ = parse_count(j.at("cells").get<std::string>());
    const auto& per_dim = j.at("tables");
    if (per_dim.size() != out.tables_.size()) throw ValidationError("table count does not match d");
    const std::uint64_t limit = static_cast<std::uint64_t>(out.grid_.bits) * out.drop_space_;
    for (std::size_t b = 0; b < out.tables_.size(); ++b) {
      for (const auto& entry : per_dim[b]) {
        const auto key = entry.at(0).get<std::uint64_t>();
        if (key >= limit) throw ValidationError("pattern key out of range");
        if (!out.tables_[b].empty() && out.tables_[b].back().first >= key) {
          throw ValidationError("pattern keys must be strictly ascending");
        }
        out.tables_[b].emplace_back(key, parse_count(entry.at(1).get<std::string>()));
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad pattern table JSON: ") + e.what());
  }
}

nlohmann::json to_json(const GlobalCostAccumulator& acc) {
  auto rows = nlohmann::json::array();
  for (int dim = 0; dim < acc.grid().dims; ++dim) {
    std::vector<std::int64_t> row;
    for (int k = 0; k < acc.grid().bits; ++k) row.push_back(acc.a(dim, k));
    rows.push_back(row);
  }
  return {{"format", kGlobalFormat}, {"version", kFormatVersion}, {"d", acc.grid().dims},
          {"l", acc.grid().bits},    {"n", acc.query_count()},    {"A", std::move(rows)}};
}

GlobalCostAccumulator global_accumulator_from_json(const nlohmann::json& j) {
  check_header(j, kGlobalFormat);
  try {
    Grid grid{j.at("d").get<int>(), j.at("l").get<int>()};
    grid.validate();
    GlobalCostAccumulator acc(grid);
    acc.n_ = j.at("n").get<std::uint64_t>();
    const auto rows = j.at("A").get<std::vector<std::vector<std::int64_t>>>();
    if (rows.size() != static_cast<std::size_t>(grid.dims)) throw ValidationError("A has wrong row count");
    for (int dim = 0; dim < grid.dims; ++dim) {
      const auto& row = rows[static_cast<std::size_t>(dim)];
      if (row.size() != static_cast<std::size_t>(grid.bits)) throw ValidationError("A has wrong row length");
      for (int k = 0; k < grid.bits; ++k) acc.a_[acc.index(dim, k)] = row[static_cast<std::size_t>(k)];
    }
    return acc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad accumulator JSON: ") + e.what());
  }
}

WorkloadSummary summarize_workload(const Workload& workload) {
  return {init_global(workload), build_pattern_tables(workload)};
}

void save_summary(const std::filesystem::path& path, const WorkloadSummary& summary) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const nlohmann::json j = {{"format", kSummaryFormat},
                            {"version", kFormatVersion},
                            {"global", to_json(summary.global)},
                            {"tables", to_json(summary.tables)}};
  out << j.dump() << '\n';
  if (!out) throw IoError("write error on " + path.string());
}

WorkloadSummary load_summary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  check_header(j, kSummaryFormat);
  WorkloadSummary s{global_accumulator_from_json(j.at("global")),
                    pattern_tables_from_json(j.at("tables"))};
  if (!(s.global.grid() == s.tables.grid()) || s.global.query_count() != s.tables.query_count()) {
    throw ValidationError(path.string() + ": accumulator and tables disagree");
  }
  return s;
}

double combined_cost(const BmcSpec& curve, const WorkloadSummary& summary) {
  return to_double(global_cost_closed(curve, summary.global)) *
         to_double(local_cost_from_tables(curve, summary.tables));
}

}  // namespace bmc
