#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bmc/grid.hpp"
#include "bmc/wide_int.hpp"

namespace bmc {

// Closed per-dimension intervals [lo[i], hi[i]].
struct RangeQuery {
  GridPoint lo;
  GridPoint hi;

  int dims() const { return lo.dims(); }
  bool contains(std::span<const Coord> point) const;
  // Throws ValidationError unless lo <= hi componentwise, both on the grid.
  void validate(const Grid& grid) const;

  friend bool operator==(const RangeQuery&, const RangeQuery&) = default;
};

Count cell_count(const RangeQuery& q);

struct Workload {
  Grid grid;
  std::vector<RangeQuery> queries;

  std::size_t size() const { return queries.size(); }
  void validate() const;
};

// Points stored row-major in one buffer.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Grid grid, std::vector<Coord> flat);

  const Grid& grid() const { return grid_; }
  std::size_t size() const {
    return grid_.dims == 0 ? 0 : flat_.size() / static_cast<std::size_t>(grid_.dims);
  }
  std::span<const Coord> point(std::size_t i) const {
    const auto d = static_cast<std::size_t>(grid_.dims);
    return {flat_.data() + i * d, d};
  }
  const std::vector<Coord>& flat() const { return flat_; }

  // Rows [0, count), used for nested cardinality sweeps.
  Dataset prefix(std::size_t count) const;

 private:
  Grid grid_;
  std::vector<Coord> flat_;
};

enum class DataKind { kUniform, kSkewed };

DataKind parse_data_kind(std::string_view text);

// UNI: i.i.d. uniform cells. SKEW: five Gaussian clusters with uniform centres
// and per-dimension std 2^l / 64; samples outside the grid are redrawn.
Dataset gen_dataset(DataKind kind, std::size_t count, Grid grid, std::uint64_t seed);

// Per-dimension query side lengths in cells.
struct QueryExtent {
  std::vector<Coord> edges;

  static QueryExtent cube(int dims, Coord edge);
  // Two-dimensional extent with width:height = ratio_w:ratio_h and the given
  // area (cells); width = round(sqrt(area * ratio_w / ratio_h)).
  static QueryExtent aspect(Coord area, double ratio_w, double ratio_h);
};

// Parses "16:1" style ratios.
std::pair<double, double> parse_aspect(std::string_view text);

// Each query is centred on a point drawn from `source` and shifted (not
// shrunk) to stay inside the grid, so every query has exactly `extent` sides.
Workload gen_queries(const Dataset& source, std::size_t count, const QueryExtent& extent,
                     std::uint64_t seed);

// Per-dimension raw bounds for quantising external coordinates.
struct Bounds {
  std::vector<double> min;
  std::vector<double> max;
};

struct LoadedPoints {
  Dataset dataset;
  std::size_t dropped_rows = 0;
};

// CSV rows of `grid.dims` numeric fields. Each value maps to
// floor((x - min) / (max - min) * (2^l - 1)), clamped to the grid. Rows with
// missing or non-numeric fields are dropped and counted; a leading header row
// is skipped.
LoadedPoints load_points(const std::filesystem::path& path, Grid grid, const Bounds& bounds);

// Grid-coordinate CSV (as written by save_points); no quantisation.
Dataset load_grid_points(const std::filesystem::path& path, int bits);
void save_points(const std::filesystem::path& path, const Dataset& dataset);

// [{"lo": [..], "hi": [..]}, ...]
nlohmann::json to_json(const Workload& workload);
// `dims` = 0 infers the dimensionality from the first query (1 if empty).
Workload workload_from_json(const nlohmann::json& j, int bits, int dims = 0);
void save_workload(const std::filesystem::path& path, const Workload& workload);
Workload load_workload(const std::filesystem::path& path, int bits, int dims = 0);

}  // namespace bmc
