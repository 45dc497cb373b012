#include "bmc/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "bmc/error.hpp"

namespace bmc {

bool RangeQuery::contains(std::span<const Coord> point) const {
  for (int i = 0; i < dims(); ++i) {
    const Coord c = point[static_cast<std::size_t>(i)];
    if (c < lo[i] || c > hi[i]) return false;
  }
  return true;
}

void RangeQuery::validate(const Grid& grid) const {
  if (lo.dims() != grid.dims || hi.dims() != grid.dims) {
    throw ValidationError("query corner dimensionality does not match the grid");
  }
  if (!lo.inside(grid) || !hi.inside(grid)) {
    throw ValidationError("query corner outside the 2^" + std::to_string(grid.bits) + " grid");
  }
  for (int i = 0; i < grid.dims; ++i) {
    if (lo[i] > hi[i]) throw ValidationError("query has lo > hi in dimension " + std::to_string(i));
  }
}

Count cell_count(const RangeQuery& q) {
  Count cells = 1;
  for (int i = 0; i < q.dims(); ++i) cells *= Count{q.hi[i] - q.lo[i]} + 1;
  return cells;
}

void Workload::validate() const {
  grid.validate();
  for (const auto& q : queries) q.validate(grid);
}

Dataset::Dataset(Grid grid, std::vector<Coord> flat) : grid_(grid), flat_(std::move(flat)) {
  grid_.validate();
  if (flat_.size() % static_cast<std::size_t>(grid_.dims) != 0) {
    throw ValidationError("flat coordinate buffer is not a multiple of d");
  }
  const Coord max = grid_.max_coord();
  if (std::any_of(flat_.begin(), flat_.end(), [&](Coord c) { return c > max; })) {
    throw ValidationError("dataset point outside the grid");
  }
}

Dataset Dataset::prefix(std::size_t count) const {
  count = std::min(count, size());
  const auto d = static_cast<std::size_t>(grid_.dims);
  return Dataset(grid_, std::vector<Coord>(flat_.begin(), flat_.begin() + static_cast<std::ptrdiff_t>(count * d)));
}

DataKind parse_data_kind(std::string_view text) {
  if (text == "uni" || text == "UNI" || text == "uniform") return DataKind::kUniform;
  if (text == "skew" || text == "SKEW" || text == "skewed") return DataKind::kSkewed;
  throw ValidationError("unknown dataset kind '" + std::string(text) + "' (expected uni or skew)");
}

Dataset gen_dataset(DataKind kind, std::size_t count, Grid grid, std::uint64_t seed) {
  grid.validate();
  if (count == 0) throw ValidationError("dataset size must be >= 1");
  std::mt19937_64 rng(seed);
  const auto d = static_cast<std::size_t>(grid.dims);
  std::vector<Coord> flat(count * d);
  std::uniform_int_distribution<Coord> uniform(0, grid.max_coord());

  if (kind == DataKind::kUniform) {
    for (auto& c : flat) c = uniform(rng);
    return Dataset(grid, std::move(flat));
  }

  constexpr int kClusters = 5;
  const double side = std::ldexp(1.0, grid.bits);
  const double sigma = side / 64.0;
  std::vector<double> centres(kClusters * d);
  for (auto& c : centres) c = static_cast<double>(uniform(rng));
  std::uniform_int_distribution<int> pick(0, kClusters - 1);
  std::normal_distribution<double> noise(0.0, sigma);
  for (std::size_t p = 0; p < count; ++p) {
    const auto cluster = static_cast<std::size_t>(pick(rng));
    for (std::size_t i = 0; i < d; ++i) {
      double x;
      do {
        x = std::floor(centres[cluster * d + i] + noise(rng) + 0.5);
      } while (x < 0.0 || x >= side);
      flat[p * d + i] = static_cast<Coord>(x);
    }
  }
  return Dataset(grid, std::move(flat));
}

QueryExtent QueryExtent::cube(int dims, Coord edge) {
  return QueryExtent{std::vector<Coord>(static_cast<std::size_t>(dims), edge)};
}

QueryExtent QueryExtent::aspect(Coord area, double ratio_w, double ratio_h) {
  if (area == 0 || !(ratio_w > 0) || !(ratio_h > 0)) {
    throw ValidationError("aspect queries need a positive area and ratio");
  }
  const double width = std::round(std::sqrt(static_cast<double>(area) * ratio_w / ratio_h));
  const auto w = static_cast<Coord>(std::max(1.0, width));
  const auto h = static_cast<Coord>(std::max(1.0, std::round(static_cast<double>(area) / static_cast<double>(w))));
  return QueryExtent{{w, h}};
}

std::pair<double, double> parse_aspect(std::string_view text) {
  const auto colon = text.find(':');
  auto parse = [&](std::string_view part) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size() || !(v > 0)) {
      throw ValidationError("bad aspect ratio '" + std::string(text) + "' (expected e.g. 16:1)");
    }
    return v;
  };
  if (colon == std::string_view::npos) {
    throw ValidationError("bad aspect ratio '" + std::string(text) + "' (expected e.g. 16:1)");
  }
  return {parse(text.substr(0, colon)), parse(text.substr(colon + 1))};
}

Workload gen_queries(const Dataset& source, std::size_t count, const QueryExtent& extent,
                     std::uint64_t seed) {
  const Grid grid = source.grid();
  if (source.size() == 0) throw ValidationError("query generation needs a non-empty dataset");
  if (static_cast<int>(extent.edges.size()) != grid.dims) {
    throw ValidationError("query extent has " + std::to_string(extent.edges.size()) +
                          " sides for a " + std::to_string(grid.dims) + "-d grid");
  }
  for (Coord e : extent.edges) {
    if (e < 1 || e > grid.side()) {
      throw ValidationError("query edge " + std::to_string(e) + " outside [1, 2^" +
                            std::to_string(grid.bits) + "]");
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, source.size() - 1);
  Workload out{grid, {}};
  out.queries.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const auto centre = source.point(pick(rng));
    std::vector<Coord> lo(static_cast<std::size_t>(grid.dims));
    std::vector<Coord> hi(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
      const Coord edge = extent.edges[i];
      const Coord half = edge / 2;
      Coord start = centre[i] >= half ? centre[i] - half : 0;
      start = std::min(start, grid.side() - edge);
      lo[i] = start;
      hi[i] = start + edge - 1;
    }
    out.queries.push_back({GridPoint(std::move(lo)), GridPoint(std::move(hi))});
  }
  return out;
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    fields.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && ptr == field.data() + field.size() && std::isfinite(out);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

LoadedPoints load_points(const std::filesystem::path& path, Grid grid, const Bounds& bounds) {
  grid.validate();
  const auto d = static_cast<std::size_t>(grid.dims);
  if (bounds.min.size() != d || bounds.max.size() != d) {
    throw ValidationError("bounds must give a min and max per dimension");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!(bounds.max[i] > bounds.min[i])) {
      throw ValidationError("zero-width bounds in dimension " + std::to_string(i));
    }
  }
  auto in = open_input(path);
  const double scale = static_cast<double>(grid.max_coord());
  LoadedPoints out;
  std::vector<Coord> flat;
  std::string line;
  std::vector<double> row(d);
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv(line);
    bool ok = fields.size() >= d;
    for (std::size_t i = 0; ok && i < d; ++i) ok = parse_double(fields[i], row[i]);
    if (!ok) {
      if (!first) ++out.dropped_rows;
      first = false;
      continue;
    }
    first = false;
    for (std::size_t i = 0; i < d; ++i) {
      const double t = (row[i] - bounds.min[i]) / (bounds.max[i] - bounds.min[i]);
      const double cell = std::floor(std::clamp(t, 0.0, 1.0) * scale);
      flat.push_back(static_cast<Coord>(cell));
    }
  }
  if (in.bad()) throw IoError("read error on " + path.string());
  out.dataset = Dataset(grid, std::move(flat));
  return out;
}

Dataset load_grid_points(const std::filesystem::path& path, int bits) {
  auto in = open_input(path);
  std::string line;
  std::vector<Coord> flat;
  int dims = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv(line);
    if (dims == 0) dims = static_cast<int>(fields.size());
    if (static_cast<int>(fields.size()) != dims) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(dims) + " fields");
    }
    for (auto f : fields) {
      Coord c = 0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), c);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad coordinate '" +
                      std::string(f) + "'");
      }
      flat.push_back(c);
    }
  }
  if (dims == 0) throw IoError(path.string() + " holds no points");
  return Dataset(Grid{dims, bits}, std::move(flat));
}

void save_points(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  std::string line;
  for (std::size_t p = 0; p < dataset.size(); ++p) {
    line.clear();
    const auto pt = dataset.point(p);
    for (std::size_t i = 0; i < pt.size(); ++i) {
      if (i) line.push_back(',');
      line += std::to_string(pt[i]);
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw IoError("write error on " + path.string());
}

nlohmann::json to_json(const Workload& workload) {
  auto arr = nlohmann::json::array();
  for (const auto& q : workload.queries) {
    arr.push_back({{"lo", q.lo.vec()}, {"hi", q.hi.vec()}});
  }
  return arr;
}

Workload workload_from_json(const nlohmann::json& j, int bits, int dims) {
  if (!j.is_array()) throw ValidationError("workload JSON must be an array of queries");
  Workload w;
  w.grid.bits = bits;
  w.grid.dims = dims;
  try {
    for (const auto& item : j) {
      RangeQuery q{GridPoint(item.at("lo").get<std::vector<Coord>>()),
                   GridPoint(item.at("hi").get<std::vector<Coord>>())};
      if (w.grid.dims == 0) w.grid.dims = q.lo.dims();
      w.queries.push_back(std::move(q));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad workload JSON: ") + e.what());
  }
  if (w.grid.dims == 0) w.grid.dims = 1;
  w.validate();
  return w;
}

void save_workload(const std::filesystem::path& path, const Workload& workload) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(workload).dump() << '\n';
  if (!out) throw IoError("write error on " + path.string());
}

Workload load_workload(const std::filesystem::path& path, int bits, int dims) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return workload_from_json(j, bits, dims);
}

}  // namespace bmc
