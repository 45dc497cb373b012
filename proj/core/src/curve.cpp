#include "bmc/curve.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include <nlohmann/json.hpp>

#include "bmc/error.hpp"

namespace bmc {

void Grid::validate() const {
  if (dims < 1) throw ValidationError("dimension count must be >= 1");
  if (bits < 1) throw ValidationError("bits per dimension must be >= 1");
  if (dims * bits > kMaxCurveBits) {
    throw ValidationError("d * l = " + std::to_string(dims * bits) + " exceeds " +
                          std::to_string(kMaxCurveBits) + " bits");
  }
}

bool GridPoint::inside(const Grid& grid) const {
  if (dims() != grid.dims) return false;
  return std::all_of(coords_.begin(), coords_.end(),
                     [&](Coord c) { return c <= grid.max_coord(); });
}

BmcSpec::BmcSpec(Grid grid, std::vector<int> slots_lsb_first) : grid_(grid) {
  grid_.validate();
  if (static_cast<int>(slots_lsb_first.size()) != grid_.width()) {
    throw ValidationError("curve has " + std::to_string(slots_lsb_first.size()) +
                          " slots, expected " + std::to_string(grid_.width()));
  }
  const auto width = static_cast<std::size_t>(grid_.width());
  slot_dim_.resize(width);
  slot_bit_.resize(width);
  rank_.assign(width, 0);
  std::vector<int> seen(static_cast<std::size_t>(grid_.dims), 0);
  for (std::size_t r = 0; r < width; ++r) {
    const int dim = slots_lsb_first[r];
    if (dim < 0 || dim >= grid_.dims) {
      throw ValidationError("slot dimension " + std::to_string(dim) + " out of range");
    }
    const int bit = seen[static_cast<std::size_t>(dim)]++;
    if (bit >= grid_.bits) {
      throw ValidationError("dimension " + std::to_string(dim) + " appears more than " +
                            std::to_string(grid_.bits) + " times");
    }
    slot_dim_[r] = static_cast<std::uint8_t>(dim);
    slot_bit_[r] = static_cast<std::uint8_t>(bit);
    rank_[static_cast<std::size_t>(dim * grid_.bits + bit)] = static_cast<std::uint8_t>(r);
  }
  // Counts sum to the width, so no dimension can fall short once none overflows.
}

std::vector<int> BmcSpec::slots_lsb_first() const {
  return {slot_dim_.begin(), slot_dim_.end()};
}

std::vector<int> BmcSpec::slots_msb_first() const {
  return {slot_dim_.rbegin(), slot_dim_.rend()};
}

namespace {

constexpr char kLetters[] = {'X', 'Y', 'Z'};

std::vector<std::string_view> split_tokens(std::string_view text, int dims) {
  std::vector<std::string_view> tokens;
  if (dims <= 3) {
    for (std::size_t i = 0; i < text.size(); ++i) tokens.push_back(text.substr(i, 1));
    return tokens;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto dot = text.find('.', start);
    const auto end = dot == std::string_view::npos ? text.size() : dot;
    tokens.push_back(text.substr(start, end - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return tokens;
}

int token_dimension(std::string_view token, int dims) {
  if (dims <= 3) {
    if (token.size() == 1) {
      const char c = static_cast<char>(token[0] & ~0x20);  // upper-case
      for (int i = 0; i < dims; ++i) {
        if (c == kLetters[i]) return i;
      }
    }
    throw ValidationError("unknown curve token '" + std::string(token) + "'");
  }
  int dim = -1;
  if (token.size() >= 2 && token[0] == 'd') {
    const auto* first = token.data() + 1;
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, dim);
    if (ec != std::errc{} || ptr != last) dim = -1;
  }
  if (dim < 0 || dim >= dims) {
    throw ValidationError("unknown curve token '" + std::string(token) + "'");
  }
  return dim;
}

}  // namespace

BmcSpec parse_bmc(std::string_view text, int dims, int bits) {
  Grid grid{dims, bits};
  grid.validate();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) {
    text.remove_suffix(1);
  }
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  const auto tokens = split_tokens(text, dims);
  if (static_cast<int>(tokens.size()) != grid.width()) {
    throw ValidationError("curve '" + std::string(text) + "' has " +
                          std::to_string(tokens.size()) + " tokens, expected d * l = " +
                          std::to_string(grid.width()));
  }
  std::vector<int> slots(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    slots[tokens.size() - 1 - i] = token_dimension(tokens[i], dims);
  }
  return BmcSpec(grid, std::move(slots));
}

std::string render_bmc(const BmcSpec& curve) {
  std::string out;
  for (int r = curve.width() - 1; r >= 0; --r) {
    const int dim = curve.slot(r);
    if (curve.dims() <= 3) {
      out.push_back(kLetters[dim]);
    } else {
      if (!out.empty()) out.push_back('.');
      out += "d" + std::to_string(dim);
    }
  }
  return out;
}

CurveValue curve_value_unchecked(const BmcSpec& curve, std::span<const Coord> point) {
  CurveValue v = 0;
  const int width = curve.width();
  for (int r = 0; r < width; ++r) {
    const Coord c = point[static_cast<std::size_t>(curve.slot(r))];
    v |= ((c >> curve.slot_bit(r)) & 1u) << r;
  }
  return v;
}

CurveValue curve_value(const BmcSpec& curve, std::span<const Coord> point) {
  if (static_cast<int>(point.size()) != curve.dims()) {
    throw ValidationError("point has " + std::to_string(point.size()) + " coordinates, curve has " +
                          std::to_string(curve.dims()) + " dimensions");
  }
  const Coord max = curve.grid().max_coord();
  for (Coord c : point) {
    if (c > max) throw ValidationError("coordinate " + std::to_string(c) + " outside the grid");
  }
  return curve_value_unchecked(curve, point);
}

GridPoint curve_decode(const BmcSpec& curve, CurveValue value) {
  const int width = curve.width();
  if (width < 64 && (value >> width) != 0) {
    throw ValidationError("curve value " + std::to_string(value) + " exceeds " +
                          std::to_string(width) + " bits");
  }
  std::vector<Coord> coords(static_cast<std::size_t>(curve.dims()), 0);
  for (int r = 0; r < width; ++r) {
    coords[static_cast<std::size_t>(curve.slot(r))] |= ((value >> r) & 1u) << curve.slot_bit(r);
  }
  return GridPoint(std::move(coords));
}

BmcSpec standard_curve(StandardCurve kind, Grid grid, int leading_dim) {
  grid.validate();
  std::vector<int> msb_first;
  msb_first.reserve(static_cast<std::size_t>(grid.width()));
  if (kind == StandardCurve::kZOrder) {
    for (int b = 0; b < grid.bits; ++b) {
      for (int i = 0; i < grid.dims; ++i) msb_first.push_back(i);
    }
  } else {
    if (leading_dim < 0 || leading_dim >= grid.dims) {
      throw ValidationError("leading dimension out of range");
    }
    msb_first.insert(msb_first.end(), static_cast<std::size_t>(grid.bits), leading_dim);
    for (int i = 0; i < grid.dims; ++i) {
      if (i != leading_dim) msb_first.insert(msb_first.end(), static_cast<std::size_t>(grid.bits), i);
    }
  }
  std::reverse(msb_first.begin(), msb_first.end());
  return BmcSpec(grid, std::move(msb_first));
}

nlohmann::json to_json(const BmcSpec& curve) {
  return {{"d", curve.dims()}, {"l", curve.bits()}, {"slots", curve.slots_msb_first()}};
}

BmcSpec bmc_from_json(const nlohmann::json& j) {
  try {
    auto slots = j.at("slots").get<std::vector<int>>();
    std::reverse(slots.begin(), slots.end());
    return BmcSpec(Grid{j.at("d").get<int>(), j.at("l").get<int>()}, std::move(slots));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad curve JSON: ") + e.what());
  }
}

}  // namespace bmc
