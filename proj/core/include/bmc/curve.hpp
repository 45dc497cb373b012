#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bmc/grid.hpp"

namespace bmc {

// A bit-merging curve: which dimension owns each of the d*l merged-bit ranks.
//
// Ranks are little-endian: rank 0 is the least significant bit of the curve
// value. The j-th occurrence of dimension i counted from rank 0 upward carries
// bit j (0-based) of that dimension's coordinate, so bits of one dimension are
// never reordered relative to each other.
class BmcSpec {
 public:
  // `slots_lsb_first[r]` is the dimension owning rank r.
  BmcSpec(Grid grid, std::vector<int> slots_lsb_first);

  const Grid& grid() const { return grid_; }
  int dims() const { return grid_.dims; }
  int bits() const { return grid_.bits; }
  int width() const { return grid_.width(); }

  // Dimension owning rank r.
  int slot(int rank) const { return slot_dim_[static_cast<std::size_t>(rank)]; }
  // Which bit (0-based, LSB first) of its dimension rank r carries.
  int slot_bit(int rank) const { return slot_bit_[static_cast<std::size_t>(rank)]; }
  // Rank of bit `bit` (0-based) of dimension `dim`.
  int rank(int dim, int bit) const {
    return rank_[static_cast<std::size_t>(dim * grid_.bits + bit)];
  }

  std::vector<int> slots_lsb_first() const;
  std::vector<int> slots_msb_first() const;

  friend bool operator==(const BmcSpec& a, const BmcSpec& b) {
    return a.grid_ == b.grid_ && a.slot_dim_ == b.slot_dim_;
  }

 private:
  Grid grid_;
  std::vector<std::uint8_t> slot_dim_;
  std::vector<std::uint8_t> slot_bit_;
  std::vector<std::uint8_t> rank_;
};

// Text form: leftmost token is the most significant rank. For d <= 3 the
// alphabet is X/Y/Z; for d > 3 tokens are "d<k>" joined by dots ("d0.d3.d1").
BmcSpec parse_bmc(std::string_view text, int dims, int bits);
std::string render_bmc(const BmcSpec& curve);

CurveValue curve_value(const BmcSpec& curve, std::span<const Coord> point);
inline CurveValue curve_value(const BmcSpec& curve, const GridPoint& point) {
  return curve_value(curve, point.coords());
}
// Same as curve_value without range checks; callers guarantee validity.
CurveValue curve_value_unchecked(const BmcSpec& curve, std::span<const Coord> point);

GridPoint curve_decode(const BmcSpec& curve, CurveValue value);

enum class StandardCurve {
  kZOrder,         // perfect interleaving, XYXY...
  kLexicographic,  // one dimension's bits all most significant, XX..YY..
};

// For kLexicographic, `leading_dim` owns the most significant bits and the
// remaining dimensions follow in ascending order. Ignored for kZOrder.
BmcSpec standard_curve(StandardCurve kind, Grid grid, int leading_dim = 0);

// {"d": .., "l": .., "slots": [..]} with slots listed MSB first.
nlohmann::json to_json(const BmcSpec& curve);
BmcSpec bmc_from_json(const nlohmann::json& j);

}  // namespace bmc
