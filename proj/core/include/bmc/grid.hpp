#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace bmc {

using Coord = std::uint64_t;
using CurveValue = std::uint64_t;

// Largest supported d * l; curve values are single 64-bit words.
inline constexpr int kMaxCurveBits = 64;

// A 2^bits-per-dimension grid in `dims` dimensions.
struct Grid {
  int dims = 0;
  int bits = 0;

  int width() const { return dims * bits; }
  Coord side() const { return Coord{1} << bits; }
  Coord max_coord() const { return side() - 1; }

  // Throws ValidationError unless 1 <= dims, 1 <= bits, dims * bits <= 64.
  void validate() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

class GridPoint {
 public:
  GridPoint() = default;
  explicit GridPoint(std::vector<Coord> coords) : coords_(std::move(coords)) {}
  GridPoint(std::initializer_list<Coord> coords) : coords_(coords) {}

  int dims() const { return static_cast<int>(coords_.size()); }
  Coord operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  Coord& operator[](int i) { return coords_[static_cast<std::size_t>(i)]; }
  std::span<const Coord> coords() const { return coords_; }
  const std::vector<Coord>& vec() const { return coords_; }

  bool inside(const Grid& grid) const;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;

 private:
  std::vector<Coord> coords_;
};

}  // namespace bmc
