#include "bmc/hilbert.hpp"

#include <array>
#include <string>

#include "bmc/error.hpp"

namespace bmc {

namespace {

constexpr int kMaxDims = 3;

void check_geometry(int dims, int bits) {
  if (dims < 2 || dims > kMaxDims) {
    throw ValidationError("Hilbert ordering supports d in {2, 3}, got " + std::to_string(dims));
  }
  Grid{dims, bits}.validate();
}

}  // namespace

// Skilling, "Programming the Hilbert curve": axes -> transposed index.
CurveValue hilbert_index(std::span<const Coord> point, int bits) {
  const int n = static_cast<int>(point.size());
  check_geometry(n, bits);
  std::array<Coord, kMaxDims> x{};
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = point[static_cast<std::size_t>(i)];
    if (bits < 64 && (x[static_cast<std::size_t>(i)] >> bits) != 0) {
      throw ValidationError("coordinate outside the grid");
    }
  }
  const Coord top = Coord{1} << (bits - 1);
  for (Coord q = top; q > 1; q >>= 1) {
    const Coord p = q - 1;
    for (int i = 0; i < n; ++i) {
      auto& xi = x[static_cast<std::size_t>(i)];
      if (xi & q) {
        x[0] ^= p;
      } else {
        const Coord t = (x[0] ^ xi) & p;
        x[0] ^= t;
        xi ^= t;
      }
    }
  }
  for (int i = 1; i < n; ++i) x[static_cast<std::size_t>(i)] ^= x[static_cast<std::size_t>(i - 1)];
  Coord t = 0;
  for (Coord q = top; q > 1; q >>= 1) {
    if (x[static_cast<std::size_t>(n - 1)] & q) t ^= q - 1;
  }
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] ^= t;

  CurveValue h = 0;
  for (int b = bits - 1; b >= 0; --b) {
    for (int i = 0; i < n; ++i) h = (h << 1) | ((x[static_cast<std::size_t>(i)] >> b) & 1u);
  }
  return h;
}

GridPoint hilbert_decode(CurveValue value, int dims, int bits) {
  check_geometry(dims, bits);
  const int width = dims * bits;
  if (width < 64 && (value >> width) != 0) throw ValidationError("Hilbert value outside the grid");
  std::array<Coord, kMaxDims> x{};
  int pos = width - 1;
  for (int b = bits - 1; b >= 0; --b) {
    for (int i = 0; i < dims; ++i, --pos) {
      x[static_cast<std::size_t>(i)] |= ((value >> pos) & 1u) << b;
    }
  }
  const int n = dims;
  Coord t = x[static_cast<std::size_t>(n - 1)] >> 1;
  for (int i = n - 1; i > 0; --i) x[static_cast<std::size_t>(i)] ^= x[static_cast<std::size_t>(i - 1)];
  x[0] ^= t;
  for (int shift = 1; shift < bits; ++shift) {
    const Coord q = Coord{1} << shift;
    const Coord p = q - 1;
    for (int i = n - 1; i >= 0; --i) {
      auto& xi = x[static_cast<std::size_t>(i)];
      if (xi & q) {
        x[0] ^= p;
      } else {
        t = (x[0] ^ xi) & p;
        x[0] ^= t;
        xi ^= t;
      }
    }
  }
  return GridPoint(std::vector<Coord>(x.begin(), x.begin() + n));
}

}  // namespace bmc
