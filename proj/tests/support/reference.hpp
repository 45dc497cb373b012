#pragma once

// Reference computations written straight from the definitions, without
// reusing any library code path. Slow on purpose.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "bmc/workload.hpp"

namespace bmc::testing {

// Curve value from an MSB-first string of dimension letters (X, Y, Z). The
// rightmost letter of each dimension takes that dimension's lowest bit.
inline std::uint64_t ref_value(const std::string& msb_first, const std::vector<std::uint64_t>& p) {
  std::map<int, int> next_bit;
  std::uint64_t v = 0;
  const int w = static_cast<int>(msb_first.size());
  for (int pos = w - 1; pos >= 0; --pos) {
    const int dim = msb_first[static_cast<std::size_t>(pos)] - 'X';
    const int rank = w - 1 - pos;
    const int bit = next_bit[dim]++;
    v |= ((p[static_cast<std::size_t>(dim)] >> bit) & 1U) << rank;
  }
  return v;
}

// Steps x -> x+1 inside [lo, hi] where bit k (1-based) turns on and every
// bit below it turns off.
inline std::uint64_t ref_rise(std::uint64_t lo, std::uint64_t hi, int k) {
  std::uint64_t n = 0;
  const std::uint64_t mod = std::uint64_t{1} << k;
  for (std::uint64_t x = lo; x < hi; ++x) {
    if ((x + 1) % mod == mod / 2) ++n;
  }
  return n;
}

// Aligned blocks of 2^k values fully inside [lo, hi].
inline std::uint64_t ref_drop(std::uint64_t lo, std::uint64_t hi, int k) {
  std::uint64_t n = 0;
  const std::uint64_t size = std::uint64_t{1} << k;
  for (std::uint64_t start = 0; start <= hi; start += size) {
    if (start >= lo && start + size - 1 <= hi) ++n;
  }
  return n;
}

inline RangeQuery random_query(std::mt19937_64& rng, const Grid& grid) {
  std::uniform_int_distribution<Coord> coord(0, grid.max_coord());
  std::vector<Coord> lo(static_cast<std::size_t>(grid.dims)), hi(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    Coord a = coord(rng), b = coord(rng);
    if (a > b) std::swap(a, b);
    lo[i] = a;
    hi[i] = b;
  }
  return {GridPoint(lo), GridPoint(hi)};
}

// [0,4] x [2,3] on an 8x8 grid.
inline RangeQuery worked_query() { return {GridPoint{0, 2}, GridPoint{4, 3}}; }

}  // namespace bmc::testing
