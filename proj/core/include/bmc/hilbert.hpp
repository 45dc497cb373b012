#pragma once

#include <span>

#include "bmc/grid.hpp"

namespace bmc {

// Hilbert index via the transpose / Gray-code rotation construction.
// Supports d in {2, 3}; throws ValidationError otherwise.
CurveValue hilbert_index(std::span<const Coord> point, int bits);
GridPoint hilbert_decode(CurveValue value, int dims, int bits);

}  // namespace bmc
