#pragma once

#include <string>
#include <string_view>

namespace bmc {

// Workload totals (cells, global cost, pattern-table cells) reach n * 2^64.
__extension__ using Count = unsigned __int128;
__extension__ using SignedCount = __int128;

std::string to_string(Count value);
std::string to_string(SignedCount value);

// Parses a non-negative decimal string; throws ValidationError on bad input.
Count parse_count(std::string_view text);

inline double to_double(Count value) { return static_cast<double>(value); }

}  // namespace bmc
