#include "bmc/wide_int.hpp"

#include <algorithm>

#include "bmc/error.hpp"

namespace bmc {

std::string to_string(Count value) {
  if (value == 0) return "0";
  std::string out;
  while (value != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string to_string(SignedCount value) {
  if (value < 0) return "-" + to_string(static_cast<Count>(-(value + 1)) + 1);
  return to_string(static_cast<Count>(value));
}

Count parse_count(std::string_view text) {
  if (text.empty()) throw ValidationError("empty integer");
  constexpr Count kMax = ~Count{0};
  Count value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw ValidationError("not a decimal integer: " + std::string(text));
    const auto digit = static_cast<unsigned>(c - '0');
    if (value > (kMax - digit) / 10) throw ValidationError("integer overflow: " + std::string(text));
    value = value * 10 + digit;
  }
  return value;
}

}  // namespace bmc
