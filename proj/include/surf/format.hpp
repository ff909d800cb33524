#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace surf {

/// Shortest round-trip decimal form; identical bytes for identical doubles.
inline std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

}  // namespace surf
