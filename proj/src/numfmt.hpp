#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace constellation::detail {

// Shortest round-trip decimal in fixed notation, always carrying a decimal
// point ("7000.0", "0.4").
inline std::string format_real(double value) {
  char buf[512];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc{}) {
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    end = res.ptr;
  }
  std::string out(buf, end);
  if (out.find_first_of(".eni") == std::string::npos) out += ".0";
  return out;
}

inline std::string format_count(std::int64_t value) { return std::to_string(value) + ".0"; }

}  // namespace constellation::detail
