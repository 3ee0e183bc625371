#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ted {

// Shortest decimal rendering that round-trips the exact double value.
std::string format_double(double v);
std::string format_int(int64_t v);

double parse_double(std::string_view s);
int64_t parse_int(std::string_view s);

std::vector<std::string_view> split_ws(std::string_view line);
std::vector<std::string_view> split(std::string_view line, char sep);

}  // namespace ted
