#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aosa::csv {

/// Shortest representation that parses back to the same double; "nan" for NaN.
std::string format(double value);

std::vector<std::string> split(std::string_view line);

/// Whole-cell parse; failures throw DataError mentioning `where`.
double parse_double(std::string_view cell, std::string_view where);
std::uint64_t parse_uint(std::string_view cell, std::string_view where);

/// Writes via a temporary sibling and rename.
void write_file_atomic(const std::string& path, std::string_view contents);

}  // namespace aosa::csv
