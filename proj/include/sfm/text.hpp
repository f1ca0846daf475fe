#pragma once

// Small text helpers shared by the file formats.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sfm::text {

/// Shortest decimal representation that round-trips exactly.
std::string fmt(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

std::vector<std::string_view> split_ws(std::string_view line);
std::string_view trim(std::string_view s);

/// Writes `content` to a sibling temp file and renames it over `path`.
void atomic_write(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string digest(std::string_view bytes);

}  // namespace sfm::text
