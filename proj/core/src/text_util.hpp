#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rlr::detail {

std::string slurp(const std::filesystem::path& path);
std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split(std::string_view s, char sep);
double parse_double(std::string_view field, const std::filesystem::path& path, std::size_t lineno);
long long parse_integer(std::string_view field, const std::filesystem::path& path, std::size_t lineno);
/// Shortest representation that round-trips exactly.
void append_double(std::string& out, double x);

}  // namespace rlr::detail
