#include "text_util.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rlr/error.hpp"

namespace rlr::detail {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string_view trim(std::string_view s) noexcept {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view field, const std::filesystem::path& path, std::size_t lineno) {
    double x = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, x);
    if (ec != std::errc{} || ptr != end || field.empty()) {
        throw Error(ErrorCode::Format, path.string() + ":" + std::to_string(lineno) + ": bad number '" +
                                           std::string(field) + "'");
    }
    if (!std::isfinite(x)) {
        throw Error(ErrorCode::NonFinite, path.string() + ":" + std::to_string(lineno) + ": non-finite value");
    }
    return x;
}

long long parse_integer(std::string_view field, const std::filesystem::path& path, std::size_t lineno) {
    long long x = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, x);
    if (ec != std::errc{} || ptr != end || field.empty()) {
        throw Error(ErrorCode::Format, path.string() + ":" + std::to_string(lineno) + ": bad integer '" +
                                           std::string(field) + "'");
    }
    return x;
}

void append_double(std::string& out, double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, ptr);
}

}  // namespace rlr::detail
