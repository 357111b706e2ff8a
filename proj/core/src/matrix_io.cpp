#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "rlr/error.hpp"
#include "rlr/matrix.hpp"
#include "text_util.hpp"

namespace rlr {

namespace {

constexpr std::array<char, 4> kMagic{'R', 'L', 'R', 'M'};

void put_u32(std::ostream& os, std::uint32_t x) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xFFu);
    os.write(b.data(), b.size());
}

void put_f64(std::ostream& os, double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
    os.write(b.data(), b.size());
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
    std::uint64_t x = 0;
    for (int i = 0; i < bytes; ++i) x |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return x;
}

DenseMatrix read_binary(const std::string& blob, const std::filesystem::path& path) {
    if (blob.size() < 12) throw Error(ErrorCode::Format, path.string() + ": truncated header");
    const auto* p = reinterpret_cast<const unsigned char*>(blob.data());
    const auto m = static_cast<std::size_t>(get_le(p + 4, 4));
    const auto n = static_cast<std::size_t>(get_le(p + 8, 4));
    if (blob.size() != 12 + 8 * m * n) {
        throw Error(ErrorCode::Format, path.string() + ": payload size does not match " + std::to_string(m) + "x" +
                                           std::to_string(n));
    }
    std::vector<double> data(m * n);
    for (std::size_t k = 0; k < data.size(); ++k) data[k] = std::bit_cast<double>(get_le(p + 12 + 8 * k, 8));
    DenseMatrix a(m, n, std::move(data));
    if (!a.all_finite()) throw Error(ErrorCode::NonFinite, path.string() + ": NaN or Inf entry");
    return a;
}

DenseMatrix read_csv(const std::string& text, const std::filesystem::path& path) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> data;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        const auto fields = detail::split(trimmed, ',');
        if (rows == 0) cols = fields.size();
        if (fields.size() != cols) {
            throw Error(ErrorCode::Format, path.string() + ":" + std::to_string(lineno) + ": expected " +
                                               std::to_string(cols) + " columns");
        }
        for (auto f : fields) data.push_back(detail::parse_double(f, path, lineno));
        ++rows;
    }
    if (rows == 0) throw Error(ErrorCode::EmptyMatrix, path.string() + ": no rows");
    return DenseMatrix(rows, cols, std::move(data));
}

}  // namespace

DenseMatrix read_matrix(const std::filesystem::path& path) {
    const std::string blob = detail::slurp(path);
    if (blob.size() >= 4 && std::equal(kMagic.begin(), kMagic.end(), blob.begin())) return read_binary(blob, path);
    return read_csv(blob, path);
}

void write_matrix(const std::filesystem::path& path, const DenseMatrix& a, MatrixFormat format) {
    if (!a.all_finite()) throw Error(ErrorCode::NonFinite, "refusing to write NaN or Inf");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    if (format == MatrixFormat::Binary) {
        os.write(kMagic.data(), kMagic.size());
        put_u32(os, static_cast<std::uint32_t>(a.rows()));
        put_u32(os, static_cast<std::uint32_t>(a.cols()));
        for (double x : a.data()) put_f64(os, x);
    } else {
        std::string line;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            line.clear();
            for (std::size_t j = 0; j < a.cols(); ++j) {
                if (j) line += ',';
                detail::append_double(line, a(i, j));
            }
            line += '\n';
            os << line;
        }
    }
    if (!os) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace rlr
