#include "rlr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "rlr/error.hpp"

namespace rlr {

double relative_error(const DenseMatrix& a, const DenseMatrix& b) {
    const double num = frobenius_norm(a - b);
    const double den = frobenius_norm(b);
    if (den == 0.0) {
        if (num == 0.0) return 0.0;
        throw Error(ErrorCode::InvalidArgument, "relative error against an all-zero reference");
    }
    return num / den;
}

bool same_order(double e1, double e2) noexcept {
    if (e1 == 0.0 && e2 == 0.0) return true;
    if (e1 == 0.0 || e2 == 0.0) return false;
    return 10.0 * e1 >= e2 && e1 <= 10.0 * e2;
}

ErrorReport compute_error_report(const DenseMatrix& original, const DenseMatrix& lowrank,
                                 const DenseMatrix& reconstructed) {
    ErrorReport r;
    r.epsilon1 = relative_error(reconstructed, lowrank);
    r.epsilon2 = relative_error(reconstructed, original);
    r.same_order = same_order(r.epsilon1, r.epsilon2);
    return r;
}

std::size_t Histogram::total() const noexcept { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

std::vector<double> shared_bin_edges(const std::vector<const DenseMatrix*>& fields, double bin_width) {
    if (!(bin_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "bin width must be positive");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto* f : fields) {
        for (double x : f->data()) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    if (!std::isfinite(lo)) throw Error(ErrorCode::EmptyMatrix, "no values to bin");
    const double start = std::floor(lo / bin_width) * bin_width;
    const auto bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor((hi - start) / bin_width)) + 1);
    std::vector<double> edges(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) edges[k] = start + static_cast<double>(k) * bin_width;
    return edges;
}

Histogram histogram(const DenseMatrix& field, const std::vector<double>& edges) {
    if (edges.size() < 2) throw Error(ErrorCode::InvalidArgument, "histogram needs at least two edges");
    Histogram h{edges, std::vector<std::size_t>(edges.size() - 1, 0)};
    for (double x : field.data()) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        auto bin = static_cast<std::ptrdiff_t>(it - edges.begin()) - 1;
        bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(h.counts.size()) - 1);
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    return h;
}

std::vector<std::uint8_t> render_gray(const DenseMatrix& field, const ObservationSet* mask) {
    if (mask && (mask->rows() != field.rows() || mask->cols() != field.cols())) {
        throw Error(ErrorCode::ShapeMismatch, "mask and field shapes differ");
    }
    const auto d = field.data();
    if (d.empty()) return {};
    const auto [mn, mx] = std::minmax_element(d.begin(), d.end());
    const double lo = *mn;
    const double span = *mx - *mn;
    const double base = mask ? 1.0 : 0.0;
    auto level = [&](double x) -> std::uint8_t {
        if (span == 0.0) return 128;
        return static_cast<std::uint8_t>(std::lround(base + (255.0 - base) * (x - lo) / span));
    };
    std::vector<std::uint8_t> px(d.size(), 0);
    if (mask) {
        for (const auto& e : mask->entries()) px[e.row * field.cols() + e.col] = level(field(e.row, e.col));
    } else {
        std::transform(d.begin(), d.end(), px.begin(), level);
    }
    return px;
}

void write_pgm(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
               const std::vector<std::uint8_t>& pixels) {
    if (pixels.size() != rows * cols) throw Error(ErrorCode::ShapeMismatch, "pixel count does not match the image size");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    os << "P5\n" << cols << ' ' << rows << "\n255\n";
    os.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (!os) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace rlr
