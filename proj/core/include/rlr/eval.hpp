#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "rlr/completion.hpp"
#include "rlr/matrix.hpp"

namespace rlr {

/// epsilon1 compares the reconstruction with the low-rank matrix that was
/// sampled, epsilon2 with the original full-rank field.
struct ErrorReport {
    double epsilon1 = 0.0;
    double epsilon2 = 0.0;
    /// epsilon1 / epsilon2 within [0.1, 10] (both zero counts as the same order).
    bool same_order = true;
};

/// ||a - b||_F / ||b||_F; zero when a == b. Throws ShapeMismatch, or
/// InvalidArgument when b is zero but a is not.
double relative_error(const DenseMatrix& a, const DenseMatrix& b);

ErrorReport compute_error_report(const DenseMatrix& original, const DenseMatrix& lowrank,
                                 const DenseMatrix& reconstructed);
bool same_order(double e1, double e2) noexcept;

struct Histogram {
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;

    std::size_t total() const noexcept;
};

/// Uniform edges starting at floor(min / width) * width and covering max.
std::vector<double> shared_bin_edges(const std::vector<const DenseMatrix*>& fields, double bin_width = 1.0);
/// Values beyond the outer edges are clamped into the end bins; the last bin
/// is closed on the right.
Histogram histogram(const DenseMatrix& field, const std::vector<double>& edges);

/// 8-bit gray levels, row-major. Values map linearly from [min, max] onto
/// [0, 255]; a constant field maps to 128. With a mask, observed cells use
/// [1, 255] and unobserved cells are 0.
std::vector<std::uint8_t> render_gray(const DenseMatrix& field, const ObservationSet* mask = nullptr);
/// Binary P5 graymap.
void write_pgm(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
               const std::vector<std::uint8_t>& pixels);

}  // namespace rlr
