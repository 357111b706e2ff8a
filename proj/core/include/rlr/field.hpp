#pragma once

#include <cstddef>
#include <cstdint>

#include "rlr/matrix.hpp"

namespace rlr {

/// Synthetic range x azimuth reflectivity field. Defaults are synthetic
/// values, not statistics of any observed storm.
struct FieldSpec {
    std::size_t n_range = 200;
    std::size_t n_azimuth = 100;
    double correlation_length_range = 20.0;    // cells
    double correlation_length_azimuth = 10.0;  // cells
    double mean_dbz = 30.0;
    double std_dbz = 8.0;
    double coverage_fraction = 1.0;
    double floor_dbz = 0.0;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument on dimensions < 2, negative lengths or
    /// coverage outside [0, 1].
    void validate() const;
};

/// Seeded white noise smoothed separably by Gaussian kernels (half-sample
/// reflection at the edges). The highest-valued cells, round(coverage m n)
/// of them, are mapped affinely to mean_dbz / std_dbz (and kept above the
/// floor when coverage < 1); every other cell is set to floor_dbz.
DenseMatrix synthesize_field(const FieldSpec& spec);

/// Fraction of entries strictly above `wet_threshold_dbz`.
double coverage_fraction_of(const DenseMatrix& field, double wet_threshold_dbz) noexcept;

}  // namespace rlr
