#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rlr/completion.hpp"
#include "rlr/matrix.hpp"

namespace rlr {

enum class SamplingScheme {
    /// Entries drawn uniformly without replacement.
    UniformEntries,
    /// A fast scan: some azimuth columns are dwelt on fully, the rest only
    /// contribute stray samples.
    AzimuthMiss,
};

struct MaskSpec {
    SamplingScheme scheme = SamplingScheme::UniformEntries;
    double fraction = 1.0 / 3.0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::uint64_t seed = 0;
    /// Fraction of azimuth columns retained in full (AzimuthMiss only);
    /// defaults to fraction / 2.
    std::optional<double> dwell_ratio;

    void validate() const;
    std::size_t target_count() const noexcept;
};

struct Index2 {
    std::size_t row = 0;
    std::size_t col = 0;

    friend auto operator<=>(const Index2&, const Index2&) = default;
};

/// Sorted row-major. UniformEntries yields exactly round(p m n) positions;
/// AzimuthMiss keeps round(dwell n) full columns and fills up to the same
/// total from the remaining columns. Throws InfeasibleFraction when the
/// full columns alone exceed the target.
std::vector<Index2> make_mask(const MaskSpec& spec);

/// Throws OutOfBounds / DuplicateIndex / EmptyObservation.
ObservationSet apply_mask(const DenseMatrix& field, const std::vector<Index2>& omega);

}  // namespace rlr
