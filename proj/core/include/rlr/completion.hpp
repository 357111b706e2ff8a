#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "rlr/matrix.hpp"

namespace rlr {

struct Observation {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// The sampled index set together with the observed values. Construction
/// rejects empty sets, out-of-bounds or duplicate positions, and non-finite
/// values.
class ObservationSet {
public:
    ObservationSet(std::size_t rows, std::size_t cols, std::vector<Observation> entries);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<Observation>& entries() const noexcept { return entries_; }
    /// |Omega| / (m n)
    double sampling_fraction() const noexcept {
        return static_cast<double>(entries_.size()) / static_cast<double>(rows_ * cols_);
    }

    friend bool operator==(const ObservationSet&, const ObservationSet&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Observation> entries_;
};

struct SvtConfig {
    double tau = 0.0;
    double delta = 0.0;
    std::size_t max_iters = 500;
    double tolerance = 1e-4;
    /// Keeps at most this many singular values per shrink when set.
    std::optional<std::size_t> inner_rank_cap;

    /// Throws InvalidArgument unless tau, delta > 0, max_iters >= 1 and
    /// tolerance in (0, 1).
    void validate() const;
};

struct SvtResult {
    DenseMatrix x_hat;
    std::size_t iterations_used = 0;
    double final_residual = 0.0;
    bool converged = false;
    std::size_t rank_of_solution = 0;
    /// Relative residual on Omega after each iteration.
    std::vector<double> residual_history;
};

/// tau = 5 sqrt(mn), delta = 1.2 / p, 500 iterations, tolerance 1e-4.
SvtConfig default_svt_config(const ObservationSet& omega);

/// Values of `a` at the positions of `omega`. Throws ShapeMismatch.
ObservationSet project_onto_omega(const DenseMatrix& a, const ObservationSet& omega);

/// Singular value soft-thresholding U diag(max(sigma - tau, 0)) V^T.
DenseMatrix shrink(const DenseMatrix& a, double tau);

/// Singular value thresholding iteration for
///   minimize ||X||_*  subject to  X_ij = M_ij on Omega,
/// started from Y = 0. Throws Divergence when the relative residual blows
/// past 1e6 times its starting value of one.
SvtResult svt_complete(const ObservationSet& omega, const SvtConfig& cfg);

/// "# m n" header followed by "i,j,value" lines, 0-based indices.
ObservationSet read_observations(const std::filesystem::path& path);
void write_observations(const std::filesystem::path& path, const ObservationSet& omega);

}  // namespace rlr
