#include "rlr/masks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "rlr/error.hpp"

namespace rlr {

void MaskSpec::validate() const {
    if (rows == 0 || cols == 0) throw Error(ErrorCode::EmptyMatrix, "mask shape has a zero dimension");
    if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorCode::InvalidArgument, "sampling fraction must lie in (0, 1]");
    if (target_count() < 1) throw Error(ErrorCode::InvalidArgument, "sampling fraction selects no entries");
    if (scheme == SamplingScheme::AzimuthMiss && dwell_ratio && !(*dwell_ratio > 0.0 && *dwell_ratio <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "dwell ratio must lie in (0, 1]");
    }
}

std::size_t MaskSpec::target_count() const noexcept {
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows) * static_cast<double>(cols)));
}

namespace {

// First `k` elements of a seeded partial Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace

std::vector<Index2> make_mask(const MaskSpec& spec) {
    spec.validate();
    const std::size_t m = spec.rows;
    const std::size_t n = spec.cols;
    const std::size_t target = spec.target_count();
    std::mt19937_64 rng(spec.seed);
    std::vector<Index2> omega;
    omega.reserve(target);

    if (spec.scheme == SamplingScheme::UniformEntries) {
        for (std::size_t lin : sample_without_replacement(m * n, target, rng)) omega.push_back({lin / n, lin % n});
    } else {
        const double dwell = spec.dwell_ratio.value_or(spec.fraction / 2.0);
        const auto full = static_cast<std::size_t>(std::llround(dwell * static_cast<double>(n)));
        if (full * m > target) {
            throw Error(ErrorCode::InfeasibleFraction, std::to_string(full) + " full columns already exceed " +
                                                           std::to_string(target) + " samples");
        }
        auto columns = sample_without_replacement(n, full, rng);
        std::vector<bool> is_full(n, false);
        for (std::size_t c : columns) {
            is_full[c] = true;
            for (std::size_t i = 0; i < m; ++i) omega.push_back({i, c});
        }
        std::vector<std::size_t> rest;
        rest.reserve(m * (n - full));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!is_full[j]) rest.push_back(i * n + j);
        for (std::size_t k : sample_without_replacement(rest.size(), target - full * m, rng)) {
            omega.push_back({rest[k] / n, rest[k] % n});
        }
    }
    std::sort(omega.begin(), omega.end());
    return omega;
}

ObservationSet apply_mask(const DenseMatrix& field, const std::vector<Index2>& omega) {
    std::vector<Observation> entries;
    entries.reserve(omega.size());
    for (const auto& ij : omega) {
        if (ij.row >= field.rows() || ij.col >= field.cols()) {
            throw Error(ErrorCode::OutOfBounds,
                        "(" + std::to_string(ij.row) + "," + std::to_string(ij.col) + ") outside the field");
        }
        entries.push_back({ij.row, ij.col, field(ij.row, ij.col)});
    }
    return ObservationSet(field.rows(), field.cols(), std::move(entries));
}

}  // namespace rlr
