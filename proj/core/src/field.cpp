#include "rlr/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "rlr/error.hpp"

namespace rlr {

void FieldSpec::validate() const {
    if (n_range < 2 || n_azimuth < 2) throw Error(ErrorCode::InvalidArgument, "field dimensions must be at least 2");
    if (!(correlation_length_range >= 0.0) || !(correlation_length_azimuth >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "correlation lengths must be non-negative");
    }
    if (!(coverage_fraction >= 0.0 && coverage_fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "coverage fraction must lie in [0, 1]");
    }
    if (!(std_dbz >= 0.0) || !std::isfinite(mean_dbz) || !std::isfinite(floor_dbz)) {
        throw Error(ErrorCode::InvalidArgument, "field statistics must be finite with std >= 0");
    }
}

namespace {

// Smallest margin kept between a wet cell and the dry floor.
constexpr double kWetMargin = 0.1;

std::vector<double> gaussian_kernel(double sigma) {
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(5.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        const double x = static_cast<double>(i) / sigma;
        k[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * x * x);
    }
    const double total = std::accumulate(k.begin(), k.end(), 0.0);
    for (double& w : k) w /= total;
    return k;
}

std::size_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
    while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
    return static_cast<std::size_t>(i);
}

// Convolves `count` lines of length `len`; element t of line l sits at
// data[l * line_stride + t * elem_stride].
void smooth_lines(std::vector<double>& data, std::size_t count, std::size_t len, std::size_t line_stride,
                  std::size_t elem_stride, double sigma) {
    if (sigma <= 0.0) return;
    const auto kernel = gaussian_kernel(sigma);
    const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
    std::vector<double> line(len);
    for (std::size_t l = 0; l < count; ++l) {
        for (std::size_t t = 0; t < len; ++t) line[t] = data[l * line_stride + t * elem_stride];
        for (std::size_t t = 0; t < len; ++t) {
            double acc = 0.0;
            for (std::ptrdiff_t o = -radius; o <= radius; ++o) {
                acc += kernel[static_cast<std::size_t>(o + radius)] *
                       line[reflect(static_cast<std::ptrdiff_t>(t) + o, static_cast<std::ptrdiff_t>(len))];
            }
            data[l * line_stride + t * elem_stride] = acc;
        }
    }
}

}  // namespace

DenseMatrix synthesize_field(const FieldSpec& spec) {
    spec.validate();
    const std::size_t m = spec.n_range;
    const std::size_t n = spec.n_azimuth;
    std::vector<double> z(m * n);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& x : z) x = normal(rng);

    smooth_lines(z, n, m, 1, n, spec.correlation_length_range);
    smooth_lines(z, m, n, n, 1, spec.correlation_length_azimuth);

    const auto wet_count = static_cast<std::size_t>(std::llround(spec.coverage_fraction * static_cast<double>(m * n)));
    std::vector<std::size_t> order(m * n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });

    DenseMatrix field(m, n, spec.floor_dbz);
    if (wet_count == 0) return field;
    double mean = 0.0;
    for (std::size_t k = 0; k < wet_count; ++k) mean += z[order[k]];
    mean /= static_cast<double>(wet_count);
    double var = 0.0;
    for (std::size_t k = 0; k < wet_count; ++k) var += (z[order[k]] - mean) * (z[order[k]] - mean);
    const double sd = wet_count > 1 ? std::sqrt(var / static_cast<double>(wet_count)) : 0.0;
    const double gain = sd > 0.0 ? spec.std_dbz / sd : 0.0;

    // Wet cells only need to stay distinguishable from dry ones when some
    // cells are dry.
    const double lowest = wet_count < m * n ? spec.floor_dbz + kWetMargin : -std::numeric_limits<double>::infinity();
    auto out = field.data();
    for (std::size_t k = 0; k < wet_count; ++k) {
        const std::size_t idx = order[k];
        out[idx] = std::max(spec.mean_dbz + gain * (z[idx] - mean), lowest);
    }
    return field;
}

double coverage_fraction_of(const DenseMatrix& field, double wet_threshold_dbz) noexcept {
    if (field.empty()) return 0.0;
    const auto d = field.data();
    const auto wet = std::count_if(d.begin(), d.end(), [&](double x) { return x > wet_threshold_dbz; });
    return static_cast<double>(wet) / static_cast<double>(d.size());
}

}  // namespace rlr
