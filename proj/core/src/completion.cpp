#include "rlr/completion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "rlr/error.hpp"
#include "text_util.hpp"

namespace rlr {

ObservationSet::ObservationSet(std::size_t rows, std::size_t cols, std::vector<Observation> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ == 0 || cols_ == 0) throw Error(ErrorCode::EmptyMatrix, "observation shape has a zero dimension");
    if (entries_.empty()) throw Error(ErrorCode::EmptyObservation, "observation set must contain at least one entry");
    std::vector<bool> seen(rows_ * cols_, false);
    for (const auto& e : entries_) {
        if (e.row >= rows_ || e.col >= cols_) {
            throw Error(ErrorCode::OutOfBounds, "(" + std::to_string(e.row) + "," + std::to_string(e.col) +
                                                    ") outside " + std::to_string(rows_) + "x" +
                                                    std::to_string(cols_));
        }
        const std::size_t lin = e.row * cols_ + e.col;
        if (seen[lin]) {
            throw Error(ErrorCode::DuplicateIndex,
                        "(" + std::to_string(e.row) + "," + std::to_string(e.col) + ") listed twice");
        }
        seen[lin] = true;
        if (!std::isfinite(e.value)) throw Error(ErrorCode::NonFinite, "observed value is NaN or Inf");
    }
}

void SvtConfig::validate() const {
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
    if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be at least 1");
    if (!(tolerance > 0.0 && tolerance < 1.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must lie in (0, 1)");
    if (inner_rank_cap && *inner_rank_cap == 0) throw Error(ErrorCode::InvalidArgument, "rank cap must be positive");
}

SvtConfig default_svt_config(const ObservationSet& omega) {
    SvtConfig cfg;
    cfg.tau = 5.0 * std::sqrt(static_cast<double>(omega.rows()) * static_cast<double>(omega.cols()));
    cfg.delta = 1.2 / omega.sampling_fraction();
    cfg.max_iters = 500;
    cfg.tolerance = 1e-4;
    return cfg;
}

ObservationSet project_onto_omega(const DenseMatrix& a, const ObservationSet& omega) {
    if (a.rows() != omega.rows() || a.cols() != omega.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "matrix is " + std::to_string(a.rows()) + "x" +
                                                  std::to_string(a.cols()) + ", observation set is " +
                                                  std::to_string(omega.rows()) + "x" + std::to_string(omega.cols()));
    }
    std::vector<Observation> out = omega.entries();
    for (auto& e : out) e.value = a(e.row, e.col);
    return ObservationSet(a.rows(), a.cols(), std::move(out));
}

namespace {

// Thresholded factors of one shrink step. Column l of u/v is scaled so that
// X = sum_l weight_l u_l v_l^T.
struct Shrunk {
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t rank = 0;
    std::vector<double> weights;
    std::vector<double> u;  // m x rank, row-major
    std::vector<double> v;  // n x rank, row-major
    std::vector<double> warm;

    double at(std::size_t i, std::size_t j) const noexcept {
        double s = 0.0;
        const double* ui = &u[i * rank];
        const double* vj = &v[j * rank];
        for (std::size_t l = 0; l < rank; ++l) s += weights[l] * ui[l] * vj[l];
        return s;
    }

    DenseMatrix dense() const {
        DenseMatrix x(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) x(i, j) = at(i, j);
        return x;
    }
};

Shrunk shrink_factors(const DenseMatrix& a, double tau, std::optional<std::size_t> cap,
                      std::span<const double> warm) {
    const detail::JacobiSvd f = detail::jacobi_svd(a, warm);
    Shrunk s;
    s.m = a.rows();
    s.n = a.cols();
    const std::size_t k = f.sigma.size();
    while (s.rank < k && f.sigma[s.rank] > tau) ++s.rank;
    if (cap) s.rank = std::min(s.rank, *cap);
    s.weights.resize(s.rank);
    s.u.resize(s.m * s.rank);
    s.v.resize(s.n * s.rank);
    for (std::size_t l = 0; l < s.rank; ++l) {
        s.weights[l] = f.sigma[l] - tau;
        for (std::size_t i = 0; i < s.m; ++i) s.u[i * s.rank + l] = f.u[l * s.m + i];
        for (std::size_t j = 0; j < s.n; ++j) s.v[j * s.rank + l] = f.v[l * s.n + j];
    }
    s.warm = s.m >= s.n ? f.v : f.u;
    return s;
}

}  // namespace

DenseMatrix shrink(const DenseMatrix& a, double tau) {
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    return shrink_factors(a, tau, std::nullopt, {}).dense();
}

SvtResult svt_complete(const ObservationSet& omega, const SvtConfig& cfg) {
    cfg.validate();
    const std::size_t m = omega.rows();
    const std::size_t n = omega.cols();
    const auto& obs = omega.entries();

    double observed_norm2 = 0.0;
    for (const auto& e : obs) observed_norm2 += e.value * e.value;
    const double observed_norm = std::sqrt(observed_norm2);

    SvtResult result;
    if (observed_norm == 0.0) {
        // Every observed value is zero; X = 0 is feasible with zero nuclear norm.
        result.x_hat = DenseMatrix(m, n);
        result.converged = true;
        return result;
    }

    constexpr double kDivergenceFactor = 1e6;
    DenseMatrix y(m, n);
    std::vector<double> warm;
    Shrunk x;
    for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
        x = shrink_factors(y, cfg.tau, cfg.inner_rank_cap, warm);
        warm = std::move(x.warm);

        double res2 = 0.0;
        for (const auto& e : obs) {
            const double r = e.value - x.at(e.row, e.col);
            res2 += r * r;
            y(e.row, e.col) += cfg.delta * r;
        }
        const double residual = std::sqrt(res2) / observed_norm;
        result.residual_history.push_back(residual);
        result.iterations_used = k;
        result.final_residual = residual;
        result.rank_of_solution = x.rank;
        if (!std::isfinite(residual) || residual > kDivergenceFactor) {
            throw Error(ErrorCode::Divergence, "relative residual " + std::to_string(residual) + " at iteration " +
                                                   std::to_string(k) + "; reduce delta");
        }
        if (residual <= cfg.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.x_hat = x.dense();
    return result;
}

ObservationSet read_observations(const std::filesystem::path& path) {
    const std::string text = detail::slurp(path);
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool have_header = false;
    std::vector<Observation> entries;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = detail::trim(line);
        if (t.empty()) continue;
        if (!have_header) {
            if (t.front() != '#') throw Error(ErrorCode::Format, path.string() + ": missing '# m n' header");
            std::istringstream hs{std::string(t.substr(1))};
            long long m = 0, nn = 0;
            if (!(hs >> m >> nn) || m <= 0 || nn <= 0) {
                throw Error(ErrorCode::Format, path.string() + ": malformed '# m n' header");
            }
            rows = static_cast<std::size_t>(m);
            cols = static_cast<std::size_t>(nn);
            have_header = true;
            continue;
        }
        const auto f = detail::split(t, ',');
        if (f.size() != 3) throw Error(ErrorCode::Format, path.string() + ":" + std::to_string(lineno) + ": expected i,j,value");
        const auto i = detail::parse_integer(f[0], path, lineno);
        const auto j = detail::parse_integer(f[1], path, lineno);
        if (i < 0 || j < 0) throw Error(ErrorCode::OutOfBounds, path.string() + ":" + std::to_string(lineno) + ": negative index");
        entries.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), detail::parse_double(f[2], path, lineno)});
    }
    if (!have_header) throw Error(ErrorCode::Format, path.string() + ": empty observation file");
    return ObservationSet(rows, cols, std::move(entries));
}

void write_observations(const std::filesystem::path& path, const ObservationSet& omega) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    os << "# " << omega.rows() << ' ' << omega.cols() << '\n';
    std::string line;
    for (const auto& e : omega.entries()) {
        line = std::to_string(e.row) + ',' + std::to_string(e.col) + ',';
        detail::append_double(line, e.value);
        line += '\n';
        os << line;
    }
    if (!os) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace rlr
