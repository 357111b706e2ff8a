#include "rlr/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "rlr/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rlr {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw Error(ErrorCode::InvalidArgument,
                    "matrix data has " + std::to_string(data_.size()) + " values, expected " +
                        std::to_string(rows_ * cols_));
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> values) {
    DenseMatrix out(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
    return out;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

bool DenseMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

namespace {

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::ShapeMismatch,
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                        std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}

// Four partial sums keep the loop vectorizable without reassociation flags
// and make the result independent of how pairs are scheduled.
inline double dot(const double* x, const double* y, std::size_t n) noexcept {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += x[i] * y[i];
        s1 += x[i + 1] * y[i + 1];
        s2 += x[i + 2] * y[i + 2];
        s3 += x[i + 3] * y[i + 3];
    }
    for (; i < n; ++i) s0 += x[i] * y[i];
    return (s0 + s1) + (s2 + s3);
}

inline void rotate(double* x, double* y, std::size_t n, double c, double s) noexcept {
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

constexpr double kOrthogonalityTol = 1e-14;
constexpr std::size_t kMaxSweeps = 80;

// Hestenes one-sided Jacobi on the p x n column-major block `g`, accumulating
// the right rotations into the n x n column-major `v`. Pairs are visited in
// round-robin tournament order so that every round consists of disjoint
// pairs; the result does not depend on the number of worker threads.
std::size_t jacobi_sweeps(std::vector<double>& g, std::size_t p, std::size_t n,
                          std::vector<double>& v) {
    if (n < 2) return 0;
    const std::size_t players = n + (n % 2);
    std::vector<std::size_t> order(players);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> norm2(n);

    double frob2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) frob2 += dot(&g[j * p], &g[j * p], p);
    const double negligible = 1e-300 + 1e-30 * frob2;

    const int threads = detail::thread_count();
    std::size_t sweep = 0;
    while (sweep < kMaxSweeps) {
        ++sweep;
        for (std::size_t j = 0; j < n; ++j) norm2[j] = dot(&g[j * p], &g[j * p], p);
        long rotations = 0;
        for (std::size_t round = 0; round + 1 < players; ++round) {
            const long half = static_cast<long>(players / 2);
#pragma omp parallel for reduction(+ : rotations) num_threads(threads) schedule(static)
            for (long k = 0; k < half; ++k) {
                std::size_t i = order[static_cast<std::size_t>(k)];
                std::size_t j = order[players - 1 - static_cast<std::size_t>(k)];
                if (i >= n || j >= n) continue;
                if (i > j) std::swap(i, j);
                const double alpha = norm2[i];
                const double beta = norm2[j];
                const double scale = std::sqrt(alpha * beta);
                if (scale <= negligible) continue;
                double* gi = &g[i * p];
                double* gj = &g[j * p];
                const double gamma = dot(gi, gj, p);
                if (std::abs(gamma) <= kOrthogonalityTol * scale) continue;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                rotate(gi, gj, p, c, s);
                rotate(&v[i * n], &v[j * n], n, c, s);
                norm2[i] = alpha - t * gamma;
                norm2[j] = beta + t * gamma;
                ++rotations;
            }
            std::rotate(order.begin() + 1, order.end() - 1, order.end());
        }
        if (rotations == 0) break;
    }
    return sweep;
}

// In-place Householder QR of the m x n column-major `w` (m >= n). Returns the
// reflectors; `w` is replaced by R in its leading n x n block.
struct Householder {
    std::vector<double> vectors;  // m x n column-major, column k nonzero from row k
    std::vector<double> betas;
};

Householder householder_qr(std::vector<double>& w, std::size_t m, std::size_t n) {
    Householder h{std::vector<double>(m * n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t k = 0; k < n; ++k) {
        double* col = &w[k * m];
        double* hv = &h.vectors[k * m];
        const std::size_t len = m - k;
        const double norm = std::sqrt(dot(col + k, col + k, len));
        if (norm == 0.0) continue;
        const double alpha = col[k] > 0.0 ? -norm : norm;
        std::copy(col + k, col + m, hv + k);
        hv[k] -= alpha;
        const double vv = dot(hv + k, hv + k, len);
        if (vv == 0.0) continue;
        const double beta = 2.0 / vv;
        h.betas[k] = beta;
        col[k] = alpha;
        std::fill(col + k + 1, col + m, 0.0);
        for (std::size_t j = k + 1; j < n; ++j) {
            double* cj = &w[j * m];
            const double f = beta * dot(hv + k, cj + k, len);
            for (std::size_t i = k; i < m; ++i) cj[i] -= f * hv[i];
        }
    }
    return h;
}

// Overwrites the m x cols column-major `z` with Q z.
void apply_q(const Householder& h, std::size_t m, std::size_t n, std::vector<double>& z, std::size_t cols) {
    for (std::size_t kk = n; kk-- > 0;) {
        const double beta = h.betas[kk];
        if (beta == 0.0) continue;
        const double* hv = &h.vectors[kk * m];
        const std::size_t len = m - kk;
        for (std::size_t j = 0; j < cols; ++j) {
            double* zj = &z[j * m];
            const double f = beta * dot(hv + kk, zj + kk, len);
            for (std::size_t i = kk; i < m; ++i) zj[i] -= f * hv[i];
        }
    }
}

// SVD of a tall (m >= n) column-major matrix.
detail::JacobiSvd tall_svd(std::vector<double> w, std::size_t m, std::size_t n, std::vector<double> v) {
    detail::JacobiSvd out;
    out.m = m;
    out.n = n;
    const bool precondition = 4 * m >= 5 * n;
    Householder h;
    std::size_t p = m;
    if (precondition) {
        h = householder_qr(w, m, n);
        std::vector<double> r(n * n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i <= j; ++i) r[j * n + i] = w[j * m + i];
        w = std::move(r);
        p = n;
    }
    out.sweeps = jacobi_sweeps(w, p, n, v);

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(dot(&w[j * p], &w[j * p], p));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

    out.sigma.resize(n);
    std::vector<double> u(m * n, 0.0);
    out.v.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = idx[k];
        const double s = norms[j];
        out.sigma[k] = s;
        std::copy_n(&v[j * n], n, &out.v[k * n]);
        if (s > 0.0) {
            for (std::size_t i = 0; i < p; ++i) u[k * m + i] = w[j * p + i] / s;
        }
    }
    if (precondition) apply_q(h, m, n, u, n);
    out.u = std::move(u);
    return out;
}

}  // namespace

namespace detail {

int thread_count() noexcept {
    if (const char* env = std::getenv("RADAR_LOWRANK_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

JacobiSvd jacobi_svd(const DenseMatrix& a, std::span<const double> warm_v) {
    require_valid(a);
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const bool tall = m >= n;
    // Work on the tall orientation: columns of `w` are columns of A (or of A^T).
    const std::size_t tm = tall ? m : n;
    const std::size_t tn = tall ? n : m;
    std::vector<double> w(tm * tn);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (tall)
                w[j * tm + i] = a(i, j);
            else
                w[i * tm + j] = a(i, j);
        }

    std::vector<double> v(tn * tn, 0.0);
    if (!warm_v.empty()) {
        if (warm_v.size() != tn * tn) {
            throw Error(ErrorCode::ShapeMismatch, "warm-start factor has the wrong size");
        }
        std::copy(warm_v.begin(), warm_v.end(), v.begin());
        std::vector<double> rotated(tm * tn, 0.0);
        for (std::size_t k = 0; k < tn; ++k) {
            double* out = &rotated[k * tm];
            for (std::size_t j = 0; j < tn; ++j) {
                const double f = v[k * tn + j];
                if (f == 0.0) continue;
                const double* col = &w[j * tm];
                for (std::size_t i = 0; i < tm; ++i) out[i] += f * col[i];
            }
        }
        w = std::move(rotated);
    } else {
        for (std::size_t j = 0; j < tn; ++j) v[j * tn + j] = 1.0;
    }

    JacobiSvd res = tall_svd(std::move(w), tm, tn, std::move(v));
    if (!tall) {
        std::swap(res.u, res.v);
        res.m = m;
        res.n = n;
    }
    return res;
}

}  // namespace detail

void require_valid(const DenseMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) throw Error(ErrorCode::EmptyMatrix, "matrix has no entries");
    if (!a.all_finite()) throw Error(ErrorCode::NonFinite, "matrix contains NaN or Inf");
}

DenseMatrix SvdFactors::reconstruct() const {
    const std::size_t m = u.rows();
    const std::size_t n = v.rows();
    const std::size_t r = rank();
    DenseMatrix scaled(m, r);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < r; ++k) scaled(i, k) = u(i, k) * singular_values[k];
    DenseMatrix out(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        const double* ui = scaled.data().data() + i * r;
        for (std::size_t j = 0; j < n; ++j) out(i, j) = dot(ui, v.data().data() + j * r, r);
    }
    return out;
}

SvdFactors svd(const DenseMatrix& a) {
    const detail::JacobiSvd full = detail::jacobi_svd(a);
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const std::size_t k = std::min(m, n);
    std::size_t r = 0;
    if (!full.sigma.empty() && full.sigma[0] > 0.0) {
        const double cutoff = kRankCutoff * full.sigma[0];
        while (r < k && full.sigma[r] >= cutoff && full.sigma[r] > 0.0) ++r;
    }
    SvdFactors f{DenseMatrix(m, r), std::vector<double>(full.sigma.begin(), full.sigma.begin() + r),
                 DenseMatrix(n, r)};
    for (std::size_t l = 0; l < r; ++l) {
        for (std::size_t i = 0; i < m; ++i) f.u(i, l) = full.u[l * m + i];
        for (std::size_t j = 0; j < n; ++j) f.v(j, l) = full.v[l * n + j];
    }
    return f;
}

std::vector<double> singular_value_profile(const DenseMatrix& a) {
    return detail::jacobi_svd(a).sigma;
}

DenseMatrix low_rank_approx(const SvdFactors& factors, std::size_t r_prime) {
    if (r_prime == 0) throw Error(ErrorCode::ZeroRank, "low-rank approximation needs r' >= 1");
    SvdFactors kept = factors;
    const std::size_t r = std::min(r_prime, factors.rank());
    kept.singular_values.resize(r);
    auto truncate = [r](const DenseMatrix& x) {
        DenseMatrix t(x.rows(), r);
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t k = 0; k < r; ++k) t(i, k) = x(i, k);
        return t;
    };
    kept.u = truncate(factors.u);
    kept.v = truncate(factors.v);
    return kept.reconstruct();
}

double frobenius_norm(const DenseMatrix& a) {
    if (!a.all_finite()) throw Error(ErrorCode::NonFinite, "matrix contains NaN or Inf");
    const auto d = a.data();
    return std::sqrt(dot(d.data(), d.data(), d.size()));
}

double nuclear_norm(const DenseMatrix& a) {
    const auto s = svd(a).singular_values;
    return std::accumulate(s.begin(), s.end(), 0.0);
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b);
    DenseMatrix out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += bd[i];
    return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b);
    DenseMatrix out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bd[i];
    return out;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix out = a;
    for (double& x : out.data()) x *= s;
    return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "inner dimensions " + std::to_string(a.cols()) + " and " +
                                                   std::to_string(b.rows()) + " differ");
    }
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double f = a(i, k);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += f * b(k, j);
        }
    return out;
}

}  // namespace rlr
