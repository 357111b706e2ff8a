#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace rlr {

/// Row-major dense real matrix. Entries are kept finite by every public
/// operation that produces one.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Throws InvalidArgument when data.size() != rows * cols.
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<const double> row(std::size_t i) const noexcept {
        return std::span<const double>(data_).subspan(i * cols_, cols_);
    }

    DenseMatrix transposed() const;
    bool all_finite() const noexcept;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);
/// Matrix product; throws ShapeMismatch on inner-dimension disagreement.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// Thin SVD A = U diag(sigma) V^T. U is m x r, V is n x r, both stored
/// row-major, with r the numerical rank.
struct SvdFactors {
    DenseMatrix u;
    std::vector<double> singular_values;
    DenseMatrix v;

    std::size_t rank() const noexcept { return singular_values.size(); }
    DenseMatrix reconstruct() const;
};

/// Singular values below this fraction of sigma_1 are treated as zero.
inline constexpr double kRankCutoff = 1e-12;

/// One-sided Jacobi SVD. Throws EmptyMatrix / NonFinite.
SvdFactors svd(const DenseMatrix& a);

/// Descending singular values including the near-zero tail.
std::vector<double> singular_value_profile(const DenseMatrix& a);

/// U diag(sigma_1..sigma_r', 0..0) V^T. Throws ZeroRank when r_prime == 0.
DenseMatrix low_rank_approx(const SvdFactors& factors, std::size_t r_prime);

double frobenius_norm(const DenseMatrix& a);
double nuclear_norm(const DenseMatrix& a);

/// Throws EmptyMatrix / NonFinite if `a` is unusable as SVD input.
void require_valid(const DenseMatrix& a);

namespace detail {

/// Full one-sided Jacobi result on a column-major working copy: all
/// min(m, n) singular values (descending, tail included) together with the
/// complete orthogonal right factor. Used by the completion solver to warm
/// start successive decompositions.
struct JacobiSvd {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<double> sigma;    // min(m, n), descending
    std::vector<double> u;        // m x k column-major, k = min(m, n)
    std::vector<double> v;        // n x k column-major
    std::size_t sweeps = 0;
};

/// `warm_v`, when non-empty, is an n x n column-major orthogonal matrix
/// applied on the right before the sweeps (only used when m >= n).
JacobiSvd jacobi_svd(const DenseMatrix& a, std::span<const double> warm_v = {});

/// Worker count for internal parallel loops; honours RADAR_LOWRANK_THREADS.
int thread_count() noexcept;

}  // namespace detail

enum class MatrixFormat { Csv, Binary };

/// Auto-detects the format by the "RLRM" magic.
DenseMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const DenseMatrix& a, MatrixFormat format);

}  // namespace rlr
