#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "../oracles.hpp"
#include "rlr/error.hpp"
#include "rlr/field.hpp"
#include "rlr/matrix.hpp"

using namespace rlr;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected rlr::Error");
    return ErrorCode::Io;
}

double tail_energy(const std::vector<double>& sigma, std::size_t keep) {
    double s = 0.0;
    for (std::size_t k = keep; k < sigma.size(); ++k) s += sigma[k] * sigma[k];
    return s;
}

}  // namespace

TEST_CASE("svd of the identity has unit singular values") {
    const auto f = svd(DenseMatrix::identity(3));
    CHECK(f.rank() == 3);
    for (double s : f.singular_values) CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("svd drops exact zeros from a diagonal matrix") {
    const std::vector<double> d{3.0, 2.0, 0.0};
    const auto f = svd(DenseMatrix::diagonal(d));
    REQUIRE(f.rank() == 2);
    CHECK(f.singular_values[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(f.singular_values[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("svd reconstructs a random 100x60 matrix and matches the eigen oracle") {
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{100, 60}, {60, 100}}) {
        CAPTURE(m);
        const DenseMatrix a = oracle::random_matrix(m, n, 42);
        const auto f = svd(a);
        REQUIRE(f.rank() == 60);
        CHECK(oracle::brute_frobenius(a - f.reconstruct()) <= 1e-10 * oracle::brute_frobenius(a));
        CHECK(oracle::max_orthonormality_error(f.u) <= 1e-10);
        CHECK(oracle::max_orthonormality_error(f.v) <= 1e-10);

        const auto eig = oracle::symmetric_eigenvalues(oracle::gram(m >= n ? a : a.transposed()));
        const double top = f.singular_values[0] * f.singular_values[0];
        for (std::size_t k = 0; k < f.rank(); ++k) {
            CHECK(std::abs(f.singular_values[k] * f.singular_values[k] - eig[k]) <= 1e-10 * top);
        }
    }
}

TEST_CASE("svd rejects empty and non-finite input") {
    CHECK(code_of([] { (void)svd(DenseMatrix(0, 3)); }) == ErrorCode::EmptyMatrix);
    DenseMatrix bad(2, 2, 1.0);
    bad(1, 0) = std::nan("");
    CHECK(code_of([&] { (void)svd(bad); }) == ErrorCode::NonFinite);
    bad(1, 0) = INFINITY;
    CHECK(code_of([&] { (void)frobenius_norm(bad); }) == ErrorCode::NonFinite);
}

TEST_CASE("svd of the zero matrix has rank zero") {
    const auto f = svd(DenseMatrix(4, 3));
    CHECK(f.rank() == 0);
    CHECK(nuclear_norm(DenseMatrix(4, 3)) == 0.0);
}

TEST_CASE("svd properties over seeded random shapes") {
    std::mt19937_64 shapes(2024);
    std::uniform_int_distribution<std::size_t> dim(1, 70);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t m = dim(shapes);
        const std::size_t n = dim(shapes);
        CAPTURE(m);
        CAPTURE(n);
        const DenseMatrix a = oracle::random_matrix(m, n, 1000 + trial);
        const auto f = svd(a);
        const double fro = oracle::brute_frobenius(a);
        CHECK(f.rank() <= std::min(m, n));
        CHECK(oracle::max_orthonormality_error(f.u) <= 1e-10);
        CHECK(oracle::max_orthonormality_error(f.v) <= 1e-10);
        CHECK(oracle::brute_frobenius(a - f.reconstruct()) <= 1e-10 * fro);
        for (std::size_t k = 0; k + 1 < f.rank(); ++k) CHECK(f.singular_values[k] >= f.singular_values[k + 1]);
        for (double s : f.singular_values) CHECK(s > 0.0);

        const double nuc = std::accumulate(f.singular_values.begin(), f.singular_values.end(), 0.0);
        CHECK(fro <= nuc * (1 + 1e-12));
        CHECK(nuc <= std::sqrt(static_cast<double>(f.rank())) * fro * (1 + 1e-12));

        const double c = 0.5 + trial;
        const auto scaled = svd(c * a);
        REQUIRE(scaled.rank() == f.rank());
        for (std::size_t k = 0; k < f.rank(); ++k) {
            CHECK(std::abs(scaled.singular_values[k] - c * f.singular_values[k]) <= 1e-12 * c * f.singular_values[0]);
        }
    }
}

TEST_CASE("svd is bitwise reproducible across thread counts") {
    const DenseMatrix a = oracle::random_matrix(90, 70, 5);
    ::setenv("RADAR_LOWRANK_THREADS", "1", 1);
    const auto one = svd(a);
    ::setenv("RADAR_LOWRANK_THREADS", "4", 1);
    const auto four = svd(a);
    ::unsetenv("RADAR_LOWRANK_THREADS");
    CHECK(one.singular_values == four.singular_values);
    CHECK(one.u == four.u);
    CHECK(one.v == four.v);
}

TEST_CASE("low_rank_approx on diag(3,2,1)") {
    const std::vector<double> d{3.0, 2.0, 1.0};
    const DenseMatrix a = DenseMatrix::diagonal(d);
    const auto f = svd(a);
    CHECK(oracle::brute_frobenius(a - low_rank_approx(f, 3)) <= 1e-14);
    CHECK(oracle::brute_frobenius(a - low_rank_approx(f, 10)) <= 1e-14);
    CHECK(oracle::brute_frobenius(a - low_rank_approx(f, 1)) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
    CHECK(code_of([&] { (void)low_rank_approx(f, 0); }) == ErrorCode::ZeroRank);
}

TEST_CASE("Eckart-Young equality for every truncation rank") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const DenseMatrix a = oracle::random_matrix(40, 25, 77 + seed);
        const auto f = svd(a);
        for (std::size_t r = 1; r <= f.rank(); ++r) {
            CAPTURE(r);
            const double err2 = std::pow(oracle::brute_frobenius(a - low_rank_approx(f, r)), 2);
            const double tail = tail_energy(f.singular_values, r);
            CHECK(std::abs(err2 - tail) <= 1e-9 * std::max(tail, 1e-300) + 1e-20 * std::pow(f.singular_values[0], 2));
        }
    }
}

TEST_CASE("Eckart-Young at radar-scan scale with 25% of the singular values") {
    FieldSpec spec;
    spec.n_range = 1930;
    spec.n_azimuth = 413;
    spec.seed = 3;
    const DenseMatrix z = synthesize_field(spec);
    const auto f = svd(z);
    const auto keep = static_cast<std::size_t>(std::lround(0.25 * static_cast<double>(f.rank())));
    const DenseMatrix approx = low_rank_approx(f, keep);
    const double err = frobenius_norm(z - approx);
    const double tail = std::sqrt(tail_energy(f.singular_values, keep));
    CHECK(std::abs(err - tail) <= 1e-9 * tail + 1e-12 * frobenius_norm(z));
}

TEST_CASE("frobenius norm") {
    CHECK(frobenius_norm(DenseMatrix(4, 4)) == 0.0);
    CHECK(frobenius_norm(DenseMatrix(1, 2, {3.0, 4.0})) == 5.0);
    const DenseMatrix a = oracle::random_matrix(10, 10, 9);
    CHECK(frobenius_norm(a) == doctest::Approx(oracle::brute_frobenius(a)).epsilon(1e-14));
}

TEST_CASE("nuclear norm") {
    const std::vector<double> d{3.0, 2.0, 1.0};
    CHECK(nuclear_norm(DenseMatrix::diagonal(d)) == doctest::Approx(6.0).epsilon(1e-14));

    const DenseMatrix u = oracle::random_orthonormal(7, 1, 3);
    const DenseMatrix v = oracle::random_orthonormal(5, 1, 4);
    CHECK(nuclear_norm(matmul(u, v.transposed())) == doctest::Approx(1.0).epsilon(1e-13));

    const DenseMatrix a = oracle::random_matrix(20, 20, 11);
    double trace_sqrt = 0.0;
    for (double ev : oracle::symmetric_eigenvalues(oracle::gram(a))) trace_sqrt += std::sqrt(std::max(ev, 0.0));
    CHECK(nuclear_norm(a) == doctest::Approx(trace_sqrt).epsilon(1e-9));
}

TEST_CASE("singular value profile") {
    const auto id = singular_value_profile(DenseMatrix::identity(2));
    REQUIRE(id.size() == 2);
    CHECK(id[0] == doctest::Approx(1.0));
    CHECK(id[1] == doctest::Approx(1.0));

    const DenseMatrix r2 = oracle::low_rank_product(50, 50, 2, 8);
    const auto prof = singular_value_profile(r2);
    CHECK(prof.size() == 50);
    const auto above = std::count_if(prof.begin(), prof.end(), [&](double s) { return s > 1e-10 * prof[0]; });
    CHECK(above == 2);

    FieldSpec spec;  // 200 x 100, correlation lengths (20, 10)
    spec.seed = 1;
    const auto field_prof = singular_value_profile(synthesize_field(spec));
    CHECK(field_prof[19] / field_prof[0] < 0.05);
}

TEST_CASE("matrix files round-trip in both formats") {
    const auto dir = std::filesystem::temp_directory_path() / "rlr_test_matrix_io";
    std::filesystem::create_directories(dir);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        DenseMatrix a = oracle::random_matrix(3 + seed, 7 - seed, seed);
        a(0, 0) = 1e-300;
        for (auto fmt : {MatrixFormat::Csv, MatrixFormat::Binary}) {
            const auto path = dir / (fmt == MatrixFormat::Csv ? "a.csv" : "a.bin");
            write_matrix(path, a, fmt);
            CHECK(read_matrix(path) == a);
        }
    }
}

TEST_CASE("matrix reader rejects malformed files") {
    const auto dir = std::filesystem::temp_directory_path() / "rlr_test_matrix_io";
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const std::string& text) {
        std::ofstream(dir / name, std::ios::binary) << text;
        return dir / name;
    };
    CHECK(code_of([&] { (void)read_matrix(write("ragged.csv", "1,2\n3\n")); }) == ErrorCode::Format);
    CHECK(code_of([&] { (void)read_matrix(write("text.csv", "1,abc\n")); }) == ErrorCode::Format);
    CHECK(code_of([&] { (void)read_matrix(write("nan.csv", "1,nan\n")); }) == ErrorCode::NonFinite);
    CHECK(code_of([&] { (void)read_matrix(write("empty.csv", "\n")); }) == ErrorCode::EmptyMatrix);
    CHECK(code_of([&] { (void)read_matrix(write("short.bin", std::string("RLRM\x02\0\0\0\x02\0\0\0", 12))); }) ==
          ErrorCode::Format);
    CHECK(code_of([&] { (void)read_matrix(dir / "missing.csv"); }) == ErrorCode::Io);
}
