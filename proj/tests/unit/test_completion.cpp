#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "../oracles.hpp"
#include "rlr/completion.hpp"
#include "rlr/error.hpp"
#include "rlr/eval.hpp"
#include "rlr/masks.hpp"

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

ObservationSet all_entries(const DenseMatrix& a) {
    std::vector<Observation> e;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) e.push_back({i, j, a(i, j)});
    return ObservationSet(a.rows(), a.cols(), std::move(e));
}

ObservationSet sample(const DenseMatrix& m, double p, std::uint64_t seed) {
    MaskSpec spec;
    spec.rows = m.rows();
    spec.cols = m.cols();
    spec.fraction = p;
    spec.seed = seed;
    return apply_mask(m, make_mask(spec));
}

double objective(const DenseMatrix& x, const DenseMatrix& a, double tau) {
    const double d = frobenius_norm(x - a);
    return tau * nuclear_norm(x) + 0.5 * d * d;
}

}  // namespace

TEST_CASE("observation sets enforce their invariants") {
    CHECK(code_of([] { ObservationSet(3, 3, {}); }) == ErrorCode::EmptyObservation);
    CHECK(code_of([] { ObservationSet(3, 3, {{3, 0, 1.0}}); }) == ErrorCode::OutOfBounds);
    CHECK(code_of([] { ObservationSet(3, 3, {{1, 1, 1.0}, {1, 1, 2.0}}); }) == ErrorCode::DuplicateIndex);
    CHECK(code_of([] { ObservationSet(3, 3, {{1, 1, NAN}}); }) == ErrorCode::NonFinite);
    const ObservationSet one(4, 5, {{0, 0, 1.0}});
    CHECK(one.sampling_fraction() == doctest::Approx(1.0 / 20.0));
}

TEST_CASE("project_onto_omega") {
    const DenseMatrix a = oracle::random_matrix(3, 3, 1);
    const auto full = project_onto_omega(a, all_entries(DenseMatrix(3, 3)));
    REQUIRE(full.size() == 9);
    for (const auto& e : full.entries()) CHECK(e.value == a(e.row, e.col));

    const ObservationSet diag(3, 3, {{0, 0, 0.0}, {1, 1, 0.0}, {2, 2, 0.0}});
    const auto d = project_onto_omega(a, diag);
    REQUIRE(d.size() == 3);
    for (const auto& e : d.entries()) {
        CHECK(e.row == e.col);
        CHECK(e.value == a(e.row, e.row));
    }
    CHECK(code_of([&] { (void)project_onto_omega(DenseMatrix(4, 3), diag); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("shrink soft-thresholds singular values") {
    const std::vector<double> d{3.0, 2.0, 1.0};
    const DenseMatrix s = shrink(DenseMatrix::diagonal(d), 1.5);
    const std::vector<double> expected{1.5, 0.5, 0.0};
    CHECK(oracle::brute_frobenius(s - DenseMatrix::diagonal(expected)) <= 1e-12);

    CHECK(oracle::brute_frobenius(shrink(DenseMatrix::diagonal(d), 3.0)) == 0.0);
    CHECK(oracle::brute_frobenius(shrink(DenseMatrix::diagonal(d), 10.0)) == 0.0);
    CHECK(code_of([&] { (void)shrink(DenseMatrix::diagonal(d), 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("shrink at tau = sigma_5 leaves rank four") {
    const std::vector<double> sigma{50, 40, 30, 20, 10, 9, 5, 3, 2, 1};
    const DenseMatrix a = oracle::with_singular_values(30, 30, sigma, 17);
    const auto prof = singular_value_profile(shrink(a, sigma[4]));
    const auto rank = std::count_if(prof.begin(), prof.end(), [&](double s) { return s > 1e-10 * prof[0]; });
    CHECK(rank == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(prof[k] == doctest::Approx(sigma[k] - sigma[4]).epsilon(1e-10));
}

TEST_CASE("shrink minimizes tau*||X||_* + 0.5*||X - A||_F^2 on diagonal matrices") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> d(6);
        for (double& x : d) x = u(rng);
        const double tau = u(rng);
        std::vector<double> soft(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) soft[i] = std::max(d[i] - tau, 0.0);
        const DenseMatrix a = DenseMatrix::diagonal(d);
        const DenseMatrix x = shrink(a, tau);
        CHECK(oracle::brute_frobenius(x - DenseMatrix::diagonal(soft)) <= 1e-12);

        const double best = objective(x, a, tau);
        for (int k = 0; k < 5; ++k) {
            const DenseMatrix perturbed = x + 1e-3 * oracle::random_matrix(6, 6, 100 * trial + k);
            CHECK(objective(perturbed, a, tau) >= best - 1e-12);
        }
    }
}

TEST_CASE("shrink is nonexpansive") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const DenseMatrix a = oracle::random_matrix(25, 18, 2 * seed);
        const DenseMatrix b = oracle::random_matrix(25, 18, 2 * seed + 1);
        const double tau = 1.0 + static_cast<double>(seed % 5);
        CHECK(frobenius_norm(shrink(a, tau) - shrink(b, tau)) <= frobenius_norm(a - b) * (1 + 1e-12));
    }
}

TEST_CASE("default SVT configuration follows the standard heuristics") {
    auto config_for = [](std::size_t m, std::size_t n, std::size_t count) {
        std::vector<Observation> e;
        for (std::size_t k = 0; k < count; ++k) e.push_back({k / n, k % n, 1.0});
        return default_svt_config(ObservationSet(m, n, std::move(e)));
    };
    const auto c = config_for(200, 200, 12000);
    CHECK(c.tau == doctest::Approx(1000.0));
    CHECK(c.delta == doctest::Approx(4.0));
    CHECK(c.max_iters == 500);
    CHECK(c.tolerance == 1e-4);
    CHECK_FALSE(c.inner_rank_cap.has_value());

    CHECK(config_for(10, 10, 100).delta == doctest::Approx(1.2));

    const auto full_scale = config_for(1930, 413, 265697);
    CHECK(full_scale.tau == doctest::Approx(4464.0).epsilon(1e-4));
    CHECK(full_scale.tau == doctest::Approx(5.0 * std::sqrt(797090.0)));
    CHECK(full_scale.delta == doctest::Approx(3.6).epsilon(1e-5));
}

TEST_CASE("SVT config validation") {
    SvtConfig c{1.0, 1.0, 10, 1e-4, std::nullopt};
    CHECK_NOTHROW(c.validate());
    c.tolerance = 1.0;
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
    c.tolerance = 1e-4;
    c.max_iters = 0;
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
    c.max_iters = 5;
    c.tau = -1.0;
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("SVT recovers a rank-1 50x50 matrix from half its entries") {
    const DenseMatrix m = oracle::low_rank_product(50, 50, 1, 21);
    const auto omega = sample(m, 0.5, 4);
    const auto res = svt_complete(omega, default_svt_config(omega));
    CHECK(res.converged);
    CHECK(relative_error(res.x_hat, m) <= 1e-3);
}

TEST_CASE("SVT on a fully observed matrix") {
    const DenseMatrix m = oracle::low_rank_product(30, 20, 3, 5);
    const auto res = svt_complete(all_entries(m), default_svt_config(all_entries(m)));
    CHECK(res.converged);
    CHECK(res.iterations_used <= 50);
    CHECK(relative_error(res.x_hat, m) <= 1e-4);
}

TEST_CASE("SVT recovers rank 5 at 200x200 from 30% of entries") {
    const DenseMatrix m = oracle::low_rank_product(200, 200, 5, 2);
    const auto omega = sample(m, 0.3, 7);
    const auto res = svt_complete(omega, default_svt_config(omega));
    CHECK(res.converged);
    CHECK(res.iterations_used <= 500);
    CHECK(res.rank_of_solution == 5);
    CHECK(relative_error(res.x_hat, m) <= 1e-3);
}

TEST_CASE("exact recovery regime over several seeds") {
    const std::size_t m = 200, n = 200, r = 5;
    for (std::uint64_t seed = 3; seed < 6; ++seed) {
        CAPTURE(seed);
        const DenseMatrix truth = oracle::low_rank_product(m, n, r, 100 + seed);
        const auto omega = sample(truth, 0.3, 200 + seed);
        REQUIRE(static_cast<double>(r * (m + n - r)) <= 0.2 * static_cast<double>(omega.size()));
        const auto res = svt_complete(omega, default_svt_config(omega));
        CHECK(res.converged);
        CHECK(res.iterations_used <= 500);
        CHECK(relative_error(res.x_hat, truth) <= 1e-3);
    }
}

TEST_CASE("SVT residual history and determinism") {
    const DenseMatrix m = oracle::low_rank_product(40, 30, 2, 9);
    const auto omega = sample(m, 0.5, 2);
    const auto cfg = default_svt_config(omega);
    const auto a = svt_complete(omega, cfg);
    const auto b = svt_complete(omega, cfg);
    CHECK(a.x_hat == b.x_hat);
    CHECK(a.residual_history == b.residual_history);
    REQUIRE(a.residual_history.size() == a.iterations_used);
    for (double r : a.residual_history) CHECK(std::isfinite(r));
    CHECK(a.final_residual == a.residual_history.back());
    if (a.converged) CHECK(a.final_residual <= cfg.tolerance);
    CHECK(a.rank_of_solution <= 30);
}

TEST_CASE("SVT stops at max_iters without claiming convergence") {
    const DenseMatrix m = oracle::low_rank_product(40, 30, 2, 9);
    const auto omega = sample(m, 0.5, 2);
    auto cfg = default_svt_config(omega);
    cfg.max_iters = 3;
    const auto res = svt_complete(omega, cfg);
    CHECK_FALSE(res.converged);
    CHECK(res.iterations_used == 3);
}

TEST_CASE("SVT honours the inner rank cap") {
    const DenseMatrix m = oracle::low_rank_product(40, 30, 4, 19);
    const auto omega = sample(m, 0.6, 2);
    auto cfg = default_svt_config(omega);
    cfg.inner_rank_cap = 2;
    cfg.max_iters = 50;
    CHECK(svt_complete(omega, cfg).rank_of_solution <= 2);
}

TEST_CASE("SVT reports divergence for an oversized step") {
    const DenseMatrix m = oracle::low_rank_product(30, 30, 2, 3);
    const auto omega = sample(m, 0.5, 3);
    auto cfg = default_svt_config(omega);
    cfg.delta = 50.0 / omega.sampling_fraction();
    CHECK(code_of([&] { (void)svt_complete(omega, cfg); }) == ErrorCode::Divergence);
}

TEST_CASE("observation files round-trip") {
    const auto dir = std::filesystem::temp_directory_path() / "rlr_test_obs";
    std::filesystem::create_directories(dir);
    const DenseMatrix m = oracle::random_matrix(7, 9, 3);
    const auto omega = sample(m, 0.4, 8);
    write_observations(dir / "o.csv", omega);
    CHECK(read_observations(dir / "o.csv") == omega);
    {
        std::ifstream in(dir / "o.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header == "# 7 9");
    }

    std::ofstream(dir / "noheader.csv") << "0,0,1\n";
    CHECK(code_of([&] { (void)read_observations(dir / "noheader.csv"); }) == ErrorCode::Format);
    std::ofstream(dir / "oob.csv") << "# 2 2\n2,0,1\n";
    CHECK(code_of([&] { (void)read_observations(dir / "oob.csv"); }) == ErrorCode::OutOfBounds);
    std::ofstream(dir / "dup.csv") << "# 2 2\n1,0,1\n1,0,2\n";
    CHECK(code_of([&] { (void)read_observations(dir / "dup.csv"); }) == ErrorCode::DuplicateIndex);
}
