#include <benchmark/benchmark.h>

#include <random>

#include "rlr/completion.hpp"
#include "rlr/field.hpp"
#include "rlr/masks.hpp"
#include "rlr/matrix.hpp"
#include "rlr/radar.hpp"

using namespace rlr;

namespace {

DenseMatrix gaussian(std::size_t m, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    DenseMatrix a(m, n);
    for (auto& x : a.data()) x = nd(rng);
    return a;
}

DenseMatrix low_rank(std::size_t m, std::size_t n, std::size_t r, std::uint64_t seed) {
    return matmul(gaussian(m, r, seed), gaussian(r, n, seed + 1));
}

}  // namespace

static void BM_Svd(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto n = static_cast<std::size_t>(state.range(1));
    const DenseMatrix a = gaussian(m, n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(svd(a));
}
BENCHMARK(BM_Svd)->Args({100, 60})->Args({200, 120})->Args({400, 200})->Unit(benchmark::kMillisecond);

static void BM_Shrink(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const DenseMatrix a = gaussian(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(shrink(a, 0.5 * std::sqrt(static_cast<double>(n))));
}
BENCHMARK(BM_Shrink)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_SvtComplete(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const DenseMatrix m = low_rank(n, n, 5, 3);
    MaskSpec ms;
    ms.rows = n;
    ms.cols = n;
    ms.fraction = 0.3;
    ms.seed = 4;
    const auto omega = apply_mask(m, make_mask(ms));
    const auto cfg = default_svt_config(omega);
    for (auto _ : state) benchmark::DoNotOptimize(svt_complete(omega, cfg));
}
BENCHMARK(BM_SvtComplete)->Arg(100)->Arg(200)->Unit(benchmark::kSecond)->Iterations(1);

static void BM_SynthesizeField(benchmark::State& state) {
    FieldSpec spec;
    spec.n_range = static_cast<std::size_t>(state.range(0));
    spec.n_azimuth = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(synthesize_field(spec));
}
BENCHMARK(BM_SynthesizeField)->Args({200, 100})->Args({1930, 413})->Unit(benchmark::kMillisecond);

static void BM_MakeMask(benchmark::State& state) {
    MaskSpec ms;
    ms.rows = 1930;
    ms.cols = 413;
    for (auto _ : state) benchmark::DoNotOptimize(make_mask(ms));
}
BENCHMARK(BM_MakeMask)->Unit(benchmark::kMillisecond);

static void BM_Periodogram(benchmark::State& state) {
    const RadarParams p(0.032, 2000.0, 1e-6, 30000.0, 70.0);
    const auto iq = synthesize_weather_iq({-30.0, 6.0, 3.5}, p, static_cast<std::size_t>(state.range(0)), -60.0, 1);
    for (auto _ : state) benchmark::DoNotOptimize(periodogram(iq));
}
BENCHMARK(BM_Periodogram)->Arg(64)->Arg(1024);
BENCHMARK_MAIN();
