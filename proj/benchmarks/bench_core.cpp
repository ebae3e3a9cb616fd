#include <benchmark/benchmark.h>

#include "matad/demo.hpp"
#include "matad/forward.hpp"
#include "matad/gradcheck.hpp"
#include "matad/matfunc.hpp"

using namespace matad;

static void BM_MatMul(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    Mat a = random_mat(n, n, Field::Real, 11);
    Mat b = random_mat(n, n, Field::Real, 12);
    for (auto _ : state) {
        Mat c = matmul(a, b);
        benchmark::DoNotOptimize(c.data().data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MatMul)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BM_Inverse(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    Mat a = random_well_conditioned(n, Field::Real, 21);
    for (auto _ : state) {
        Mat inv = inverse(a);
        benchmark::DoNotOptimize(inv.data().data());
    }
}
BENCHMARK(BM_Inverse)->RangeMultiplier(2)->Range(8, 64);

static void BM_ApplyExp(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    Mat a = random_spectral_scaled(n, Field::Real, 31, 0.4);
    for (auto _ : state) {
        SeriesResult r = apply(MatrixFunction::exp(), a);
        benchmark::DoNotOptimize(r.value.data().data());
    }
}
BENCHMARK(BM_ApplyExp)->RangeMultiplier(2)->Range(4, 32);

static void BM_FrechetSeries(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    Mat a = random_spectral_scaled(n, Field::Real, 41, 0.4);
    Mat e = random_mat(n, n, Field::Real, 42);
    for (auto _ : state) {
        Mat d = frechet_series(MatrixFunction::exp(), a, e);
        benchmark::DoNotOptimize(d.data().data());
    }
}
BENCHMARK(BM_FrechetSeries)->RangeMultiplier(2)->Range(4, 16);

static void BM_FrechetBlock(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    Mat a = random_spectral_scaled(n, Field::Real, 41, 0.4);
    Mat e = random_mat(n, n, Field::Real, 42);
    for (auto _ : state) {
        Mat d = frechet_block(MatrixFunction::exp(), a, e);
        benchmark::DoNotOptimize(d.data().data());
    }
}
BENCHMARK(BM_FrechetBlock)->RangeMultiplier(2)->Range(4, 16);

static void BM_FFNBackprop(benchmark::State& state) {
    std::vector<std::size_t> widths{32, 16, 8};
    FFNParams params = FFNParams::seeded(widths, 51);
    Batch batch = Batch::seeded(32, 8, std::size_t(state.range(0)), 52);
    Program program = ffn_program(params, batch);
    std::vector<Leaf> leaves = ffn_leaves(params);
    for (auto _ : state) {
        GradientReport grads = backprop(record(program, leaves));
        benchmark::DoNotOptimize(grads.gradients.data());
    }
}
BENCHMARK(BM_FFNBackprop)->Arg(1)->Arg(8)->Arg(32);

static void BM_FFNManualBackward(benchmark::State& state) {
    std::vector<std::size_t> widths{32, 16, 8};
    FFNParams params = FFNParams::seeded(widths, 51);
    Batch batch = Batch::seeded(32, 8, std::size_t(state.range(0)), 52);
    for (auto _ : state) {
        FFNGradients grads = ffn_backward_manual(params, batch);
        benchmark::DoNotOptimize(grads.weight.data());
    }
}
BENCHMARK(BM_FFNManualBackward)->Arg(1)->Arg(8)->Arg(32);

BENCHMARK_MAIN();
