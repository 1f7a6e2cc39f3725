#include "hwv/hwv.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace hwv;

namespace {

PeriodicSignal noise(std::size_t n)
{
    std::mt19937_64 gen(1);
    std::normal_distribution<double> nd;
    PeriodicSignal s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = nd(gen);
    return s;
}

ForwardOperator power_zero(std::size_t n, double alpha)
{
    ProfileParams p;
    p.alpha = alpha;
    return ForwardOperator(kernel_q1(5.0, n), make_mu_profile(ProfileKind::power_zero, p, n));
}

void BM_ForwardTransform(benchmark::State& state)
{
    const auto s = noise(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(forward_transform(s));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ForwardTransform)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oNLogN);

void BM_Convolution(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto s = noise(n);
    const auto q = kernel_q1(5.0, n);
    for (auto _ : state) benchmark::DoNotOptimize(circular_convolve(s, q.spectrum));
}
BENCHMARK(BM_Convolution)->RangeMultiplier(4)->Range(256, 65536);

void BM_Analyze(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const PeriodizedBasis basis(n, 1, log2_exact(n), WaveletFilter::daubechies(4));
    const auto s = noise(n);
    for (auto _ : state) benchmark::DoNotOptimize(analyze(basis, s));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Analyze)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oN);

void BM_RoundTrip(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const PeriodizedBasis basis(n, 1, log2_exact(n), WaveletFilter::daubechies(4));
    const auto s = noise(n);
    for (auto _ : state) benchmark::DoNotOptimize(reconstruct(basis, analyze(basis, s)));
}
BENCHMARK(BM_RoundTrip)->RangeMultiplier(4)->Range(256, 65536);

void BM_BuildVaguelettes(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const PeriodizedBasis basis(n, 1, log2_exact(n) - 2, WaveletFilter::daubechies(4));
    const auto q = kernel_q1(5.0, n);
    for (auto _ : state) benchmark::DoNotOptimize(build_vaguelettes(q, basis));
}
BENCHMARK(BM_BuildVaguelettes)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond);

void BM_EstimatorSetup(benchmark::State& state)
{
    const auto op = power_zero(static_cast<std::size_t>(state.range(0)), 3.0);
    for (auto _ : state) {
        HybridEstimator est(op, 0.02);
        benchmark::DoNotOptimize(est.J());
    }
}
BENCHMARK(BM_EstimatorSetup)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond);

void BM_AdaptiveEstimate(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto op = power_zero(n, 3.0);
    const HybridEstimator est(op, 0.02);
    const auto y = generate_dataset(op, make_test_signal("blip", n), 0.02, 1).y;
    for (auto _ : state) benchmark::DoNotOptimize(adaptive_estimate(est, y));
}
BENCHMARK(BM_AdaptiveEstimate)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond);

void BM_GalerkinSolve(benchmark::State& state)
{
    const std::size_t n = 1024;
    const int m = static_cast<int>(state.range(0));
    const auto op = power_zero(n, 3.0);
    const PeriodizedBasis basis(n, 1, 7);
    const auto part = partition_indices(basis, op.singularities(), 3, 4);
    const auto im = forward_scaling_images(m, op, basis);
    const auto f = make_test_signal("blip", n);
    const auto sys = assemble_system(m, op.apply(f), part.scaling_level(m), im, analyze(basis, f, m).a);
    for (auto _ : state) benchmark::DoNotOptimize(solve_singular_block(sys));
}
BENCHMARK(BM_GalerkinSolve)->DenseRange(2, 6);

} // namespace
BENCHMARK_MAIN();
