// Serial reference loops against their OpenMP forms.  Thread count follows
// OMP_NUM_THREADS; on a single core the two should be close.

#include "adelic/kernels.hpp"

#include <benchmark/benchmark.h>

using namespace adelic;

namespace {

struct Fixture {
    KernelParams params{0.5, 2, std::nullopt};
    Truncation trunc = default_truncation(params);
    IncrementSampler sampler{radius_distribution(params, trunc.r_min, trunc.r_max), trunc};
};

const Fixture& fixture() {
    static const Fixture fx;
    return fx;
}

template <Execution E>
void increment_radii(benchmark::State& state) {
    const Fixture& fx = fixture();
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(sample_increment_radii(fx.sampler, n, seed++, E));
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["threads"] = E == Execution::Parallel ? parallel_threads() : 1;
}

template <Execution E>
void sum_radii(benchmark::State& state) {
    const Fixture& fx = fixture();
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(sample_sum_radii(fx.sampler, fx.sampler, n, seed++, E));
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["threads"] = E == Execution::Parallel ? parallel_threads() : 1;
}

template <Execution E>
void kernel_batch(benchmark::State& state) {
    std::vector<Radius> radii{std::nullopt};
    for (const auto& q : pp_range(Rational(1, state.range(0)), Rational(state.range(0)))) radii.emplace_back(q);
    const KernelParams p{0.8, 1.7, std::nullopt};
    for (auto _ : state) benchmark::DoNotOptimize(z_finite_batch(radii, p, 1e-12, E));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(radii.size()));
    state.counters["threads"] = E == Execution::Parallel ? parallel_threads() : 1;
}

}  // namespace

BENCHMARK(increment_radii<Execution::Serial>)->Arg(1 << 12)->Arg(1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK(increment_radii<Execution::Parallel>)->Arg(1 << 12)->Arg(1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK(sum_radii<Execution::Serial>)->Arg(1 << 12)->Unit(benchmark::kMillisecond);
BENCHMARK(sum_radii<Execution::Parallel>)->Arg(1 << 12)->Unit(benchmark::kMillisecond);
BENCHMARK(kernel_batch<Execution::Serial>)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(kernel_batch<Execution::Parallel>)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
