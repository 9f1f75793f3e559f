// Serial reference batch loop against the OpenMP kernel on the same
// integrands. The two produce identical estimates; only the wall time differs.

#include <benchmark/benchmark.h>

#include "asianqmc/engine.hpp"

using namespace asianqmc;

namespace {

const Integrand& integrand(Estimator estimator) {
    static const Integrand mv = make_greek_integrand(MethodSpec{Sampler::kRQMC, Estimator::kMV, Construction::kPca},
                                                     GreekKind::kDelta, {OptionKind::kAsianCall, 100.0},
                                                     MarketParams{}, TimeGrid(64, 1.0), 1);
    static const Integrand cmv = make_greek_integrand(MethodSpec{Sampler::kRQMC, Estimator::kCMV, Construction::kPca},
                                                      GreekKind::kDelta, {OptionKind::kAsianCall, 100.0},
                                                      MarketParams{}, TimeGrid(64, 1.0), 1);
    return estimator == Estimator::kMV ? mv : cmv;
}

constexpr int kBatches = 16;
constexpr int kSamples = 1 << 12;

void BM_Serial(benchmark::State& state) {
    const auto estimator = static_cast<Estimator>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(run_batches_serial(integrand(estimator), Sampler::kRQMC, kBatches, kSamples, 7));
    state.SetItemsProcessed(state.iterations() * kBatches * kSamples);
}

void BM_OpenMP(benchmark::State& state) {
    const auto estimator = static_cast<Estimator>(state.range(0));
    const int workers = static_cast<int>(state.range(1));
    for (auto _ : state)
        benchmark::DoNotOptimize(run_batches(integrand(estimator), Sampler::kRQMC, kBatches, kSamples, 7, workers));
    state.SetItemsProcessed(state.iterations() * kBatches * kSamples);
}

}  // namespace

BENCHMARK(BM_Serial)->ArgName("cmv")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OpenMP)
    ->ArgNames({"cmv", "workers"})
    ->ArgsProduct({{0, 1}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
