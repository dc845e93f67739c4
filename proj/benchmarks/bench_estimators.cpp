#include <benchmark/benchmark.h>

#include "llsfreq/dpll.hpp"
#include "llsfreq/estimator.hpp"
#include "llsfreq/nls.hpp"
#include "llsfreq/phase_estimator.hpp"
#include "llsfreq/signal.hpp"

using namespace llsfreq;

namespace {

SampledSignal tone(double duration) {
    return generate_noisy_tone(ToneParams::from_hz(1.0, 400e3, 0.3), NoiseSpec::from_snr_db(1.0, 27.0),
                               10e6, duration, 1);
}

void BM_TrackerPerSample(benchmark::State& state) {
    const auto s = tone(2e-3);
    const auto cfg = EstimatorConfig::from_hz(395e3, 10e6, 0.5e-3);
    for (auto _ : state) {
        FrequencyTracker tracker(cfg);
        for (double x : s.samples()) benchmark::DoNotOptimize(tracker.push(x));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_TrackerPerSample);

void BM_BatchBlocks(benchmark::State& state) {
    const auto s = tone(2e-3);
    const auto cfg = EstimatorConfig::from_hz(395e3, 10e6, 0.5e-3);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_frequency_blocks(s, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_BatchBlocks);

void BM_StageOneWindow(benchmark::State& state) {
    const auto solver = PhaseWindowSolver::build(two_pi * 395e3, 0.7071067811865476, 10e6);
    const auto s = tone(1e-4);
    const auto w = s.samples().subspan(0, solver.window_length());
    for (auto _ : state) benchmark::DoNotOptimize(solver.estimate(w, 0.0));
}
BENCHMARK(BM_StageOneWindow);

void BM_Nls(benchmark::State& state) {
    const double duration = static_cast<double>(state.range(0)) * 1e-6;
    const auto s = tone(duration);
    const auto cfg = NlsConfig::for_record(two_pi * 395e3, two_pi * 5e3, duration);
    for (auto _ : state) benchmark::DoNotOptimize(nls_estimate(s, cfg));
}
BENCHMARK(BM_Nls)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Dpll(benchmark::State& state) {
    const auto s = tone(2e-3);
    DpllConfig c;
    c.center_omega = two_pi * 400e3;
    c.settling_time = 0.2e-3;
    c.sample_rate = 10e6;
    for (auto _ : state) benchmark::DoNotOptimize(dpll_track(s, c));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_Dpll);

} // namespace

BENCHMARK_MAIN();
