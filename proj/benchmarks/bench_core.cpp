#include <benchmark/benchmark.h>

#include "sincmux/sincmux.hpp"

using namespace sincmux;

namespace {

void BM_dft(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Waveform w = random_bandlimited(10e9, static_cast<double>(n) / 64e9, 64e9, RngSeed{1}, false);
    for (auto _ : state) {
        auto s = dft(w);
        benchmark::DoNotOptimize(s.bins.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(n));
}
BENCHMARK(BM_dft)->Arg(1 << 12)->Arg(1 << 16)->Arg(196608)->Arg(1 << 20);

void BM_sequence_waveform(benchmark::State& state) {
    const SincSequenceSpec spec{static_cast<int>(state.range(0)), 24e9, 0};
    const Grid grid = sequence_grid(spec, 16, 256);
    for (auto _ : state) {
        auto w = sequence_waveform(spec, grid);
        benchmark::DoNotOptimize(w.samples.data());
    }
}
BENCHMARK(BM_sequence_waveform)->Arg(3)->Arg(9)->Arg(33);

void BM_multiplex_demultiplex(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<SincSequenceSpec> specs;
    for (int l = 0; l < n; l++) specs.push_back({n, 24e9, l});
    const Grid grid = sequence_grid(specs[0], 16, 256);
    std::vector<Waveform> payloads;
    for (int l = 0; l < n; l++)
        payloads.push_back(random_bandlimited(24e9 / n * 0.875, grid.duration(),
                                              grid.sample_rate,
                                              RngSeed{static_cast<std::uint64_t>(l)}, true));
    RxConfig rx;
    for (auto _ : state) {
        const Waveform s = multiplex(payloads, specs);
        const Waveform x = demultiplex(s, specs[0], rx);
        benchmark::DoNotOptimize(x.samples.data());
    }
}
BENCHMARK(BM_multiplex_demultiplex)->Arg(3)->Arg(7);

void BM_fiber_propagation(benchmark::State& state) {
    Waveform w = random_bandlimited(20e9, 196608.0 / 384e9, 384e9, RngSeed{3}, false);
    FiberSpec fiber;
    fiber.length_km = 5.0;
    for (auto _ : state) {
        auto out = propagate_fiber(w, fiber);
        benchmark::DoNotOptimize(out.samples.data());
    }
}
BENCHMARK(BM_fiber_propagation);

void BM_link_segment(benchmark::State& state) {
    ExperimentConfig cfg = preset("mixed-analog-5km");
    cfg.tx.segments = 1;
    for (auto _ : state) {
        auto res = run_experiment(cfg);
        benchmark::DoNotOptimize(res.channels.data());
    }
}
BENCHMARK(BM_link_segment)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
