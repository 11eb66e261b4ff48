#include <benchmark/benchmark.h>

#include "relayia/dof.hpp"
#include "relayia/feasibility.hpp"

using namespace relayia;

namespace {

void BM_StackedSolve(benchmark::State& state, Topology t, int M, int N) {
    const ChannelSet cs = generate_generic({M, N}, 1);
    for (auto _ : state) {
        BeamformerSet beams = solve_scheme(cs, t, 1, 2);
        benchmark::DoNotOptimize(beams.mats[0](0, 0));
    }
}

void BM_ProbeCell(benchmark::State& state) {
    const int M = static_cast<int>(state.range(0));
    const int N = static_cast<int>(state.range(1));
    const ChannelSet cs = generate_generic({M, N}, 1);
    const int d = static_cast<int>(classify(Topology::AllUnicast, M, N).feasible_floor);
    for (auto _ : state) {
        ProbeVerdict v = probe_infeasibility(cs, Topology::AllUnicast, d);
        benchmark::DoNotOptimize(v.feasible);
    }
}

void BM_DofGrid(benchmark::State& state) {
    for (auto _ : state) {
        Rational acc(0);
        for (int M = 1; M <= 64; ++M)
            for (int N = 1; N <= 64; ++N) acc = acc + dof_y(M, N) * Rational(0);
        benchmark::DoNotOptimize(acc.num());
    }
}

void BM_OneToOne(benchmark::State& state) {
    const ChannelSet cs = generate_generic({7, 12}, 1);
    for (auto _ : state) {
        BeamformerSet beams = solve_one_to_one(cs, Topology::AllUnicast, 2, 3);
        benchmark::DoNotOptimize(beams.mats[0](0, 0));
    }
}

}  // namespace

BENCHMARK_CAPTURE(BM_StackedSolve, y_3_7, Topology::AllUnicast, 3, 7);
BENCHMARK_CAPTURE(BM_StackedSolve, x_2_5, Topology::MultipleUnicast, 2, 5);
BENCHMARK(BM_ProbeCell)->Args({3, 7})->Args({12, 14})->Args({24, 24});
BENCHMARK(BM_DofGrid);
BENCHMARK(BM_OneToOne);

BENCHMARK_MAIN();
