#include <benchmark/benchmark.h>

#include "smhd/integrator.hpp"

using namespace smhd;

namespace {

struct Fixture {
    BasisPtr basis;
    OperatorContext ctx;
    MhdState x;

    explicit Fixture(int n)
        : basis(make_basis(n, 1.0, 1.0, 1.0)),
          ctx(basis),
          x(random_state(basis, 7, 0, 1.0, 1.0)) {}
};

void bm_apply_b(benchmark::State& state) {
    Fixture f(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(f.ctx.apply_b(f.x, f.x));
    state.SetItemsProcessed(state.iterations());
}

void bm_step(benchmark::State& state) {
    Fixture f(int(state.range(0)));
    const MhdState forcing = zero_state(f.basis);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            semi_implicit_step(f.ctx, f.x, forcing, 1e-3));
    state.SetItemsProcessed(state.iterations());
}

void bm_norm_l4(benchmark::State& state) {
    Fixture f(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(norm_l4(f.x));
    state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(bm_apply_b)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(bm_step)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(bm_norm_l4)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK_MAIN();
