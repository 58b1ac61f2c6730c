#include <benchmark/benchmark.h>

#include "dtc/analysis.hpp"
#include "dtc/chain.hpp"
#include "dtc/glide_model.hpp"
#include "dtc/heun.hpp"
#include "dtc/num/integrator.hpp"

using namespace dtc;

static void BM_TwoLevelPeriod(benchmark::State& state) {
    const glide::GlideModelParams p(static_cast<double>(state.range(0)));
    const auto psi = glide::state_from_coefficients(1.0, 0.0);
    const num::TimeGrid grid(0.0, p.period(), 2);
    for (auto _ : state) {
        auto out = num::integrate_schrodinger(glide::generator(p), psi, grid, 1e-12);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_TwoLevelPeriod)->Arg(4)->Arg(40)->Arg(90);

static void BM_RemainProbability(benchmark::State& state) {
    const double a = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(heun::remain_probability(a));
}
BENCHMARK(BM_RemainProbability)->Arg(10)->Arg(80);

static void BM_FindRoot(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(analysis::find_root(n));
}
BENCHMARK(BM_FindRoot)->Arg(1)->Arg(13);

static void BM_ChainApply(benchmark::State& state) {
    chain::ChainParams p;
    p.sites = static_cast<int>(state.range(0));
    p.alpha = 80.0;
    const auto psi = chain::build_initial_state(p.sites, chain::Axis::x);
    chain::State out(psi.size());
    for (auto _ : state) {
        chain::apply_chain_hamiltonian(p, 0.7, psi, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(psi.size()));
}
BENCHMARK(BM_ChainApply)->Arg(8)->Arg(10)->Arg(12);

static void BM_ChainFloquetOperator(benchmark::State& state) {
    chain::ChainParams p;
    p.sites = static_cast<int>(state.range(0));
    p.alpha = 80.0;
    for (auto _ : state) {
        auto u = chain::floquet_operator(p, 1e-10);
        benchmark::DoNotOptimize(u.data());
    }
}
BENCHMARK(BM_ChainFloquetOperator)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
