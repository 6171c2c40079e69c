#include "shrinktarget/best_approx.hpp"
#include "shrinktarget/construct.hpp"
#include "shrinktarget/criteria.hpp"
#include "shrinktarget/lattice_search.hpp"
#include "shrinktarget/orbit.hpp"

#include <benchmark/benchmark.h>

using namespace shrinktarget;

namespace {

CertifiedVector pair_theta()
{
    return CertifiedVector(RationalVector{Rational(355, 1131), Rational(1393, 4519)});
}

void simultaneous_scan(benchmark::State& state)
{
    auto theta = pair_theta();
    for (auto _ : state)
        benchmark::DoNotOptimize(best_simultaneous(theta, static_cast<std::uint64_t>(state.range(0))));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(simultaneous_scan)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void linear_scan(benchmark::State& state)
{
    auto theta = pair_theta();
    for (auto _ : state)
        benchmark::DoNotOptimize(best_linear(theta, static_cast<std::uint64_t>(state.range(0))));
}
BENCHMARK(linear_scan)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void transfer_sweep_d2(benchmark::State& state)
{
    auto theta = pair_theta();
    std::vector<Rational> hs;
    for (long h = 3; h <= state.range(0); ++h)
        hs.push_back(Rational(h));
    for (auto _ : state)
        benchmark::DoNotOptimize(transfer_sweep(theta, hs));
}
BENCHMARK(transfer_sweep_d2)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void build_construction(benchmark::State& state)
{
    auto params = make_params("poly:4", "1;geom:24a", static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_theta(params, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(build_construction)->Arg(6)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void return_search_window(benchmark::State& state)
{
    auto theta = sqrt2_minus_1(80);
    Integer lo = 1, hi = pow_of(Integer(10), static_cast<unsigned long>(state.range(0)));
    ReturnSearch search(theta.coords, lo, hi, Rational(1, 100000000));
    RationalVector x{Rational(1, 7)};
    for (auto _ : state)
        benchmark::DoNotOptimize(search.solve(x));
}
BENCHMARK(return_search_window)->Arg(9)->Arg(12)->Unit(benchmark::kMillisecond);

void orbit_iteration(benchmark::State& state)
{
    OrbitConfig c;
    c.theta = sqrt2_minus_1(80);
    c.delta = 1;
    c.n_max = static_cast<std::uint64_t>(state.range(0));
    auto x0 = sample_point(c, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(orbit_hits(c, x0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(orbit_iteration)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void orbit_iteration_d2(benchmark::State& state)
{
    OrbitConfig c;
    c.theta = build_theta(make_params("const:33", "1;geom:24a", 6), 6).theta;
    c.delta = 2;
    c.n_max = static_cast<std::uint64_t>(state.range(0));
    auto x0 = sample_point(c, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(orbit_hits(c, x0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(orbit_iteration_d2)->Arg(1000000)->Unit(benchmark::kMillisecond);

void log_law(benchmark::State& state)
{
    OrbitConfig c;
    c.theta = sqrt2_minus_1(80);
    c.delta = 1;
    c.n_max = static_cast<std::uint64_t>(state.range(0));
    auto x0 = sample_point(c, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(log_law_stat(c, x0));
}
BENCHMARK(log_law)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
