// Serial reference vs OpenMP kernels. Sizes span the per-frame workload
// (a handful of tracks, one depth map) up to much larger batches.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "platoon/kernels.hpp"

using namespace platoon::kernels;

namespace {

std::vector<double> random_values(std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

template <auto Kernel>
void similarity(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::size_t dim = 16;
    const auto rows = random_values(n * dim, 1), cols = random_values(n * dim, 2);
    std::vector<double> out(n * n);
    for (auto _ : state) {
        Kernel(rows, n, cols, n, dim, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n));
}

template <auto Kernel>
void raster(benchmark::State& state)
{
    const int w = static_cast<int>(state.range(0)), h = w * 3 / 4;
    const RasterSpec spec{w, h, 640.0 / w, 480.0 / h, 10.0, h - 1};
    std::vector<Footprint> fps;
    for (int i = 0; i < 8; ++i)
        fps.push_back({40.0 * i, 40.0 * i + 90, 100.0 + 10 * i, 300.0 + 10 * i, 1.0 + i});
    std::vector<double> out(static_cast<std::size_t>(w * h));
    for (auto _ : state) {
        Kernel(spec, fps, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(out.size()));
}

template <auto Kernel>
void bilinear(benchmark::State& state)
{
    const int w = 64, h = 48;
    const auto grid = random_values(static_cast<std::size_t>(w * h), 3);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ux(0, w - 1), uy(0, h - 1);
    std::vector<GridQuery> q(static_cast<std::size_t>(state.range(0)));
    for (auto& x : q) x = {ux(rng), uy(rng)};
    std::vector<double> out(q.size());
    for (auto _ : state) {
        Kernel(grid, w, h, q, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(q.size()));
}

}  // namespace

BENCHMARK(similarity<serial::similarity_matrix>)->Name("similarity/serial")->RangeMultiplier(4)->Range(4, 256);
BENCHMARK(similarity<parallel::similarity_matrix>)->Name("similarity/parallel")->RangeMultiplier(4)->Range(4, 256);
BENCHMARK(raster<serial::rasterize>)->Name("rasterize/serial")->Arg(64)->Arg(320)->Arg(640);
BENCHMARK(raster<parallel::rasterize>)->Name("rasterize/parallel")->Arg(64)->Arg(320)->Arg(640);
BENCHMARK(bilinear<serial::bilinear_batch>)->Name("bilinear/serial")->RangeMultiplier(16)->Range(16, 65536);
BENCHMARK(bilinear<parallel::bilinear_batch>)->Name("bilinear/parallel")->RangeMultiplier(16)->Range(16, 65536);

BENCHMARK_MAIN();
