#include <benchmark/benchmark.h>

#include <random>

#include "perfhom/convolution.hpp"

namespace {

using namespace perfhom;

// Grid of n x n nodes on the unit square, kernel radius r.
void run_convolution(benchmark::State& state, ConvolutionMethod method) {
    const long n = state.range(0);
    const double h = 1.0 / static_cast<double>(n);
    const double radius = static_cast<double>(state.range(1)) / 100.0;
    Box box;
    box.upper = {1.0, 1.0, 0.0};
    const Grid g = Grid::covering(box, h, radius);
    const SampledKernel k = sample(rescale(make_kernel(2, Profile::bump), radius, RescaleMode::mass1), h);
    const Convolver conv(g, k, method);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> in(g.size()), out(g.size());
    for (double& v : in) v = u(rng);
    for (auto _ : state) {
        conv.apply(in, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["offsets"] = static_cast<double>(k.offsets.size());
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}

void BM_ConvolutionDirect(benchmark::State& state) { run_convolution(state, ConvolutionMethod::direct); }
void BM_ConvolutionFft(benchmark::State& state) { run_convolution(state, ConvolutionMethod::fft); }

// Arguments: nodes per axis, kernel radius in hundredths.
BENCHMARK(BM_ConvolutionDirect)->Args({64, 10})->Args({64, 25})->Args({128, 10})->Args({128, 25})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolutionFft)->Args({64, 10})->Args({64, 25})->Args({128, 10})->Args({128, 25})->Unit(benchmark::kMillisecond);

}  // namespace
