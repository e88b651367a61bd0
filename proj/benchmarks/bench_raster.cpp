#include <benchmark/benchmark.h>

#include "curve3dvg/image.hpp"
#include "curve3dvg/raster.hpp"
#include "curve3dvg/rng.hpp"

namespace {

c3vg::Scene2D random_strokes(int n, std::uint64_t seed) {
    c3vg::Rng rng(seed);
    c3vg::Scene2D scene;
    for (int i = 0; i < n; ++i) {
        c3vg::StrokeElement e;
        for (auto& p : e.curve.points) p = {rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
        e.width_ref = rng.uniform(1.0, 6.0);
        e.color = {rng.uniform(), rng.uniform(), rng.uniform(), 1.0};
        e.depth_key = rng.uniform(1.0, 5.0);
        e.path_index = i;
        scene.elements.push_back(e);
    }
    return scene;
}

void BM_RasterForward(benchmark::State& state) {
    const auto scene = random_strokes(static_cast<int>(state.range(0)), 21);
    const c3vg::Canvas canvas{128, 128, {1.0, 1.0, 1.0}};
    for (auto _ : state) {
        c3vg::Rasterizer raster(scene, canvas);
        benchmark::DoNotOptimize(raster.forward());
    }
}
BENCHMARK(BM_RasterForward)->Arg(16)->Arg(64);

void BM_RasterBackward(benchmark::State& state) {
    const auto scene = random_strokes(static_cast<int>(state.range(0)), 22);
    const c3vg::Canvas canvas{128, 128, {1.0, 1.0, 1.0}};
    c3vg::Image grad(128, 128, 4, 1e-3);
    for (auto _ : state) {
        c3vg::Rasterizer raster(scene, canvas);
        raster.forward();
        benchmark::DoNotOptimize(raster.backward(grad));
    }
}
BENCHMARK(BM_RasterBackward)->Arg(16)->Arg(64);

}  // namespace
