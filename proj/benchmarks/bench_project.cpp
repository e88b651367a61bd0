#include <benchmark/benchmark.h>

#include "curve3dvg/camera.hpp"
#include "curve3dvg/project.hpp"
#include "curve3dvg/rng.hpp"

namespace {

c3vg::BezierCurve3D random_curve(c3vg::Rng& rng, double spread) {
    c3vg::BezierCurve3D c;
    for (auto& p : c.points)
        p = {rng.uniform(-spread, spread), rng.uniform(-spread, spread),
             rng.uniform(-spread, spread)};
    return c;
}

void BM_ProjectCurve(benchmark::State& state) {
    c3vg::Rng rng(11);
    const c3vg::Camera cam;
    std::vector<c3vg::BezierCurve3D> curves;
    for (int i = 0; i < 256; ++i) curves.push_back(random_curve(rng, 0.5));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(c3vg::project_curve(cam, curves[i % curves.size()]));
        ++i;
    }
}
BENCHMARK(BM_ProjectCurve);

void BM_ProjectionError(benchmark::State& state) {
    c3vg::Rng rng(12);
    const c3vg::Camera cam;
    const c3vg::BezierCurve3D curve = random_curve(rng, 0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(c3vg::projection_error(cam, curve, 64));
}
BENCHMARK(BM_ProjectionError);

}  // namespace

BENCHMARK_MAIN();
