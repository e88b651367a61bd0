#include <benchmark/benchmark.h>

#include "curve3dvg/camera.hpp"
#include "curve3dvg/guidance.hpp"
#include "curve3dvg/rng.hpp"
#include "curve3dvg/visibility.hpp"

namespace {

void BM_ImportanceForward(benchmark::State& state) {
    const c3vg::ImportanceNet net(31);
    const c3vg::Camera cam;
    c3vg::Rng rng(32);
    const c3vg::Vec3 p{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                       rng.uniform(-1.0, 1.0)};
    for (auto _ : state) benchmark::DoNotOptimize(net.importance(p, cam));
}
BENCHMARK(BM_ImportanceForward);

void BM_ImportanceBackward(benchmark::State& state) {
    const c3vg::ImportanceNet net(33);
    const c3vg::Camera cam;
    const c3vg::Vec3 p{0.3, -0.2, 0.5};
    c3vg::ImportanceNet::Tape tape;
    net.importance_tape(p, cam, tape);
    c3vg::NetParams grads = net.zero_grads();
    for (auto _ : state) {
        c3vg::Vec3 d_point;
        net.backward(tape, 1.0, grads, &d_point);
        benchmark::DoNotOptimize(d_point);
    }
}
BENCHMARK(BM_ImportanceBackward);

void BM_AntipodalVote(benchmark::State& state) {
    const auto oracle = c3vg::OracleScene::sphere();
    c3vg::Rng rng(34);
    const auto cams = c3vg::ring_cameras(1);
    const c3vg::Camera cam = cams[0];
    const c3vg::DepthMap front = c3vg::render_depth(oracle, cam);
    const c3vg::DepthMap back = c3vg::render_depth(oracle, c3vg::antipodal_camera(cam));
    const auto scene = c3vg::scene_on_primitives(oracle, 1, rng);
    const c3vg::VisibilityConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            c3vg::antipodal_vote(scene.curve(0), cam, front, back, cfg));
}
BENCHMARK(BM_AntipodalVote);

}  // namespace
