#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "curve3dvg/errors.hpp"
#include "curve3dvg/guidance.hpp"
#include "curve3dvg/io.hpp"
#include "support/test_support.hpp"

using namespace c3vg;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("c3vg_guid_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Camera south_cam(int size = 32) {
    Camera cam;
    cam.position = {0.0, -4.0, 0.0};
    cam.look_at = {0.0, 0.0, 0.0};
    cam.up = {0.0, 0.0, 1.0};
    cam.width = size;
    cam.height = size;
    return cam;
}

bool images_equal(const Image& a, const Image& b, double tol = 0.0) {
    if (!a.same_shape(b)) return false;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        if (std::abs(a.data[i] - b.data[i]) > tol) return false;
    return true;
}

}  // namespace

TEST_CASE("scaled-linear alpha_bar matches frozen reference values") {
    const std::vector<double> ab = scaled_linear_alpha_bar(1000);
    REQUIRE(ab.size() == 1000);
    // Reference values computed independently: beta_t from the square-root
    // interpolation of [0.00085, 0.012], alpha_bar_t the running product.
    CHECK(ab[0] == doctest::Approx(0.999150000000000).epsilon(1e-12));
    CHECK(ab[499] == doctest::Approx(0.277669650456468).epsilon(1e-12));
    CHECK(ab[999] == doctest::Approx(0.004660098513077).epsilon(1e-12));
    CHECK(std::is_sorted(ab.rbegin(), ab.rend()));
    CHECK(ab.front() < 1.0);
    CHECK(ab.back() > 0.0);
}

TEST_CASE("schedule defaults are internally consistent") {
    const ScheduleConfig cfg;
    CHECK(cfg.lambda0 == 1.0);
    CHECK(cfg.lambda1 == 7.5);
    CHECK(cfg.N == 1000);
    REQUIRE(cfg.alpha_bar.size() == 1000);
    CHECK(cfg.alpha_bar == scaled_linear_alpha_bar(1000));
    CHECK_NOTHROW(validate_schedule(cfg));
}

TEST_CASE("validate_schedule rejects inconsistent configs") {
    ScheduleConfig cfg;
    cfg.lambda1 = 0.5;  // below lambda0
    CHECK_THROWS_AS(validate_schedule(cfg), ConfigError);

    cfg = ScheduleConfig();
    cfg.t_lo_frac = 0.95;  // above t_hi_frac
    CHECK_THROWS_AS(validate_schedule(cfg), ConfigError);

    cfg = ScheduleConfig();
    cfg.alpha_bar.pop_back();  // wrong table size
    CHECK_THROWS_AS(validate_schedule(cfg), ConfigError);

    cfg = ScheduleConfig();
    cfg.alpha_bar[10] = cfg.alpha_bar[9];  // not strictly decreasing
    CHECK_THROWS_AS(validate_schedule(cfg), ConfigError);

    cfg = ScheduleConfig();
    cfg.alpha_bar[0] = 1.5;  // outside (0, 1]
    CHECK_THROWS_AS(validate_schedule(cfg), ConfigError);
}

TEST_CASE("cfg_scale hits both endpoints exactly and decreases in between") {
    const ScheduleConfig cfg;
    CHECK(cfg_scale(0, cfg) == cfg.lambda1);
    CHECK(cfg_scale(cfg.N, cfg) == cfg.lambda0);
    CHECK(cfg_scale(500, cfg) == doctest::Approx(1.0 + 6.5 * 0.5));
    for (int t = 1; t <= cfg.N; ++t) CHECK(cfg_scale(t, cfg) < cfg_scale(t - 1, cfg));
    CHECK_THROWS_AS(cfg_scale(-1, cfg), std::domain_error);
    CHECK_THROWS_AS(cfg_scale(cfg.N + 1, cfg), std::domain_error);
}

TEST_CASE("timestep annealing narrows the sampling window") {
    const ScheduleConfig cfg;  // total_steps 2000, window 0.1
    CHECK(anneal_upper_frac(0, cfg) == doctest::Approx(0.9));
    CHECK(anneal_upper_frac(cfg.total_steps - 1, cfg) == doctest::Approx(0.2));
    CHECK(anneal_upper_frac(cfg.total_steps / 2, cfg) ==
          doctest::Approx(0.5 * (0.9 + 0.2)).epsilon(1e-3));
    // Steps outside the run are a domain error, matching cfg_scale.
    CHECK_THROWS_AS(anneal_upper_frac(-5, cfg), std::domain_error);
    CHECK_THROWS_AS(anneal_upper_frac(cfg.total_steps + 100, cfg), std::domain_error);
}

TEST_CASE("anneal_timestep draws stay inside the per-step window") {
    const ScheduleConfig cfg;
    Rng rng(2718);
    int early_min = cfg.N, early_max = 0;
    for (int i = 0; i < 200; ++i) {
        const int t = anneal_timestep(0, cfg, rng);
        CHECK(t >= 100);
        CHECK(t <= 900);
        early_min = std::min(early_min, t);
        early_max = std::max(early_max, t);
    }
    // The window is actually exercised, not collapsed.
    CHECK(early_min < 200);
    CHECK(early_max > 800);

    for (int i = 0; i < 200; ++i) {
        const int t = anneal_timestep(cfg.total_steps - 1, cfg, rng);
        CHECK(t >= 100);
        CHECK(t <= 200);
    }

    Rng a(9), b(9);
    for (int i = 0; i < 50; ++i)
        CHECK(anneal_timestep(i, cfg, a) == anneal_timestep(i, cfg, b));
}

TEST_CASE("reconstruct_x0 inverts the forward noising identity") {
    const ScheduleConfig cfg;
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const int t = 1 + rng.uniform_int(0, cfg.N - 1);
        const double ab = cfg.alpha_bar[t - 1];
        Image x0(6, 5, 3), delta(6, 5, 3);
        for (auto& v : x0.data) v = rng.uniform(0.0, 1.0);
        for (auto& v : delta.data) v = rng.uniform(-1.0, 1.0);
        Image xt(6, 5, 3);
        for (std::size_t i = 0; i < xt.data.size(); ++i)
            xt.data[i] = std::sqrt(ab) * x0.data[i] + std::sqrt(1.0 - ab) * delta.data[i];
        const Image rec = reconstruct_x0(xt, delta, t, cfg);
        REQUIRE(rec.same_shape(x0));
        for (std::size_t i = 0; i < rec.data.size(); ++i)
            CHECK(rec.data[i] == doctest::Approx(x0.data[i]).epsilon(1e-9));
    }

    Image x(4, 4, 1), d(4, 4, 1), wrong(5, 4, 1);
    CHECK_THROWS_AS(reconstruct_x0(x, wrong, 10, cfg), std::invalid_argument);
    CHECK_THROWS_AS(reconstruct_x0(x, d, 0, cfg), std::domain_error);
    CHECK_THROWS_AS(reconstruct_x0(x, d, cfg.N + 1, cfg), std::domain_error);
}

TEST_CASE("rays hit the analytic primitives at known depths") {
    const Camera cam = south_cam();
    // Unit sphere: the center pixel ray hits the near pole at depth 3.
    const RayHit sphere = raycast_pixel(OracleScene::sphere(), cam, 16.0, 16.0);
    REQUIRE(sphere.hit());
    CHECK(sphere.primitive == 0);
    CHECK(sphere.depth == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(sphere.normal.y == doctest::Approx(-1.0).epsilon(1e-9));

    // Axis-aligned unit box: near face at y = -0.5, depth 3.5.
    OracleScene box;
    box.primitives.push_back(BoxPrimitive{Vec3{0, 0, 0}, Vec3{0.5, 0.5, 0.5}});
    const RayHit face = raycast_pixel(box, cam, 16.0, 16.0);
    REQUIRE(face.hit());
    CHECK(face.depth == doctest::Approx(3.5).epsilon(1e-9));
    CHECK(face.normal.x == doctest::Approx(0.0));
    CHECK(face.normal.y == doctest::Approx(-1.0));

    // A ray that misses everything reports no primitive and +inf depth.
    OracleScene small;
    small.primitives.push_back(SpherePrimitive{Vec3{0, 0, 0}, 0.2});
    const RayHit miss = raycast_pixel(small, cam, 1.0, 1.0);
    CHECK_FALSE(miss.hit());
    CHECK(std::isinf(miss.depth));
}

TEST_CASE("raycast_toward parameterizes by view-axis depth") {
    const Camera cam = south_cam();
    OracleScene box;
    box.primitives.push_back(BoxPrimitive{Vec3{0, 0, 0}, Vec3{0.5, 0.5, 0.5}});
    // Target on the near face, off axis: its z-depth equals the hit depth, so
    // depth compares directly with ProjectedPoint::d_z.
    const Vec3 target{0.25, -0.5, 0.1};
    const RayHit hit = raycast_toward(box, cam, target);
    REQUIRE(hit.hit());
    const CameraBasis basis = camera_basis(cam);
    CHECK(hit.depth == doctest::Approx(dot(target - cam.position, basis.forward))
                           .epsilon(1e-9));
    CHECK(hit.depth == doctest::Approx(3.5).epsilon(1e-9));

    // Targets at or behind the camera plane cannot be cast.
    const RayHit behind = raycast_toward(box, cam, Vec3{0.0, -4.5, 0.0});
    CHECK_FALSE(behind.hit());
    CHECK(std::isinf(behind.depth));
}

TEST_CASE("render_depth gives per-pixel first-surface depths") {
    OracleScene small;
    small.primitives.push_back(SpherePrimitive{Vec3{0, 0, 0}, 0.4});
    const Camera cam = south_cam(32);
    const DepthMap map = render_depth(small, cam);
    REQUIRE(map.width == 32);
    REQUIRE(map.height == 32);
    CHECK(cameras_equal(map.camera, cam, 1e-12));
    // Center pixels hit near depth 3.6, corners miss.
    const float center = map.at(16, 16);
    CHECK(center == doctest::Approx(3.6).epsilon(1e-2));
    CHECK(std::isinf(map.at(0, 0)));
    CHECK(std::isinf(map.at(31, 31)));
    // Depth grows toward the silhouette.
    CHECK(map.at(16, 16) <= map.at(18, 16));
}

TEST_CASE("edge images use the three-tone scheme") {
    OracleScene small;
    small.primitives.push_back(SpherePrimitive{Vec3{0, 0, 0}, 0.4});
    const Camera cam = south_cam(64);
    const Image img = render_edge_image(small, cam);
    REQUIRE(img.channels == 3);

    std::set<double> values;
    for (double v : img.data) values.insert(v);
    CHECK(values == std::set<double>{0.1, 0.92, 1.0});

    CHECK(img.at(0, 0, 0) == 1.0);    // background
    CHECK(img.at(32, 32, 0) == 0.92); // interior
    // Somewhere on the horizontal centerline sits a silhouette pixel.
    bool saw_edge = false;
    for (int x = 0; x < 64; ++x) saw_edge |= img.at(x, 32, 0) == 0.1;
    CHECK(saw_edge);
    // Channels agree.
    CHECK(img.at(32, 32, 1) == img.at(32, 32, 0));
    CHECK(img.at(32, 32, 2) == img.at(32, 32, 0));
}

TEST_CASE("sharp interior edges are detected between primitives") {
    // The two-primitive scene has a box in front of / beside the sphere; from
    // a viewpoint where both are visible the boundary between them is drawn.
    const Camera cam = south_cam(96);
    const Image img = render_edge_image(OracleScene::sphere_box(), cam);
    int dark = 0;
    for (double v : img.data) dark += v == 0.1;
    CHECK(dark > 96);  // more than a single silhouette's worth of edge pixels
}

TEST_CASE("gaussian blur is identity at sigma zero and preserves constants") {
    Image img(9, 7, 2);
    Rng rng(4);
    for (auto& v : img.data) v = rng.uniform(0.0, 1.0);
    CHECK(images_equal(gaussian_blur(img, 0.0), img));
    CHECK(images_equal(gaussian_blur(img, -1.0), img));

    Image flat(9, 7, 1, 0.37);
    const Image blurred = gaussian_blur(flat, 2.5);
    for (double v : blurred.data) CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("gaussian blur spreads an impulse symmetrically with unit mass") {
    Image impulse(9, 9, 1);
    impulse.at(4, 4, 0) = 1.0;
    const Image b = gaussian_blur(impulse, 1.0);
    double mass = 0.0;
    for (double v : b.data) mass += v;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.at(4, 4, 0) > b.at(3, 4, 0));
    CHECK(b.at(3, 4, 0) == doctest::Approx(b.at(5, 4, 0)));
    CHECK(b.at(4, 3, 0) == doctest::Approx(b.at(4, 5, 0)));
    CHECK(b.at(3, 4, 0) == doctest::Approx(b.at(4, 3, 0)));
}

TEST_CASE("blur sigma interpolates between the guidance extremes") {
    const ScheduleConfig cfg;
    CHECK(blur_sigma_for_cfg(cfg.lambda1, cfg) == doctest::Approx(0.0));
    CHECK(blur_sigma_for_cfg(cfg.lambda0, cfg) == doctest::Approx(4.0));
    CHECK(blur_sigma_for_cfg(0.5 * (cfg.lambda0 + cfg.lambda1), cfg) ==
          doctest::Approx(2.0));
    CHECK(blur_sigma_for_cfg(cfg.lambda0, cfg, 8.0) == doctest::Approx(8.0));
    // Values outside the range clamp.
    CHECK(blur_sigma_for_cfg(cfg.lambda1 + 3.0, cfg) == doctest::Approx(0.0));
    CHECK(blur_sigma_for_cfg(cfg.lambda0 - 3.0, cfg) == doctest::Approx(4.0));
}

TEST_CASE("oracle_render honours the blur mode") {
    const ScheduleConfig cfg;
    const Camera cam = south_cam(32);
    OracleScene small;
    small.primitives.push_back(SpherePrimitive{Vec3{0, 0, 0}, 0.4});

    const Image sharp = render_edge_image(small, cam);
    const GuidanceSample fine = oracle_render(small, cam, 3, 500, cfg, BlurMode::ConstantFine);
    CHECK(images_equal(fine.image, sharp));
    CHECK(fine.step == 3);
    CHECK(fine.t == 500);
    CHECK(cameras_equal(fine.depth_front.camera, cam, 1e-12));
    CHECK(cameras_equal(fine.depth_back.camera, antipodal_camera(cam), 1e-12));

    const GuidanceSample coarse =
        oracle_render(small, cam, 0, 500, cfg, BlurMode::ConstantCoarse);
    CHECK(images_equal(coarse.image, gaussian_blur(sharp, 4.0)));
    CHECK_FALSE(images_equal(coarse.image, sharp));

    // C2F at t = N has cfg_scale = lambda0, i.e. maximum blur.
    const GuidanceSample c2f_late =
        oracle_render(small, cam, 0, cfg.N, cfg, BlurMode::C2F);
    CHECK(images_equal(c2f_late.image, coarse.image));
    // C2F at small t is close to sharp (sub-pixel sigma).
    const GuidanceSample c2f_early = oracle_render(small, cam, 0, 1, cfg, BlurMode::C2F);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < sharp.data.size(); ++i)
        max_diff = std::max(max_diff, std::abs(c2f_early.image.data[i] - sharp.data[i]));
    CHECK(max_diff < 0.35);
    CHECK(!images_equal(c2f_early.image, coarse.image));
}

TEST_CASE("oracle guidance source is deterministic given the camera rng") {
    ScheduleConfig schedule;
    CameraSamplerConfig cams;
    cams.image_width = 32;
    cams.image_height = 32;
    OracleGuidanceSource src(OracleScene::sphere(), schedule, cams, BlurMode::ConstantFine);
    CHECK(src.camera_count() == 0);

    Rng rng_a(77), rng_b(77), rng_c(78);
    const auto batch_a = src.batch(0, 500, 3, rng_a);
    const auto batch_b = src.batch(0, 500, 3, rng_b);
    const auto batch_c = src.batch(0, 500, 3, rng_c);
    REQUIRE(batch_a.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(cameras_equal(batch_a[i].camera, batch_b[i].camera, 1e-12));
        CHECK(images_equal(batch_a[i].image, batch_b[i].image));
        CHECK(batch_a[i].t == 500);
    }
    bool any_different = false;
    for (int i = 0; i < 3; ++i)
        any_different |= !cameras_equal(batch_a[i].camera, batch_c[i].camera, 1e-9);
    CHECK(any_different);
    // Distinct cameras within a batch.
    CHECK_FALSE(cameras_equal(batch_a[0].camera, batch_a[1].camera, 1e-9));
}

TEST_CASE("prerendered source replays its fixed cameras") {
    ScheduleConfig schedule;
    std::vector<Camera> cams;
    for (int i = 0; i < 4; ++i) {
        Camera c = south_cam(32);
        c.position = {0.3 * i, -4.0, 0.2 * i};
        cams.push_back(c);
    }
    PrerenderedGuidanceSource src(OracleScene::sphere(), schedule, cams,
                                  BlurMode::ConstantFine);
    CHECK(src.camera_count() == 4);

    Rng rng(5);
    const auto batch = src.batch(0, 400, 6, rng);
    REQUIRE(batch.size() == 6);
    for (const GuidanceSample& s : batch) {
        bool known = false;
        for (int i = 0; i < 4; ++i) {
            if (!cameras_equal(s.camera, cams[i], 1e-12)) continue;
            known = true;
            CHECK(images_equal(s.image, src.sharp_target(i)));
        }
        CHECK(known);
    }

    Rng r1(6), r2(6);
    const auto b1 = src.batch(1, 300, 4, r1);
    const auto b2 = src.batch(1, 300, 4, r2);
    for (int i = 0; i < 4; ++i) CHECK(cameras_equal(b1[i].camera, b2[i].camera, 1e-12));
}

TEST_CASE("prerendered source accepts caller-supplied targets") {
    ScheduleConfig schedule;
    std::vector<Camera> cams = {south_cam(32), antipodal_camera(south_cam(32))};
    std::vector<Image> targets;
    for (int i = 0; i < 2; ++i) {
        Image img(32, 32, 3, 0.25 * (i + 1));
        targets.push_back(img);
    }
    PrerenderedGuidanceSource src(OracleScene::sphere(), schedule, cams, targets,
                                  BlurMode::ConstantFine);
    CHECK(images_equal(src.sharp_target(0), targets[0]));
    CHECK(images_equal(src.sharp_target(1), targets[1]));
    // Depths still come from the oracle.
    CHECK(src.front_depth(0).width == 32);
    CHECK(std::isfinite(src.front_depth(0).at(16, 16)));

    Rng rng(3);
    const auto batch = src.batch(0, 200, 3, rng);
    for (const GuidanceSample& s : batch) {
        const double v = s.image.at(5, 5, 0);
        CHECK((v == doctest::Approx(0.25) || v == doctest::Approx(0.5)));
    }

    std::vector<Image> wrong = {targets[0]};
    CHECK_THROWS_AS(
        PrerenderedGuidanceSource(OracleScene::sphere(), schedule, cams, wrong),
        ConfigError);
}

TEST_CASE("guidance steps roundtrip through the directory layout") {
    const fs::path dir = temp_dir("roundtrip");
    const ScheduleConfig cfg;
    const Camera cam_a = south_cam(32);
    Camera cam_b = south_cam(32);
    cam_b.position = {1.0, -3.5, 0.8};
    OracleScene small;
    small.primitives.push_back(SpherePrimitive{Vec3{0, 0, 0}, 0.4});

    const std::vector<GuidanceSample> cams = {
        oracle_render(small, cam_a, 0, 700, cfg, BlurMode::ConstantFine),
        oracle_render(small, cam_b, 0, 700, cfg, BlurMode::ConstantFine)};
    save_guidance_step(dir.string(), 0, 700, cfg_scale(700, cfg), cams);
    save_guidance_step(dir.string(), 10, 350, cfg_scale(350, cfg), {cams[0]});

    const std::vector<GuidanceStep> steps = load_guidance(dir.string());
    REQUIRE(steps.size() == 2);
    CHECK(steps[0].step == 0);
    CHECK(steps[0].t == 700);
    CHECK(steps[0].cfg == doctest::Approx(cfg_scale(700, cfg)));
    REQUIRE(steps[0].cams.size() == 2);
    CHECK(steps[1].step == 10);
    CHECK(steps[1].cams.size() == 1);

    // PNG roundtrip quantizes to 8 bits; depths roundtrip via float pfm.
    CHECK(images_equal(steps[0].cams[0].image, cams[0].image, 1.0 / 255.0 + 1e-9));
    CHECK(cameras_equal(steps[0].cams[1].camera, cam_b, 1e-6));
    const DepthMap& front = steps[0].cams[0].depth_front;
    REQUIRE(front.width == 32);
    CHECK(front.at(16, 16) == doctest::Approx(cams[0].depth_front.at(16, 16)));
    CHECK(std::isinf(front.at(0, 0)));
    CHECK(cameras_equal(steps[0].cams[0].depth_back.camera, antipodal_camera(cam_a), 1e-6));
}

TEST_CASE("loading rejects incomplete guidance directories") {
    const ScheduleConfig cfg;
    OracleScene small;
    small.primitives.push_back(SpherePrimitive{Vec3{0, 0, 0}, 0.4});
    const auto sample = oracle_render(small, south_cam(32), 0, 100, cfg);

    {
        const fs::path dir = temp_dir("missing_meta");
        save_guidance_step(dir.string(), 0, 100, 5.0, {sample});
        fs::remove(dir / "step_00000" / "meta.json");
        CHECK_THROWS_AS(load_guidance(dir.string()), IngestError);
    }
    {
        const fs::path dir = temp_dir("missing_pfm");
        save_guidance_step(dir.string(), 0, 100, 5.0, {sample});
        fs::remove(dir / "step_00000" / "cam_00.front.pfm");
        try {
            load_guidance(dir.string());
            FAIL("expected IngestError");
        } catch (const IngestError& e) {
            CHECK(e.path.find("front.pfm") != std::string::npos);
        }
    }
    {
        const fs::path dir = temp_dir("missing_cam_json");
        save_guidance_step(dir.string(), 0, 100, 5.0, {sample});
        fs::remove(dir / "step_00000" / "cam_00.json");
        CHECK_THROWS_AS(load_guidance(dir.string()), IngestError);
    }
}

TEST_CASE("directory source replays saved steps and flags exhaustion") {
    const fs::path dir = temp_dir("replay");
    const ScheduleConfig cfg;
    OracleScene small;
    small.primitives.push_back(SpherePrimitive{Vec3{0, 0, 0}, 0.4});
    const Camera cam = south_cam(32);
    for (int step : {0, 1, 2}) {
        const int t = 600 - 100 * step;
        save_guidance_step(dir.string(), step, t, cfg_scale(t, cfg),
                           {oracle_render(small, cam, step, t, cfg)});
    }

    DirectoryGuidanceSource src(dir.string());
    CHECK(src.camera_count() == 1);
    REQUIRE(src.steps().size() == 3);

    Rng rng(1);
    const auto b0 = src.batch(0, 600, 1, rng);
    REQUIRE(b0.size() == 1);
    CHECK(b0[0].t == 600);
    const auto b2 = src.batch(2, 400, 1, rng);
    CHECK(b2[0].t == 400);
    CHECK_THROWS_AS(src.batch(3, 300, 1, rng), RunError);
}

TEST_CASE("surface samples lie on their primitives") {
    Rng rng(12);
    OracleScene sphere = OracleScene::sphere();
    for (int i = 0; i < 50; ++i) {
        const Vec3 p = sample_surface_point(sphere, rng);
        CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-9));
    }

    OracleScene box;
    const Vec3 half{0.45, 0.55, 0.4};
    box.primitives.push_back(BoxPrimitive{Vec3{0.1, -0.2, 0.3}, half});
    for (int i = 0; i < 50; ++i) {
        const Vec3 rel = sample_surface_point(box, rng) - Vec3{0.1, -0.2, 0.3};
        const double fx = std::abs(rel.x) / half.x;
        const double fy = std::abs(rel.y) / half.y;
        const double fz = std::abs(rel.z) / half.z;
        const double m = std::max({fx, fy, fz});
        CHECK(m == doctest::Approx(1.0).epsilon(1e-9));  // on a face plane
        CHECK(fx <= 1.0 + 1e-9);
        CHECK(fy <= 1.0 + 1e-9);
        CHECK(fz <= 1.0 + 1e-9);
    }
}

TEST_CASE("ground-truth curves stay near the sphere surface") {
    Rng rng(21);
    const Scene3DVG scene = scene_on_primitives(OracleScene::sphere(), 12, rng, 2.0);
    REQUIRE(scene.paths.size() == 12);
    for (const Path3D& path : scene.paths) {
        CHECK(path.kind == PathKind::Sketch);
        CHECK(path.stroke_width == doctest::Approx(2.0));
        const BezierCurve3D c = path.curve(0);
        // Endpoints exactly on the sphere; the interior of the arc stays
        // within the cubic-arc approximation error.
        CHECK(c.points[0].norm() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(c.points[3].norm() == doctest::Approx(1.0).epsilon(1e-9));
        for (int i = 0; i <= 16; ++i) {
            const double r = eval_curve3d(c, i / 16.0).norm();
            CHECK(r > 0.99);
            CHECK(r < 1.01);
        }
    }
}

TEST_CASE("ground-truth curves on a box stay on a single face") {
    Rng rng(22);
    OracleScene box;
    const Vec3 center{0.0, 0.0, 0.0};
    const Vec3 half{0.5, 0.5, 0.5};
    box.primitives.push_back(BoxPrimitive{center, half});
    const Scene3DVG scene = scene_on_primitives(box, 10, rng);
    for (const Path3D& path : scene.paths) {
        // One coordinate is pinned to a face for every control point.
        int pinned_axis = -1;
        for (int axis = 0; axis < 3; ++axis) {
            bool all = true;
            for (const Vec3& p : path.points) {
                const double v = axis == 0 ? p.x : axis == 1 ? p.y : p.z;
                all &= std::abs(std::abs(v) - 0.5) < 1e-9;
            }
            if (all) pinned_axis = axis;
        }
        CHECK(pinned_axis >= 0);
        for (const Vec3& p : path.points) {
            CHECK(std::abs(p.x) <= 0.5 + 1e-9);
            CHECK(std::abs(p.y) <= 0.5 + 1e-9);
            CHECK(std::abs(p.z) <= 0.5 + 1e-9);
        }
    }
}

TEST_CASE("farthest point init spreads anchors and is deterministic") {
    Rng rng_a(33), rng_b(33);
    const Scene3DVG a = farthest_point_init(OracleScene::sphere(), 16, rng_a);
    const Scene3DVG b = farthest_point_init(OracleScene::sphere(), 16, rng_b);
    REQUIRE(a.paths.size() == 16);
    for (std::size_t i = 0; i < a.paths.size(); ++i)
        for (int j = 0; j < 4; ++j)
            CHECK((a.paths[i].points[j] - b.paths[i].points[j]).norm() == doctest::Approx(0.0));

    double min_pair = 1e9;
    for (std::size_t i = 0; i < a.paths.size(); ++i)
        for (std::size_t j = i + 1; j < a.paths.size(); ++j)
            min_pair = std::min(min_pair,
                                (a.paths[i].points[0] - a.paths[j].points[0]).norm());
    // Farthest-point anchors on the unit sphere stay well separated.
    CHECK(min_pair > 0.25);

    // Anchors are on the surface.
    for (const Path3D& p : a.paths)
        CHECK(p.points[0].norm() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("random ball init stays near the ball and is deterministic") {
    Rng rng_a(44), rng_b(44);
    const Scene3DVG a = random_ball_init(32, rng_a, 1.0);
    const Scene3DVG b = random_ball_init(32, rng_b, 1.0);
    REQUIRE(a.paths.size() == 32);
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        CHECK(a.paths[i].kind == PathKind::Sketch);
        CHECK(a.paths[i].points[0].norm() <= 0.8 + 1e-12);
        for (int j = 0; j < 4; ++j) {
            CHECK((a.paths[i].points[j] - b.paths[i].points[j]).norm() ==
                  doctest::Approx(0.0));
            CHECK(a.paths[i].points[j].norm() < 1.3);
        }
    }
    // The radius parameter scales the cloud.
    Rng rng_c(44);
    const Scene3DVG c = random_ball_init(32, rng_c, 0.1);
    for (const Path3D& p : c.paths)
        for (const Vec3& q : p.points) CHECK(q.norm() < 0.13);
}
