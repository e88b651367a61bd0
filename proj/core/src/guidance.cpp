#include "curve3dvg/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "curve3dvg/errors.hpp"
#include "curve3dvg/io.hpp"
#include "curve3dvg/parallel.hpp"
#include "curve3dvg/project.hpp"

namespace c3vg {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- schedule ------------------------------------------------------------

ScheduleConfig::ScheduleConfig() : alpha_bar(scaled_linear_alpha_bar(N)) {}

std::vector<double> scaled_linear_alpha_bar(int N, double beta_start, double beta_end) {
    if (N < 1) throw ConfigError("schedule needs N >= 1");
    std::vector<double> out;
    out.reserve(N);
    const double s0 = std::sqrt(beta_start);
    const double s1 = std::sqrt(beta_end);
    double prod = 1.0;
    for (int t = 1; t <= N; ++t) {
        const double frac = N > 1 ? double(t - 1) / double(N - 1) : 0.0;
        const double sq = s0 + frac * (s1 - s0);
        prod *= 1.0 - sq * sq;
        out.push_back(prod);
    }
    return out;
}

void validate_schedule(const ScheduleConfig& cfg) {
    if (!(cfg.lambda0 > 0.0) || cfg.lambda1 < cfg.lambda0)
        throw ConfigError("schedule requires lambda1 >= lambda0 > 0");
    if (!(cfg.t_lo_frac >= 0.0 && cfg.t_lo_frac < cfg.t_hi_frac && cfg.t_hi_frac <= 1.0))
        throw ConfigError("schedule requires 0 <= t_lo < t_hi <= 1");
    if (cfg.N < 1 || cfg.total_steps < 1) throw ConfigError("schedule sizes must be positive");
    if (static_cast<int>(cfg.alpha_bar.size()) != cfg.N)
        throw ConfigError("alpha_bar table size must equal N");
    double prev = 1.0;
    for (double a : cfg.alpha_bar) {
        if (!(a > 0.0 && a <= 1.0 && a < prev))
            throw ConfigError("alpha_bar must be strictly decreasing within (0,1]");
        prev = a;
    }
}

double cfg_scale(int t, const ScheduleConfig& cfg) {
    if (t < 0 || t > cfg.N) throw std::domain_error("cfg_scale timestep outside 0..N");
    return cfg.lambda0 + (cfg.lambda1 - cfg.lambda0) * (1.0 - double(t) / double(cfg.N));
}

double anneal_upper_frac(int step, const ScheduleConfig& cfg) {
    if (step < 0 || step >= cfg.total_steps)
        throw std::domain_error("anneal step outside 0..total_steps-1");
    const double hi_end = cfg.t_lo_frac + cfg.anneal_window_frac;
    const double denom = std::max(1, cfg.total_steps - 1);
    const double frac = cfg.t_hi_frac + (hi_end - cfg.t_hi_frac) * (double(step) / denom);
    return std::clamp(frac, cfg.t_lo_frac, cfg.t_hi_frac);
}

int anneal_timestep(int step, const ScheduleConfig& cfg, Rng& rng) {
    const int lo = std::max(1, static_cast<int>(std::lround(cfg.t_lo_frac * cfg.N)));
    int hi = static_cast<int>(std::lround(anneal_upper_frac(step, cfg) * cfg.N));
    hi = std::clamp(hi, lo, cfg.N);
    return static_cast<int>(rng.uniform_int(lo, hi));
}

Image reconstruct_x0(const Image& x_t, const Image& delta_star, int t,
                     const ScheduleConfig& cfg) {
    if (!x_t.same_shape(delta_star))
        throw std::invalid_argument("reconstruct_x0 arrays must share a shape");
    if (t < 1 || t > cfg.N) throw std::domain_error("reconstruct_x0 timestep outside 1..N");
    const double a = cfg.alpha_bar[t - 1];
    const double inv_sqrt_a = 1.0 / std::sqrt(a);
    const double sqrt_1ma = std::sqrt(1.0 - a);
    Image out = x_t;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = inv_sqrt_a * (x_t.data[i] - sqrt_1ma * delta_star.data[i]);
    return out;
}

// ---- oracle geometry -----------------------------------------------------

OracleScene OracleScene::sphere() {
    OracleScene s;
    s.primitives.push_back(SpherePrimitive{{0.0, 0.0, 0.0}, 1.0});
    return s;
}

OracleScene OracleScene::sphere_box() {
    OracleScene s;
    s.primitives.push_back(SpherePrimitive{{-0.45, 0.0, 0.25}, 0.7});
    s.primitives.push_back(BoxPrimitive{{0.7, 0.1, -0.35}, {0.45, 0.55, 0.4}});
    return s;
}

namespace {

constexpr double kRayEps = 1e-9;
const double kInf = std::numeric_limits<double>::infinity();

// Rays are parameterized so dot(dir, camera forward) == 1; the parameter is
// then exactly the camera-space z-depth.
struct Ray {
    Vec3 origin;
    Vec3 dir;
};

bool hit_prim(const SpherePrimitive& s, const Ray& ray, double max_known, double& tau,
              Vec3& normal) {
    const Vec3 oc = ray.origin - s.center;
    const double a = dot(ray.dir, ray.dir);
    const double b = 2.0 * dot(ray.dir, oc);
    const double c = dot(oc, oc) - s.radius * s.radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return false;
    const double sq = std::sqrt(disc);
    double candidate = (-b - sq) / (2.0 * a);
    if (candidate <= kRayEps) candidate = (-b + sq) / (2.0 * a);
    if (candidate <= kRayEps || candidate >= max_known) return false;
    tau = candidate;
    normal = normalized(ray.origin + candidate * ray.dir - s.center);
    return true;
}

bool hit_prim(const BoxPrimitive& box, const Ray& ray, double max_known, double& tau,
              Vec3& normal) {
    const double o[3] = {ray.origin.x - box.center.x, ray.origin.y - box.center.y,
                         ray.origin.z - box.center.z};
    const double d[3] = {ray.dir.x, ray.dir.y, ray.dir.z};
    const double h[3] = {box.half.x, box.half.y, box.half.z};
    double tmin = -kInf, tmax = kInf;
    int axis_min = -1;
    double sign_min = 1.0;
    for (int a = 0; a < 3; ++a) {
        if (std::abs(d[a]) < 1e-14) {
            if (std::abs(o[a]) > h[a]) return false;
            continue;
        }
        double t0 = (-h[a] - o[a]) / d[a];
        double t1 = (h[a] - o[a]) / d[a];
        if (t0 > t1) std::swap(t0, t1);
        if (t0 > tmin) {
            tmin = t0;
            axis_min = a;
            sign_min = d[a] > 0.0 ? -1.0 : 1.0;
        }
        tmax = std::min(tmax, t1);
        if (tmin > tmax) return false;
    }
    double candidate = tmin;
    if (candidate <= kRayEps) candidate = tmax;
    if (candidate <= kRayEps || candidate >= max_known) return false;
    tau = candidate;
    normal = {0.0, 0.0, 0.0};
    if (axis_min == 0)
        normal.x = sign_min;
    else if (axis_min == 1)
        normal.y = sign_min;
    else if (axis_min == 2)
        normal.z = sign_min;
    else
        normal.z = 1.0;
    return true;
}

RayHit trace(const OracleScene& scene, const Ray& ray) {
    RayHit best;
    best.depth = kInf;
    for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
        double tau;
        Vec3 normal;
        const bool hit = std::visit(
            [&](const auto& prim) { return hit_prim(prim, ray, best.depth, tau, normal); },
            scene.primitives[i]);
        if (hit) {
            best.depth = tau;
            best.normal = normal;
            best.primitive = static_cast<int>(i);
        }
    }
    return best;
}

Ray pixel_ray(const Camera& cam, double px, double py) {
    const CameraBasis basis = camera_basis(cam);
    const double s = 0.5 * std::min(cam.width, cam.height);
    const double f = focal_length(cam);
    const double x_ndc = (px - 0.5 * cam.width) / s;
    const double y_ndc = -(py - 0.5 * cam.height) / s;
    return {cam.position,
            basis.forward + (x_ndc / f) * basis.right + (y_ndc / f) * basis.up};
}

}  // namespace

RayHit raycast_pixel(const OracleScene& scene, const Camera& cam, double px, double py) {
    return trace(scene, pixel_ray(cam, px, py));
}

RayHit raycast_toward(const OracleScene& scene, const Camera& cam, const Vec3& target) {
    const CameraBasis basis = camera_basis(cam);
    const Vec3 rel = target - cam.position;
    const double z = dot(rel, basis.forward);
    if (z <= kNearEpsilon) {
        RayHit miss;
        miss.depth = kInf;
        return miss;
    }
    return trace(scene, Ray{cam.position, (1.0 / z) * rel});
}

DepthMap render_depth(const OracleScene& scene, const Camera& cam) {
    DepthMap map;
    map.width = cam.width;
    map.height = cam.height;
    map.camera = cam;
    map.depth.assign(static_cast<std::size_t>(cam.width) * cam.height, 0.0f);
    parallel_chunks(static_cast<std::size_t>(cam.height), [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
            for (int x = 0; x < cam.width; ++x) {
                const RayHit hit = raycast_pixel(scene, cam, x + 0.5, y + 0.5);
                map.depth[y * cam.width + x] =
                    hit.hit() ? static_cast<float>(hit.depth)
                              : std::numeric_limits<float>::infinity();
            }
        }
    });
    return map;
}

Image render_edge_image(const OracleScene& scene, const Camera& cam) {
    const int W = cam.width, H = cam.height;
    std::vector<RayHit> gbuf(static_cast<std::size_t>(W) * H);
    parallel_chunks(static_cast<std::size_t>(H), [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y)
            for (int x = 0; x < W; ++x)
                gbuf[y * W + x] = raycast_pixel(scene, cam, x + 0.5, y + 0.5);
    });

    const auto differs = [](const RayHit& a, const RayHit& b) {
        if (a.hit() != b.hit()) return true;
        if (!a.hit()) return false;
        if (a.primitive != b.primitive) return true;
        const double depth_tol = 0.03 * std::min(a.depth, b.depth);
        if (std::abs(a.depth - b.depth) > depth_tol) return true;
        return dot(a.normal, b.normal) < 0.95;
    };

    Image out(W, H, 3, 1.0);
    parallel_chunks(static_cast<std::size_t>(H), [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
            for (int x = 0; x < W; ++x) {
                const RayHit& here = gbuf[y * W + x];
                double v = here.hit() ? 0.92 : 1.0;
                const int iy = static_cast<int>(y);
                const int nx[4] = {x - 1, x + 1, x, x};
                const int ny[4] = {iy, iy, iy - 1, iy + 1};
                for (int k = 0; k < 4; ++k) {
                    if (nx[k] < 0 || nx[k] >= W || ny[k] < 0 || ny[k] >= H) continue;
                    if (differs(here, gbuf[static_cast<std::size_t>(ny[k]) * W + nx[k]])) {
                        v = 0.1;
                        break;
                    }
                }
                for (int c = 0; c < 3; ++c) out.at(x, static_cast<int>(y), c) = v;
            }
        }
    });
    return out;
}

Image gaussian_blur(const Image& image, double sigma) {
    if (sigma <= 0.0) return image;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    const int W = image.width, H = image.height, C = image.channels;
    Image tmp(W, H, C), out(W, H, C);
    // Horizontal pass with clamped edges.
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    const int xx = std::clamp(x + i, 0, W - 1);
                    acc += kernel[i + radius] * image.at(xx, y, c);
                }
                tmp.at(x, y, c) = acc;
            }
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    const int yy = std::clamp(y + i, 0, H - 1);
                    acc += kernel[i + radius] * tmp.at(x, yy, c);
                }
                out.at(x, y, c) = acc;
            }
    return out;
}

double blur_sigma_for_cfg(double cfg_value, const ScheduleConfig& cfg, double sigma_max) {
    if (cfg.lambda1 <= cfg.lambda0) return 0.0;
    const double frac = (cfg.lambda1 - cfg_value) / (cfg.lambda1 - cfg.lambda0);
    return sigma_max * std::clamp(frac, 0.0, 1.0);
}

namespace {

double blur_sigma_for_mode(BlurMode mode, int t, const ScheduleConfig& cfg) {
    switch (mode) {
        case BlurMode::ConstantFine: return 0.0;
        case BlurMode::ConstantCoarse: return 4.0;
        case BlurMode::C2F: break;
    }
    return blur_sigma_for_cfg(cfg_scale(t, cfg), cfg);
}

}  // namespace

GuidanceSample oracle_render(const OracleScene& scene, const Camera& cam, int step, int t,
                             const ScheduleConfig& cfg, BlurMode mode) {
    GuidanceSample sample;
    sample.camera = cam;
    sample.step = step;
    sample.t = t;
    sample.depth_front = render_depth(scene, cam);
    sample.depth_back = render_depth(scene, antipodal_camera(cam));
    sample.image = gaussian_blur(render_edge_image(scene, cam), blur_sigma_for_mode(mode, t, cfg));
    return sample;
}

// ---- guidance sources ----------------------------------------------------

OracleGuidanceSource::OracleGuidanceSource(OracleScene scene, ScheduleConfig schedule,
                                           CameraSamplerConfig cameras, BlurMode mode)
    : scene_(std::move(scene)), schedule_(std::move(schedule)), cameras_(cameras),
      mode_(mode) {}

std::vector<GuidanceSample> OracleGuidanceSource::batch(int step, int t, int batch_size,
                                                        Rng& cam_rng) {
    std::vector<GuidanceSample> out;
    out.reserve(batch_size);
    for (int b = 0; b < batch_size; ++b) {
        const Camera cam = sample_camera(cam_rng, cameras_);
        out.push_back(oracle_render(scene_, cam, step, t, schedule_, mode_));
    }
    return out;
}

PrerenderedGuidanceSource::PrerenderedGuidanceSource(const OracleScene& scene,
                                                     ScheduleConfig schedule,
                                                     std::vector<Camera> cameras,
                                                     BlurMode mode)
    : schedule_(std::move(schedule)), cameras_(std::move(cameras)), mode_(mode) {
    for (const Camera& cam : cameras_) {
        targets_.push_back(render_edge_image(scene, cam));
        fronts_.push_back(render_depth(scene, cam));
        backs_.push_back(render_depth(scene, antipodal_camera(cam)));
    }
}

PrerenderedGuidanceSource::PrerenderedGuidanceSource(const OracleScene& scene,
                                                     ScheduleConfig schedule,
                                                     std::vector<Camera> cameras,
                                                     std::vector<Image> targets,
                                                     BlurMode mode)
    : schedule_(std::move(schedule)), cameras_(std::move(cameras)),
      targets_(std::move(targets)), mode_(mode) {
    if (targets_.size() != cameras_.size())
        throw ConfigError("prerendered guidance needs one target per camera");
    for (const Camera& cam : cameras_) {
        fronts_.push_back(render_depth(scene, cam));
        backs_.push_back(render_depth(scene, antipodal_camera(cam)));
    }
}

std::vector<GuidanceSample> PrerenderedGuidanceSource::batch(int step, int t, int batch_size,
                                                             Rng& cam_rng) {
    if (cameras_.empty()) throw RunError("prerendered guidance has no cameras");
    const double sigma = blur_sigma_for_mode(mode_, t, schedule_);
    std::vector<GuidanceSample> out;
    out.reserve(batch_size);
    for (int b = 0; b < batch_size; ++b) {
        const int c = static_cast<int>(
            cam_rng.uniform_int(0, static_cast<std::uint64_t>(cameras_.size()) - 1));
        GuidanceSample sample;
        sample.camera = cameras_[c];
        sample.step = step;
        sample.t = t;
        sample.image = gaussian_blur(targets_[c], sigma);
        sample.depth_front = fronts_[c];
        sample.depth_back = backs_[c];
        out.push_back(std::move(sample));
    }
    return out;
}

// ---- saved sequences -----------------------------------------------------

namespace {

std::string step_dir_name(int step) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "step_%05d", step);
    return buf;
}

std::string cam_base_name(int cam) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "cam_%02d", cam);
    return buf;
}

}  // namespace

void save_guidance_step(const std::string& dir, int step, int t, double cfg_value,
                        const std::vector<GuidanceSample>& cams) {
    const fs::path step_dir = fs::path(dir) / step_dir_name(step);
    fs::create_directories(step_dir);
    json meta;
    meta["t"] = t;
    meta["cfg_scale"] = cfg_value;
    write_text_file((step_dir / "meta.json").string(), meta.dump(2) + "\n");
    for (std::size_t c = 0; c < cams.size(); ++c) {
        const GuidanceSample& s = cams[c];
        const std::string base = (step_dir / cam_base_name(static_cast<int>(c))).string();
        write_png(s.image, base + ".png");
        write_pfm(s.depth_front.depth, s.depth_front.width, s.depth_front.height,
                  base + ".front.pfm");
        write_pfm(s.depth_back.depth, s.depth_back.width, s.depth_back.height,
                  base + ".back.pfm");
        save_camera(s.camera, base + ".json");
    }
}

std::vector<GuidanceStep> load_guidance(const std::string& dir) {
    if (!fs::is_directory(dir)) throw IngestError("guidance directory not found: " + dir, dir);
    std::vector<GuidanceStep> steps;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (name.rfind("step_", 0) != 0) continue;
        GuidanceStep gs;
        gs.step = std::atoi(name.c_str() + 5);

        const fs::path meta_path = entry.path() / "meta.json";
        if (!fs::exists(meta_path))
            throw IngestError("guidance step missing meta.json", meta_path.string());
        json meta;
        try {
            meta = json::parse(read_text_file(meta_path.string()));
            gs.t = meta.at("t").get<int>();
            gs.cfg = meta.at("cfg_scale").get<double>();
        } catch (const json::exception& e) {
            throw IngestError(std::string("bad meta.json: ") + e.what(), meta_path.string());
        }

        std::vector<std::pair<int, fs::path>> cams;
        for (const auto& f : fs::directory_iterator(entry.path())) {
            const std::string fname = f.path().filename().string();
            if (fname.rfind("cam_", 0) == 0 && f.path().extension() == ".png")
                cams.emplace_back(std::atoi(fname.c_str() + 4), f.path());
        }
        std::sort(cams.begin(), cams.end());

        for (const auto& [cam_id, png_path] : cams) {
            std::string base = png_path.string();
            base.resize(base.size() - 4);  // strip ".png"
            for (const char* suffix : {".front.pfm", ".back.pfm", ".json"}) {
                if (!fs::exists(base + suffix))
                    throw IngestError("guidance camera missing sidecar", base + suffix);
            }
            GuidanceSample s;
            s.step = gs.step;
            s.t = gs.t;
            s.camera = load_camera(base + ".json");
            s.image = take_channels(read_png(png_path.string()), 3);
            s.depth_front.depth = read_pfm(base + ".front.pfm", s.depth_front.width,
                                           s.depth_front.height);
            s.depth_front.camera = s.camera;
            s.depth_back.depth =
                read_pfm(base + ".back.pfm", s.depth_back.width, s.depth_back.height);
            s.depth_back.camera = antipodal_camera(s.camera);
            if (s.image.width != s.camera.width || s.image.height != s.camera.height)
                throw IngestError("guidance image resolution does not match camera",
                                  png_path.string());
            if (s.depth_front.width != s.camera.width ||
                s.depth_front.height != s.camera.height ||
                s.depth_back.width != s.camera.width ||
                s.depth_back.height != s.camera.height)
                throw IngestError("guidance depth resolution does not match camera",
                                  base + ".front.pfm");
            gs.cams.push_back(std::move(s));
        }
        steps.push_back(std::move(gs));
    }
    std::sort(steps.begin(), steps.end(),
              [](const GuidanceStep& a, const GuidanceStep& b) { return a.step < b.step; });
    return steps;
}

DirectoryGuidanceSource::DirectoryGuidanceSource(const std::string& dir)
    : steps_(load_guidance(dir)) {}

int DirectoryGuidanceSource::camera_count() const {
    return steps_.empty() ? 0 : static_cast<int>(steps_.front().cams.size());
}

std::vector<GuidanceSample> DirectoryGuidanceSource::batch(int step, int /*t*/,
                                                           int batch_size, Rng& /*rng*/) {
    for (const GuidanceStep& gs : steps_) {
        if (gs.step != step) continue;
        std::vector<GuidanceSample> out;
        const int n = std::min<int>(batch_size, static_cast<int>(gs.cams.size()));
        out.assign(gs.cams.begin(), gs.cams.begin() + n);
        if (out.empty()) throw RunError("guidance step has no cameras");
        return out;
    }
    throw RunError("guidance exhausted: no data for step " + std::to_string(step));
}

// ---- surface-constrained scenes ------------------------------------------

namespace {

Vec3 sphere_point(const SpherePrimitive& s, Rng& rng) {
    Vec3 dir;
    double n = 0.0;
    do {
        dir = {rng.normal(), rng.normal(), rng.normal()};
        n = dir.norm();
    } while (n < 1e-6);
    return s.center + (s.radius / n) * dir;
}

Vec3 box_point(const BoxPrimitive& b, Rng& rng, int* face_axis = nullptr,
               double* face_sign = nullptr) {
    const double areas[3] = {b.half.y * b.half.z, b.half.x * b.half.z, b.half.x * b.half.y};
    const double total = 2.0 * (areas[0] + areas[1] + areas[2]);
    double pick = rng.uniform(0.0, total);
    int axis = 0;
    double sign = 1.0;
    for (int a = 0; a < 3 && pick >= 0.0; ++a) {
        for (int s = 0; s < 2; ++s) {
            if (pick < areas[a]) {
                axis = a;
                sign = s == 0 ? -1.0 : 1.0;
                pick = -1.0;
                break;
            }
            pick -= areas[a];
        }
    }
    double c[3] = {b.center.x, b.center.y, b.center.z};
    const double h[3] = {b.half.x, b.half.y, b.half.z};
    c[axis] += sign * h[axis];
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    c[u] += rng.uniform(-h[u], h[u]);
    c[v] += rng.uniform(-h[v], h[v]);
    if (face_axis) *face_axis = axis;
    if (face_sign) *face_sign = sign;
    return {c[0], c[1], c[2]};
}

// Cubic approximation of a circular arc: endpoints on the circle, tangent
// handles of length (4/3) tan(theta/4) r.
BezierCurve3D great_arc(const SpherePrimitive& s, const Vec3& e1, const Vec3& e2,
                        double theta) {
    const double h = (4.0 / 3.0) * std::tan(theta / 4.0) * s.radius;
    const Vec3 p0 = s.center + s.radius * e1;
    const Vec3 p3 =
        s.center + s.radius * (std::cos(theta) * e1 + std::sin(theta) * e2);
    const Vec3 t0 = e2;
    const Vec3 t1 = std::cos(theta) * e2 - std::sin(theta) * e1;
    return BezierCurve3D{{p0, p0 + h * t0, p3 - h * t1, p3}};
}

// Orthonormal pair spanning a random great circle through direction a.
void random_tangent_frame(const Vec3& a, Rng& rng, Vec3& e2) {
    Vec3 b;
    double n = 0.0;
    do {
        b = {rng.normal(), rng.normal(), rng.normal()};
        b = b - dot(b, a) * a;
        n = b.norm();
    } while (n < 1e-6);
    e2 = (1.0 / n) * b;
}

BezierCurve3D sphere_curve(const SpherePrimitive& s, Rng& rng, double theta_min,
                           double theta_max, const Vec3* anchor = nullptr) {
    Vec3 e1;
    if (anchor) {
        e1 = normalized(*anchor - s.center);
    } else {
        e1 = normalized(sphere_point(s, rng) - s.center);
    }
    Vec3 e2;
    random_tangent_frame(e1, rng, e2);
    const double theta = rng.uniform(theta_min, theta_max);
    return great_arc(s, e1, e2, theta);
}

BezierCurve3D box_curve(const BoxPrimitive& b, Rng& rng, double min_len_frac,
                        double max_len_frac, const Vec3* anchor = nullptr) {
    int axis;
    double sign;
    Vec3 p0;
    if (anchor) {
        p0 = *anchor;
        // Recover the face from the anchor position.
        const double rel[3] = {p0.x - b.center.x, p0.y - b.center.y, p0.z - b.center.z};
        const double h[3] = {b.half.x, b.half.y, b.half.z};
        axis = 0;
        double best = 0.0;
        for (int a = 0; a < 3; ++a) {
            const double closeness = h[a] > 0.0 ? std::abs(rel[a]) / h[a] : 0.0;
            if (closeness > best) {
                best = closeness;
                axis = a;
            }
        }
        sign = rel[axis] >= 0.0 ? 1.0 : -1.0;
    } else {
        p0 = box_point(b, rng, &axis, &sign);
    }
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    const double h[3] = {b.half.x, b.half.y, b.half.z};
    double start[3] = {p0.x, p0.y, p0.z};
    const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double len =
        rng.uniform(min_len_frac, max_len_frac) * std::min(h[u], h[v]) * 2.0;
    double dirv[3] = {0.0, 0.0, 0.0};
    dirv[u] = std::cos(ang);
    dirv[v] = std::sin(ang);
    double end[3];
    const double centers[3] = {b.center.x, b.center.y, b.center.z};
    for (int a = 0; a < 3; ++a) end[a] = start[a] + len * dirv[a];
    end[u] = std::clamp(end[u], centers[u] - h[u], centers[u] + h[u]);
    end[v] = std::clamp(end[v], centers[v] - h[v], centers[v] + h[v]);
    const Vec3 q0{start[0], start[1], start[2]};
    const Vec3 q3{end[0], end[1], end[2]};
    return BezierCurve3D{{q0, q0 + (1.0 / 3.0) * (q3 - q0), q0 + (2.0 / 3.0) * (q3 - q0), q3}};
}

BezierCurve3D curve_on_primitive(const Primitive& prim, Rng& rng, const Vec3* anchor,
                                 bool short_curve) {
    if (const auto* s = std::get_if<SpherePrimitive>(&prim)) {
        return short_curve ? sphere_curve(*s, rng, 0.3, 0.45, anchor)
                           : sphere_curve(*s, rng, 0.4, 1.2, anchor);
    }
    const auto& b = std::get<BoxPrimitive>(prim);
    return short_curve ? box_curve(b, rng, 0.15, 0.3, anchor)
                       : box_curve(b, rng, 0.3, 0.9, anchor);
}

Path3D curve_to_path(const BezierCurve3D& c, double stroke_width) {
    return Path3D::sketch({c.points[0], c.points[1], c.points[2], c.points[3]},
                          {0.0, 0.0, 0.0, 1.0}, stroke_width);
}

}  // namespace

Vec3 sample_surface_point(const OracleScene& scene, Rng& rng) {
    if (scene.primitives.empty()) throw ConfigError("oracle scene has no primitives");
    const auto idx = rng.uniform_int(0, scene.primitives.size() - 1);
    return std::visit(
        [&rng](const auto& prim) -> Vec3 {
            using T = std::decay_t<decltype(prim)>;
            if constexpr (std::is_same_v<T, SpherePrimitive>)
                return sphere_point(prim, rng);
            else
                return box_point(prim, rng);
        },
        scene.primitives[idx]);
}

Scene3DVG scene_on_primitives(const OracleScene& scene, int n_paths, Rng& rng,
                              double stroke_width) {
    if (scene.primitives.empty()) throw ConfigError("oracle scene has no primitives");
    Scene3DVG out;
    for (int p = 0; p < n_paths; ++p) {
        const auto idx = rng.uniform_int(0, scene.primitives.size() - 1);
        out.paths.push_back(curve_to_path(
            curve_on_primitive(scene.primitives[idx], rng, nullptr, false), stroke_width));
    }
    return out;
}

Scene3DVG farthest_point_init(const OracleScene& scene, int n_paths, Rng& rng,
                              double stroke_width) {
    if (scene.primitives.empty()) throw ConfigError("oracle scene has no primitives");
    constexpr int kCandidates = 2048;
    std::vector<Vec3> candidates;
    std::vector<int> owner;
    candidates.reserve(kCandidates);
    owner.reserve(kCandidates);
    for (int i = 0; i < kCandidates; ++i) {
        const auto idx = rng.uniform_int(0, scene.primitives.size() - 1);
        owner.push_back(static_cast<int>(idx));
        candidates.push_back(std::visit(
            [&rng](const auto& prim) -> Vec3 {
                using T = std::decay_t<decltype(prim)>;
                if constexpr (std::is_same_v<T, SpherePrimitive>)
                    return sphere_point(prim, rng);
                else
                    return box_point(prim, rng);
            },
            scene.primitives[idx]));
    }

    std::vector<int> chosen;
    std::vector<double> dist2(kCandidates, std::numeric_limits<double>::max());
    int current = 0;  // deterministic start
    chosen.push_back(current);
    for (int k = 1; k < n_paths; ++k) {
        double best = -1.0;
        int best_idx = 0;
        for (int i = 0; i < kCandidates; ++i) {
            const Vec3 d = candidates[i] - candidates[current];
            dist2[i] = std::min(dist2[i], dot(d, d));
            if (dist2[i] > best) {
                best = dist2[i];
                best_idx = i;
            }
        }
        current = best_idx;
        chosen.push_back(current);
    }

    Scene3DVG out;
    for (int idx : chosen) {
        out.paths.push_back(curve_to_path(
            curve_on_primitive(scene.primitives[owner[idx]], rng, &candidates[idx], true),
            stroke_width));
    }
    return out;
}

Scene3DVG random_ball_init(int n_paths, Rng& rng, double radius, double stroke_width) {
    Scene3DVG out;
    for (int p = 0; p < n_paths; ++p) {
        // A loose anchor plus local jitter keeps initial curves short instead
        // of spanning the whole ball.
        Vec3 anchor;
        do {
            anchor = {rng.uniform(-radius, radius), rng.uniform(-radius, radius),
                      rng.uniform(-radius, radius)};
        } while (anchor.norm() > 0.8 * radius);
        std::array<Vec3, 4> pts;
        pts[0] = anchor;
        for (int i = 1; i < 4; ++i) {
            pts[i] = pts[i - 1] + Vec3{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                       rng.uniform(-1.0, 1.0)} *
                                     (0.25 * radius);
        }
        out.paths.push_back(Path3D::sketch(pts, {0.0, 0.0, 0.0, 1.0}, stroke_width));
    }
    return out;
}

}  // namespace c3vg
