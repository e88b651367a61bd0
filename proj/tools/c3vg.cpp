// c3vg: fitting, rendering, and inspection for 3D vector-graphics scenes.
//
// Exit codes: 0 success, 1 validation/usage error, 2 runtime error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curve3dvg/camera.hpp"
#include "curve3dvg/errors.hpp"
#include "curve3dvg/guidance.hpp"
#include "curve3dvg/io.hpp"
#include "curve3dvg/optimize.hpp"
#include "curve3dvg/raster.hpp"
#include "curve3dvg/rng.hpp"
#include "curve3dvg/scene.hpp"
#include "curve3dvg/svg.hpp"
#include "curve3dvg/version.hpp"
#include "curve3dvg/visibility.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace c3vg;

namespace {

// ---- config file ---------------------------------------------------------

struct AppConfig {
    ScheduleConfig schedule;
    FitConfig fit;
    CameraSamplerConfig sampler;
};

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

AppConfig load_app_config(const std::string& path) {
    AppConfig cfg;
    if (path.empty()) return cfg;
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (j.contains("schedule")) {
        const json& s = j["schedule"];
        maybe(s, "lambda0", cfg.schedule.lambda0);
        maybe(s, "lambda1", cfg.schedule.lambda1);
        maybe(s, "t_lo_frac", cfg.schedule.t_lo_frac);
        maybe(s, "t_hi_frac", cfg.schedule.t_hi_frac);
        maybe(s, "anneal_window_frac", cfg.schedule.anneal_window_frac);
        int n = cfg.schedule.N;
        maybe(s, "N", n);
        if (n != cfg.schedule.N) {
            cfg.schedule.N = n;
            cfg.schedule.alpha_bar = scaled_linear_alpha_bar(n);
        }
        maybe(s, "total_steps", cfg.schedule.total_steps);
    }
    if (j.contains("fit")) {
        const json& f = j["fit"];
        maybe(f, "total_steps", cfg.fit.total_steps);
        maybe(f, "batch_cameras", cfg.fit.batch_cameras);
        maybe(f, "seed", cfg.fit.seed);
        maybe(f, "n_paths", cfg.fit.n_paths);
        maybe(f, "train_colors", cfg.fit.train_colors);
        maybe(f, "train_widths", cfg.fit.train_widths);
        maybe(f, "train_visibility", cfg.fit.train_visibility);
        maybe(f, "vote_every", cfg.fit.vote_every);
        maybe(f, "log_every", cfg.fit.log_every);
        maybe(f, "checkpoint_every", cfg.fit.checkpoint_every);
        if (f.contains("init")) {
            const std::string init = f.at("init").get<std::string>();
            if (init == "farthest")
                cfg.fit.init = InitMode::FarthestPoint;
            else if (init == "random")
                cfg.fit.init = InitMode::Random;
            else
                throw ConfigError("fit.init must be \"farthest\" or \"random\"");
        }
    }
    if (j.contains("visibility")) {
        const json& v = j["visibility"];
        maybe(v, "tau_alpha", cfg.fit.visibility.tau_alpha);
        maybe(v, "alpha_depth", cfg.fit.visibility.alpha_depth);
        maybe(v, "k_points", cfg.fit.visibility.k_points);
        maybe(v, "vote_fraction", cfg.fit.visibility.vote_fraction);
        maybe(v, "opacity_high", cfg.fit.visibility.opacity_high);
        maybe(v, "opacity_low", cfg.fit.visibility.opacity_low);
    }
    if (j.contains("loss")) {
        const json& l = j["loss"];
        maybe(l, "structural_distance", cfg.fit.loss.structural_distance);
        maybe(l, "semantic_distance", cfg.fit.loss.semantic_distance);
        maybe(l, "weight_structural", cfg.fit.loss.weight_structural);
        maybe(l, "weight_semantic", cfg.fit.loss.weight_semantic);
    }
    if (j.contains("adam")) {
        const json& a = j["adam"];
        maybe(a, "lr_points", cfg.fit.adam.lr_points);
        maybe(a, "lr_color", cfg.fit.adam.lr_color);
        maybe(a, "lr_width", cfg.fit.adam.lr_width);
        maybe(a, "lr_net", cfg.fit.adam.lr_net);
        maybe(a, "beta1", cfg.fit.adam.beta1);
        maybe(a, "beta2", cfg.fit.adam.beta2);
        maybe(a, "eps", cfg.fit.adam.eps);
    }
    if (j.contains("camera_sampler")) {
        const json& c = j["camera_sampler"];
        maybe(c, "radius_min", cfg.sampler.radius_min);
        maybe(c, "radius_max", cfg.sampler.radius_max);
        maybe(c, "azimuth_min_deg", cfg.sampler.azimuth_min_deg);
        maybe(c, "azimuth_max_deg", cfg.sampler.azimuth_max_deg);
        maybe(c, "elevation_min_deg", cfg.sampler.elevation_min_deg);
        maybe(c, "elevation_max_deg", cfg.sampler.elevation_max_deg);
        maybe(c, "fov_min_deg", cfg.sampler.fov_min_deg);
        maybe(c, "fov_max_deg", cfg.sampler.fov_max_deg);
        maybe(c, "image_width", cfg.sampler.image_width);
        maybe(c, "image_height", cfg.sampler.image_height);
    }
    return cfg;
}

json config_snapshot(const AppConfig& cfg) {
    json j;
    j["schedule"] = {{"lambda0", cfg.schedule.lambda0},
                     {"lambda1", cfg.schedule.lambda1},
                     {"t_lo_frac", cfg.schedule.t_lo_frac},
                     {"t_hi_frac", cfg.schedule.t_hi_frac},
                     {"anneal_window_frac", cfg.schedule.anneal_window_frac},
                     {"N", cfg.schedule.N},
                     {"total_steps", cfg.schedule.total_steps}};
    j["fit"] = {{"total_steps", cfg.fit.total_steps},
                {"batch_cameras", cfg.fit.batch_cameras},
                {"seed", cfg.fit.seed},
                {"init", cfg.fit.init == InitMode::FarthestPoint ? "farthest" : "random"},
                {"n_paths", cfg.fit.n_paths},
                {"train_colors", cfg.fit.train_colors},
                {"train_widths", cfg.fit.train_widths},
                {"train_visibility", cfg.fit.train_visibility},
                {"vote_every", cfg.fit.vote_every},
                {"log_every", cfg.fit.log_every},
                {"checkpoint_every", cfg.fit.checkpoint_every}};
    j["visibility"] = {{"tau_alpha", cfg.fit.visibility.tau_alpha},
                       {"alpha_depth", cfg.fit.visibility.alpha_depth},
                       {"k_points", cfg.fit.visibility.k_points},
                       {"vote_fraction", cfg.fit.visibility.vote_fraction},
                       {"opacity_high", cfg.fit.visibility.opacity_high},
                       {"opacity_low", cfg.fit.visibility.opacity_low}};
    j["loss"] = {{"structural_distance", cfg.fit.loss.structural_distance},
                 {"semantic_distance", cfg.fit.loss.semantic_distance},
                 {"weight_structural", cfg.fit.loss.weight_structural},
                 {"weight_semantic", cfg.fit.loss.weight_semantic}};
    j["adam"] = {{"lr_points", cfg.fit.adam.lr_points},
                 {"lr_color", cfg.fit.adam.lr_color},
                 {"lr_width", cfg.fit.adam.lr_width},
                 {"lr_net", cfg.fit.adam.lr_net},
                 {"beta1", cfg.fit.adam.beta1},
                 {"beta2", cfg.fit.adam.beta2},
                 {"eps", cfg.fit.adam.eps}};
    j["camera_sampler"] = {{"radius_min", cfg.sampler.radius_min},
                           {"radius_max", cfg.sampler.radius_max},
                           {"azimuth_min_deg", cfg.sampler.azimuth_min_deg},
                           {"azimuth_max_deg", cfg.sampler.azimuth_max_deg},
                           {"elevation_min_deg", cfg.sampler.elevation_min_deg},
                           {"elevation_max_deg", cfg.sampler.elevation_max_deg},
                           {"fov_min_deg", cfg.sampler.fov_min_deg},
                           {"fov_max_deg", cfg.sampler.fov_max_deg},
                           {"image_width", cfg.sampler.image_width},
                           {"image_height", cfg.sampler.image_height}};
    return j;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& config, std::uint64_t seed, const json& inputs,
                    const json& outputs, double wall_clock_sec) {
    json m;
    m["command"] = command;
    m["config"] = config;
    m["seed"] = seed;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["engine_version"] = kEngineVersion;
    m["wall_clock_sec"] = wall_clock_sec;
    write_text_file((fs::path(out_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

OracleScene oracle_by_name(const std::string& name) {
    if (name == "sphere") return OracleScene::sphere();
    if (name == "sphere_box") return OracleScene::sphere_box();
    throw ConfigError("unknown oracle \"" + name + "\" (use sphere or sphere_box)");
}

BlurMode blur_by_name(const std::string& name) {
    if (name == "c2f") return BlurMode::C2F;
    if (name == "fine") return BlurMode::ConstantFine;
    if (name == "coarse") return BlurMode::ConstantCoarse;
    throw ConfigError("unknown blur mode \"" + name + "\" (use c2f, fine, or coarse)");
}

// "ring:K" or a list of camera JSON files.
std::vector<Camera> resolve_views(const std::string& views_spec,
                                  const std::vector<std::string>& camera_files,
                                  const CameraSamplerConfig& sampler) {
    std::vector<Camera> cams;
    if (!views_spec.empty()) {
        if (views_spec.rfind("ring:", 0) != 0)
            throw ConfigError("--views expects ring:K");
        const int k = std::atoi(views_spec.c_str() + 5);
        if (k < 1) throw ConfigError("--views ring:K needs K >= 1");
        cams = ring_cameras(k, sampler);
    }
    for (const std::string& f : camera_files) cams.push_back(load_camera(f));
    if (cams.empty()) cams = ring_cameras(15, sampler);
    return cams;
}

std::string two_digits(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d", i);
    return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Per-path inference visibility: importance threshold plus optional oracle
// depth votes.
struct InferenceView {
    std::vector<OpacityState> ops;
    std::vector<double> importance;  // per flat curve
};

InferenceView inference_view(const Scene3DVG& scene, const ImportanceNet& net,
                             const Camera& cam, const VisibilityConfig& vis,
                             const OracleScene* oracle) {
    InferenceView out;
    const ImportanceFilterResult filter = curve_importance_filter(net, scene, cam, vis);
    out.importance = filter.importance;
    std::vector<bool> votes;
    if (oracle) {
        const DepthMap front = render_depth(*oracle, cam);
        const DepthMap back = render_depth(*oracle, antipodal_camera(cam));
        votes.resize(scene.curve_count());
        for (std::size_t ci = 0; ci < scene.curve_count(); ++ci)
            votes[ci] = antipodal_vote(scene.curve(ci), cam, front, back, vis).visible;
    }
    out.ops = resolve_opacities(scene, filter.importance, filter.non_important, votes,
                                VisibilityMode::Inference, vis);
    return out;
}

// ---- subcommands ---------------------------------------------------------

struct FitArgs {
    std::string oracle = "sphere_box";
    std::string guidance_dir;
    std::string config_path;
    std::string out_dir;
    std::string init = "";
    std::string blur = "c2f";
    int paths = -1;
    int steps = -1;
    int batch = -1;
    int size = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool no_visibility = false;
    bool train_widths = false;
};

int run_fit(const FitArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    AppConfig cfg = load_app_config(args.config_path);
    if (args.steps > 0) cfg.fit.total_steps = args.steps;
    if (args.batch > 0) cfg.fit.batch_cameras = args.batch;
    if (args.paths > 0) cfg.fit.n_paths = args.paths;
    if (args.seed_set) cfg.fit.seed = args.seed;
    if (args.size > 0) {
        cfg.sampler.image_width = args.size;
        cfg.sampler.image_height = args.size;
    }
    if (args.no_visibility) cfg.fit.train_visibility = false;
    if (args.train_widths) cfg.fit.train_widths = true;
    cfg.schedule.total_steps = cfg.fit.total_steps;

    const bool use_dir = !args.guidance_dir.empty();
    if (!args.init.empty()) {
        if (args.init == "farthest")
            cfg.fit.init = InitMode::FarthestPoint;
        else if (args.init == "random")
            cfg.fit.init = InitMode::Random;
        else
            throw ConfigError("--init must be farthest or random");
    } else if (use_dir) {
        cfg.fit.init = InitMode::Random;  // no oracle surfaces to sample
    }
    if (use_dir && cfg.fit.init == InitMode::FarthestPoint)
        throw ConfigError("farthest-point init needs an oracle; use --init random");

    std::unique_ptr<GuidanceSource> source;
    OracleScene oracle;
    if (use_dir) {
        source = std::make_unique<DirectoryGuidanceSource>(args.guidance_dir);
    } else {
        oracle = oracle_by_name(args.oracle);
        source = std::make_unique<OracleGuidanceSource>(oracle, cfg.schedule, cfg.sampler,
                                                        blur_by_name(args.blur));
    }

    Rng init_rng(derive_seed(cfg.fit.seed, "init"));
    Scene3DVG init_scene = cfg.fit.init == InitMode::FarthestPoint
                               ? farthest_point_init(oracle, cfg.fit.n_paths, init_rng)
                               : random_ball_init(cfg.fit.n_paths, init_rng);

    fs::create_directories(args.out_dir);
    CheckpointFn checkpoint;
    if (cfg.fit.checkpoint_every > 0) {
        checkpoint = [&](int step, const Scene3DVG& scene, const ImportanceNet& net) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "step_%05d", step);
            const fs::path dir = fs::path(args.out_dir) / "checkpoints" / buf;
            fs::create_directories(dir);
            save_scene(scene, (dir / "scene.json").string());
            write_tensors(net.to_tensors(), (dir / "net.bin").string());
        };
    }

    const FitResult result = fit(init_scene, *source, cfg.schedule, cfg.fit, checkpoint);

    save_scene(result.scene, (fs::path(args.out_dir) / "scene.json").string());
    write_tensors(result.net.to_tensors(), (fs::path(args.out_dir) / "net.bin").string());
    write_text_file((fs::path(args.out_dir) / "log.jsonl").string(),
                    log_to_jsonl(result.log));

    json inputs;
    inputs["guidance"] = use_dir ? json(args.guidance_dir) : json(args.oracle);
    inputs["blur"] = args.blur;
    json outputs = json::array({"scene.json", "net.bin", "log.jsonl"});
    write_manifest(args.out_dir, "fit", config_snapshot(cfg), cfg.fit.seed, inputs,
                   outputs, seconds_since(start));
    std::cout << "fit: wrote " << args.out_dir << " (final loss "
              << (result.log.empty() ? 0.0 : result.log.back().loss_total) << ")\n";
    return 0;
}

struct RenderArgs {
    std::string scene_path;
    std::string net_path;
    std::string views_spec;
    std::vector<std::string> camera_files;
    std::string config_path;
    std::string out_dir;
    bool svg = false;
    bool png = false;
    bool show_invisible = true;
    std::string oracle;  // optional depth votes
};

int run_render(const RenderArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    AppConfig cfg = load_app_config(args.config_path);
    const Scene3DVG scene = load_scene(args.scene_path);
    std::unique_ptr<ImportanceNet> net;
    if (!args.net_path.empty())
        net = std::make_unique<ImportanceNet>(
            ImportanceNet::from_tensors(read_tensors(args.net_path)));
    OracleScene oracle;
    const bool has_oracle = !args.oracle.empty();
    if (has_oracle) oracle = oracle_by_name(args.oracle);

    const std::vector<Camera> cams =
        resolve_views(args.views_spec, args.camera_files, cfg.sampler);
    const bool want_svg = args.svg || !args.png;
    const bool want_png = args.png || !args.svg;

    fs::create_directories(args.out_dir);
    json outputs = json::array();
    for (std::size_t i = 0; i < cams.size(); ++i) {
        const Camera& cam = cams[i];
        std::vector<double> op_values(scene.paths.size(), 1.0);
        std::vector<bool> path_visible(scene.paths.size(), true);
        if (net) {
            const InferenceView iv = inference_view(scene, *net, cam, cfg.fit.visibility,
                                                    has_oracle ? &oracle : nullptr);
            for (std::size_t p = 0; p < scene.paths.size(); ++p) {
                path_visible[p] = iv.ops[p].mode != OpacityState::Mode::FixedLow;
                op_values[p] = iv.ops[p].value;
                if (!args.show_invisible && !path_visible[p]) op_values[p] = 0.0;
            }
        }
        std::vector<int> skipped;
        Scene2D s2 = project_scene(scene, cam, op_values, &skipped);
        const Canvas canvas{cam.width, cam.height, {1.0, 1.0, 1.0}};
        const std::string base =
            (fs::path(args.out_dir) / ("view_" + two_digits(static_cast<int>(i)))).string();
        if (want_png) {
            Rasterizer raster(s2, canvas);
            write_png(raster.forward(), base + ".png");
            outputs.push_back(fs::path(base + ".png").filename().string());
        }
        if (want_svg) {
            // Element order matches path order minus skipped paths.
            std::vector<bool> visible;
            for (const Element2D& e : s2.elements) {
                const int pi = std::visit([](const auto& el) { return el.path_index; }, e);
                visible.push_back(path_visible[pi]);
            }
            Scene2D svg_scene = s2;
            if (!args.show_invisible) {
                Scene2D kept;
                std::vector<bool> kept_visible;
                for (std::size_t e = 0; e < s2.elements.size(); ++e) {
                    if (!visible[e]) continue;
                    kept.elements.push_back(s2.elements[e]);
                    kept_visible.push_back(true);
                }
                svg_scene = std::move(kept);
                visible = std::move(kept_visible);
            }
            write_text_file(base + ".svg", export_svg(svg_scene, canvas, visible));
            outputs.push_back(fs::path(base + ".svg").filename().string());
        }
        save_camera(cam, base + ".json");
        outputs.push_back(fs::path(base + ".json").filename().string());
    }

    json inputs;
    inputs["scene"] = args.scene_path;
    if (!args.net_path.empty()) inputs["net"] = args.net_path;
    if (has_oracle) inputs["oracle"] = args.oracle;
    write_manifest(args.out_dir, "render", config_snapshot(cfg), 0, inputs, outputs,
                   seconds_since(start));
    std::cout << "render: wrote " << outputs.size() << " files to " << args.out_dir
              << "\n";
    return 0;
}

struct MetricsArgs {
    std::string scene_path;
    std::string net_path;
    std::string views_spec = "ring:15";
    std::string distance = "pyramid-l2";
    std::string config_path;
    std::string out_dir;
    std::string oracle;
};

int run_metrics(const MetricsArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    AppConfig cfg = load_app_config(args.config_path);
    const Scene3DVG scene = load_scene(args.scene_path);
    const ImportanceNet net = ImportanceNet::from_tensors(read_tensors(args.net_path));
    const std::vector<Camera> cams = resolve_views(args.views_spec, {}, cfg.sampler);

    DepthProvider depths;
    OracleScene oracle;
    if (!args.oracle.empty()) {
        oracle = oracle_by_name(args.oracle);
        depths = [&oracle](const Camera& cam) {
            return std::make_pair(render_depth(oracle, cam),
                                  render_depth(oracle, antipodal_camera(cam)));
        };
    }
    const double consistency = adjacent_view_consistency(
        scene, net, cams, args.distance, cfg.fit.visibility, depths);

    json result;
    result["adjacent_view_consistency"] = consistency;
    result["views"] = cams.size();
    result["distance"] = args.distance;
    std::cout << result.dump(2) << "\n";
    if (!args.out_dir.empty()) {
        fs::create_directories(args.out_dir);
        write_text_file((fs::path(args.out_dir) / "metrics.json").string(),
                        result.dump(2) + "\n");
        json inputs{{"scene", args.scene_path}, {"net", args.net_path}};
        write_manifest(args.out_dir, "metrics", config_snapshot(cfg), 0, inputs,
                       json::array({"metrics.json"}), seconds_since(start));
    }
    return 0;
}

struct ScheduleArgs {
    std::string config_path;
    std::string out_dir;
    int steps = -1;
    std::uint64_t seed = 0;
    bool dump = false;
};

int run_schedule(const ScheduleArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    AppConfig cfg = load_app_config(args.config_path);
    if (args.steps > 0) cfg.schedule.total_steps = args.steps;
    validate_schedule(cfg.schedule);
    if (!args.dump) {
        std::cout << "schedule: N=" << cfg.schedule.N << " lambda=["
                  << cfg.schedule.lambda0 << ", " << cfg.schedule.lambda1
                  << "] t_range=[" << cfg.schedule.t_lo_frac << ", "
                  << cfg.schedule.t_hi_frac << "] total_steps="
                  << cfg.schedule.total_steps << "\n";
        return 0;
    }
    Rng t_rng(derive_seed(args.seed, "t"));
    std::string csv = "step,t,cfg_scale\n";
    for (int step = 0; step < cfg.schedule.total_steps; ++step) {
        const int t = anneal_timestep(step, cfg.schedule, t_rng);
        char line[64];
        std::snprintf(line, sizeof(line), "%d,%d,%.10g\n", step, t,
                      cfg_scale(t, cfg.schedule));
        csv += line;
    }
    if (args.out_dir.empty()) {
        std::cout << csv;
    } else {
        fs::create_directories(args.out_dir);
        write_text_file((fs::path(args.out_dir) / "schedule.csv").string(), csv);
        write_manifest(args.out_dir, "schedule", config_snapshot(cfg), args.seed,
                       json::object(), json::array({"schedule.csv"}),
                       seconds_since(start));
    }
    return 0;
}

struct VizArgs {
    std::string scene_path;
    std::string net_path;
    std::string camera_file;
    std::string config_path;
    std::string out_dir;
    std::string oracle;
};

// Blue (importance 0) to red (importance 1) with green mid-tones.
std::array<double, 4> heat_color(double v) {
    const double r = std::clamp(2.0 * v - 0.5, 0.0, 1.0);
    const double g = std::clamp(1.5 - std::abs(2.0 * v - 1.0) * 1.5, 0.0, 1.0);
    const double b = std::clamp(1.0 - 2.0 * v, 0.0, 1.0);
    return {r, g, b, 1.0};
}

int run_viz(const VizArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    AppConfig cfg = load_app_config(args.config_path);
    const Scene3DVG scene = load_scene(args.scene_path);
    const ImportanceNet net = ImportanceNet::from_tensors(read_tensors(args.net_path));
    const Camera cam = args.camera_file.empty() ? ring_cameras(1, cfg.sampler)[0]
                                                : load_camera(args.camera_file);
    OracleScene oracle;
    const bool has_oracle = !args.oracle.empty();
    if (has_oracle) oracle = oracle_by_name(args.oracle);

    const InferenceView iv =
        inference_view(scene, net, cam, cfg.fit.visibility, has_oracle ? &oracle : nullptr);

    // Mean importance per path, painted as a heat map at full opacity.
    Scene3DVG heat_scene = scene;
    std::size_t flat = 0;
    for (std::size_t p = 0; p < scene.paths.size(); ++p) {
        double mean = 0.0;
        const int nc = scene.paths[p].curve_count();
        for (int c = 0; c < nc; ++c) mean += iv.importance[flat++];
        mean /= nc;
        heat_scene.paths[p].color = heat_color(mean);
    }
    fs::create_directories(args.out_dir);
    const Canvas canvas{cam.width, cam.height, {1.0, 1.0, 1.0}};
    {
        std::vector<int> skipped;
        Scene2D s2 = project_scene(heat_scene, cam, {}, &skipped);
        Rasterizer raster(std::move(s2), canvas);
        write_png(raster.forward(), (fs::path(args.out_dir) / "importance.png").string());
    }
    // Vote overlay: visible paths green, filtered-out paths red.
    Scene3DVG vote_scene = scene;
    for (std::size_t p = 0; p < scene.paths.size(); ++p) {
        const bool visible = iv.ops[p].mode != OpacityState::Mode::FixedLow;
        vote_scene.paths[p].color =
            visible ? std::array<double, 4>{0.1, 0.7, 0.2, 1.0}
                    : std::array<double, 4>{0.85, 0.15, 0.1, 1.0};
    }
    {
        std::vector<int> skipped;
        Scene2D s2 = project_scene(vote_scene, cam, {}, &skipped);
        Rasterizer raster(std::move(s2), canvas);
        write_png(raster.forward(), (fs::path(args.out_dir) / "votes.png").string());
    }
    save_camera(cam, (fs::path(args.out_dir) / "camera.json").string());

    json inputs{{"scene", args.scene_path}, {"net", args.net_path}};
    if (has_oracle) inputs["oracle"] = args.oracle;
    write_manifest(args.out_dir, "viz", config_snapshot(cfg), 0, inputs,
                   json::array({"importance.png", "votes.png", "camera.json"}),
                   seconds_since(start));
    std::cout << "viz: wrote importance.png and votes.png to " << args.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D vector-graphics engine: fit, render, and inspect curve scenes"};
    app.require_subcommand(1);

    FitArgs fit_args;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a scene against guidance");
    fit_cmd->add_option("--oracle", fit_args.oracle, "Analytic oracle: sphere | sphere_box");
    fit_cmd->add_option("--guidance", fit_args.guidance_dir,
                        "Directory of saved guidance steps");
    fit_cmd->add_option("--config", fit_args.config_path, "JSON config file");
    fit_cmd->add_option("--paths", fit_args.paths, "Number of paths");
    fit_cmd->add_option("--steps", fit_args.steps, "Optimization steps");
    fit_cmd->add_option("--batch", fit_args.batch, "Cameras per step");
    fit_cmd->add_option("--size", fit_args.size, "Square canvas resolution");
    fit_cmd->add_option("--init", fit_args.init, "Init: farthest | random");
    fit_cmd->add_option("--blur", fit_args.blur, "Guidance blur: c2f | fine | coarse");
    fit_cmd
        ->add_option_function<std::uint64_t>(
            "--seed",
            [&fit_args](const std::uint64_t& s) {
                fit_args.seed = s;
                fit_args.seed_set = true;
            },
            "Random seed")
        ->expected(1);
    fit_cmd->add_flag("--no-visibility", fit_args.no_visibility,
                      "Ablation: keep every path at high opacity");
    fit_cmd->add_flag("--train-widths", fit_args.train_widths, "Optimize stroke widths");
    fit_cmd->add_option("--out", fit_args.out_dir, "Output directory")->required();

    RenderArgs render_args;
    CLI::App* render_cmd = app.add_subcommand("render", "Render a scene to PNG/SVG");
    render_cmd->add_option("--scene", render_args.scene_path, "Scene JSON")->required();
    render_cmd->add_option("--net", render_args.net_path, "Importance net blob");
    render_cmd->add_option("--views", render_args.views_spec, "ring:K");
    render_cmd->add_option("--camera", render_args.camera_files,
                           "Camera JSON file (repeatable)");
    render_cmd->add_option("--config", render_args.config_path, "JSON config file");
    render_cmd->add_option("--oracle", render_args.oracle,
                           "Oracle for depth votes: sphere | sphere_box");
    render_cmd->add_flag("--svg", render_args.svg, "Write SVG files");
    render_cmd->add_flag("--png", render_args.png, "Write PNG files");
    render_cmd->add_flag("--show-invisible,!--hide-invisible", render_args.show_invisible,
                         "Keep invisible curves at low opacity (default on)");
    render_cmd->add_option("--out", render_args.out_dir, "Output directory")->required();

    MetricsArgs metrics_args;
    CLI::App* metrics_cmd =
        app.add_subcommand("metrics", "Adjacent-view consistency over a ring");
    metrics_cmd->add_option("--scene", metrics_args.scene_path, "Scene JSON")->required();
    metrics_cmd->add_option("--net", metrics_args.net_path, "Importance net blob")
        ->required();
    metrics_cmd->add_option("--views", metrics_args.views_spec, "ring:K (default ring:15)");
    metrics_cmd->add_option("--distance", metrics_args.distance,
                            "pyramid-l2 | l2 | cosine");
    metrics_cmd->add_option("--config", metrics_args.config_path, "JSON config file");
    metrics_cmd->add_option("--oracle", metrics_args.oracle,
                            "Oracle for depth votes: sphere | sphere_box");
    metrics_cmd->add_option("--out", metrics_args.out_dir, "Output directory (optional)");

    ScheduleArgs schedule_args;
    CLI::App* schedule_cmd = app.add_subcommand("schedule", "Inspect the guidance schedule");
    schedule_cmd->add_option("--config", schedule_args.config_path, "JSON config file");
    schedule_cmd->add_option("--steps", schedule_args.steps, "Override total steps");
    schedule_cmd->add_option("--seed", schedule_args.seed, "Seed for the timestep draws");
    schedule_cmd->add_flag("--dump", schedule_args.dump, "Emit CSV of step,t,cfg_scale");
    schedule_cmd->add_option("--out", schedule_args.out_dir, "Output directory (optional)");

    VizArgs viz_args;
    CLI::App* viz_cmd =
        app.add_subcommand("viz", "Importance heat map and visibility-vote overlay");
    viz_cmd->add_option("--scene", viz_args.scene_path, "Scene JSON")->required();
    viz_cmd->add_option("--net", viz_args.net_path, "Importance net blob")->required();
    viz_cmd->add_option("--camera", viz_args.camera_file, "Camera JSON");
    viz_cmd->add_option("--config", viz_args.config_path, "JSON config file");
    viz_cmd->add_option("--oracle", viz_args.oracle,
                        "Oracle for depth votes: sphere | sphere_box");
    viz_cmd->add_option("--out", viz_args.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
        if (fit_cmd->parsed()) return run_fit(fit_args);
        if (render_cmd->parsed()) return run_render(render_args);
        if (metrics_cmd->parsed()) return run_metrics(metrics_args);
        if (schedule_cmd->parsed()) return run_schedule(schedule_args);
        if (viz_cmd->parsed()) return run_viz(viz_args);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const IngestError& e) {
        std::cerr << "ingest error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
