// End-to-end checks of the command-line tool. Every test shells out to the
// built binary (path injected via the CLI_BIN compile definition), captures
// stdout+stderr, decodes the exit status, and inspects the artifacts with the
// library's own readers.

#include "doctest.h"
#include "support/test_support.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#if !defined(_WIN32)
#include <sys/wait.h>
#endif

#include "curve3dvg/errors.hpp"
#include "curve3dvg/io.hpp"
#include "curve3dvg/visibility.hpp"
#include "nlohmann/json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace c3vg;

namespace {

// Unique per-test working directory under the system temp root, removed on
// scope exit so repeated ctest runs start clean.
struct Scratch {
    fs::path root;

    explicit Scratch(const std::string& tag) {
        root = fs::temp_directory_path() / ("c3vg_cli_" + tag);
        std::error_code ec;
        fs::remove_all(root, ec);
        fs::create_directories(root);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(root, ec);
    }
    std::string path(const std::string& rel) const { return (root / rel).string(); }
};

struct CmdResult {
    int code = -1;
    std::string output;  // stdout and stderr combined
};

int decode_exit(int raw) {
#if defined(_WIN32)
    return raw;
#else
    if (raw == -1) return -1;
    if (WIFEXITED(raw)) return WEXITSTATUS(raw);
    return 128;  // killed by signal; no test expects this
#endif
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

CmdResult run_cli(const Scratch& scratch, const std::string& args) {
    static int capture_id = 0;
    const fs::path cap = scratch.root / ("capture_" + std::to_string(capture_id++) + ".txt");
    const std::string cmd =
        std::string(quoted(CLI_BIN)) + " " + args + " > " + quoted(cap.string()) + " 2>&1";
    CmdResult r;
    r.code = decode_exit(std::system(cmd.c_str()));
    if (fs::exists(cap)) r.output = slurp(cap);
    return r;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

// Deterministic scene + net fixture for render/metrics/viz, written with the
// library serializers so only the subcommand under test goes through the CLI.
struct SavedModel {
    std::string scene_path;
    std::string net_path;

    SavedModel(const Scratch& scratch, int n_paths, std::uint64_t seed) {
        Rng rng(derive_seed(seed, "init"));
        Scene3DVG scene = random_ball_init(n_paths, rng);
        scene_path = scratch.path("scene.json");
        net_path = scratch.path("net.bin");
        save_scene(scene, scene_path);
        const ImportanceNet net(derive_seed(seed, "net"), 4, 16);
        write_tensors(net.to_tensors(), net_path);
    }
};

std::string write_size_config(const Scratch& scratch, int size) {
    json cfg;
    cfg["camera_sampler"] = {{"image_width", size}, {"image_height", size}};
    const std::string path = scratch.path("config.json");
    write_text_file(path, cfg.dump(2) + "\n");
    return path;
}

const std::string kTinyFit =
    "fit --oracle sphere --paths 4 --steps 4 --batch 2 --size 32";

}  // namespace

TEST_CASE("cli help and usage errors") {
    Scratch scratch("usage");

    const CmdResult help = run_cli(scratch, "--help");
    CHECK(help.code == 0);
    CHECK(contains(help.output, "fit"));
    CHECK(contains(help.output, "render"));
    CHECK(contains(help.output, "metrics"));
    CHECK(contains(help.output, "schedule"));
    CHECK(contains(help.output, "viz"));

    CHECK(run_cli(scratch, "").code == 1);                     // subcommand required
    CHECK(run_cli(scratch, "frobnicate").code == 1);           // unknown subcommand
    CHECK(run_cli(scratch, "schedule --no-such-flag").code == 1);
    CHECK(run_cli(scratch, "fit --oracle sphere").code == 1);  // --out is required
    CHECK(run_cli(scratch, "metrics --scene a.json").code == 1);  // --net is required
}

TEST_CASE("cli schedule dump matches library replay") {
    Scratch scratch("sched");
    const CmdResult r = run_cli(scratch, "schedule --dump --steps 24 --seed 9");
    REQUIRE(r.code == 0);

    const std::vector<std::string> lines = split_lines(r.output);
    REQUIRE(lines.size() == 25);
    CHECK(lines[0] == "step,t,cfg_scale");

    ScheduleConfig cfg;
    cfg.total_steps = 24;
    Rng t_rng(derive_seed(9, "t"));
    for (int step = 0; step < 24; ++step) {
        const int t = anneal_timestep(step, cfg, t_rng);
        char expect[64];
        std::snprintf(expect, sizeof(expect), "%d,%d,%.10g", step, t, cfg_scale(t, cfg));
        CHECK(lines[static_cast<std::size_t>(step) + 1] == expect);
    }
}

TEST_CASE("cli schedule --out writes csv plus manifest") {
    Scratch scratch("schedout");
    const std::string out = scratch.path("sch");
    const CmdResult saved =
        run_cli(scratch, "schedule --dump --steps 10 --seed 4 --out " + quoted(out));
    REQUIRE(saved.code == 0);
    REQUIRE(fs::exists(fs::path(out) / "schedule.csv"));
    REQUIRE(fs::exists(fs::path(out) / "manifest.json"));

    // File content is byte-identical to the stdout variant of the same dump.
    const CmdResult streamed = run_cli(scratch, "schedule --dump --steps 10 --seed 4");
    REQUIRE(streamed.code == 0);
    CHECK(slurp(fs::path(out) / "schedule.csv") == streamed.output);

    const json manifest = json::parse(slurp(fs::path(out) / "manifest.json"));
    CHECK(manifest.at("command") == "schedule");
    CHECK(manifest.at("seed") == 4);
    CHECK(manifest.at("outputs") == json::array({"schedule.csv"}));
    CHECK(manifest.at("engine_version").is_string());
    CHECK(manifest.at("wall_clock_sec").get<double>() >= 0.0);
}

TEST_CASE("cli schedule without --dump prints a summary") {
    Scratch scratch("schedsum");
    const CmdResult r = run_cli(scratch, "schedule --steps 12");
    CHECK(r.code == 0);
    CHECK(contains(r.output, "total_steps=12"));
    CHECK(contains(r.output, "N=1000"));
}

TEST_CASE("cli fit writes scene, net, log and manifest") {
    Scratch scratch("fit");
    const std::string out = scratch.path("run");
    const CmdResult r = run_cli(scratch, kTinyFit + " --seed 5 --out " + quoted(out));
    REQUIRE(r.code == 0);
    CHECK(contains(r.output, "fit: wrote"));

    const fs::path dir(out);
    REQUIRE(fs::exists(dir / "scene.json"));
    REQUIRE(fs::exists(dir / "net.bin"));
    REQUIRE(fs::exists(dir / "log.jsonl"));
    REQUIRE(fs::exists(dir / "manifest.json"));

    const Scene3DVG scene = load_scene((dir / "scene.json").string());
    CHECK(scene.paths.size() == 4);
    CHECK_NOTHROW(validate_scene(scene));

    const ImportanceNet net = ImportanceNet::from_tensors(read_tensors((dir / "net.bin").string()));
    CHECK(net.input_dim() > 0);

    // log_every defaults to 1: one record per step, the last one at step 3.
    const std::vector<std::string> lines = split_lines(slurp(dir / "log.jsonl"));
    REQUIRE(lines.size() == 4);
    const json last = json::parse(lines.back());
    CHECK(last.at("step") == 3);
    CHECK(last.at("loss_total").is_number());
    CHECK(last.at("loss_per_term").contains("structural"));
    CHECK(last.at("loss_per_term").contains("semantic"));
    CHECK(last.at("cfg_scale").is_number());
    CHECK(last.at("t").is_number_integer());

    const json manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("command") == "fit");
    CHECK(manifest.at("seed") == 5);
    CHECK(manifest.at("inputs").at("guidance") == "sphere");
    CHECK(manifest.at("config").at("fit").at("total_steps") == 4);
    CHECK(manifest.at("config").at("camera_sampler").at("image_width") == 32);
    const json outputs = manifest.at("outputs");
    CHECK(std::find(outputs.begin(), outputs.end(), json("scene.json")) != outputs.end());
}

TEST_CASE("cli fit is reproducible for a fixed seed") {
    Scratch scratch("seed");
    const std::string a = scratch.path("a");
    const std::string b = scratch.path("b");
    const std::string c = scratch.path("c");
    const std::string base = "fit --oracle sphere --paths 3 --steps 3 --batch 2 --size 32";
    REQUIRE(run_cli(scratch, base + " --seed 9 --out " + quoted(a)).code == 0);
    REQUIRE(run_cli(scratch, base + " --seed 9 --out " + quoted(b)).code == 0);
    REQUIRE(run_cli(scratch, base + " --seed 10 --out " + quoted(c)).code == 0);

    CHECK(slurp(fs::path(a) / "scene.json") == slurp(fs::path(b) / "scene.json"));
    CHECK(slurp(fs::path(a) / "net.bin") == slurp(fs::path(b) / "net.bin"));
    CHECK(slurp(fs::path(a) / "log.jsonl") == slurp(fs::path(b) / "log.jsonl"));
    CHECK(slurp(fs::path(a) / "scene.json") != slurp(fs::path(c) / "scene.json"));
}

TEST_CASE("cli render writes png, svg and camera sidecars") {
    Scratch scratch("render");
    const SavedModel model(scratch, 4, 11);
    const std::string cfg = write_size_config(scratch, 48);
    const std::string out = scratch.path("views");

    const CmdResult r = run_cli(
        scratch, "render --scene " + quoted(model.scene_path) + " --net " +
                     quoted(model.net_path) + " --views ring:2 --config " + quoted(cfg) +
                     " --out " + quoted(out));
    REQUIRE(r.code == 0);

    const fs::path dir(out);
    for (const char* base : {"view_00", "view_01"}) {
        CAPTURE(base);
        REQUIRE(fs::exists(dir / (std::string(base) + ".png")));
        REQUIRE(fs::exists(dir / (std::string(base) + ".svg")));
        REQUIRE(fs::exists(dir / (std::string(base) + ".json")));
    }
    REQUIRE(fs::exists(dir / "manifest.json"));

    const Image png = read_png((dir / "view_00.png").string());
    CHECK(png.width == 48);
    CHECK(png.height == 48);
    CHECK(png.channels == 4);  // rasterizer output is RGBA with alpha = 1

    const std::string svg = slurp(dir / "view_00.svg");
    CHECK(contains(svg, "<svg"));
    CHECK(contains(svg, "width=\"48\""));

    // The sidecar camera matches the first ring pose at the configured size.
    const Camera cam = load_camera((dir / "view_00.json").string());
    CameraSamplerConfig sampler;
    sampler.image_width = 48;
    sampler.image_height = 48;
    const Camera expect = ring_cameras(2, sampler)[0];
    CHECK(cam.width == 48);
    CHECK(cam.position.x == doctest::Approx(expect.position.x).epsilon(1e-12));
    CHECK(cam.position.y == doctest::Approx(expect.position.y).epsilon(1e-12));
    CHECK(cam.position.z == doctest::Approx(expect.position.z).epsilon(1e-12));

    SUBCASE("--png suppresses svg output") {
        const std::string png_only = scratch.path("png_only");
        REQUIRE(run_cli(scratch, "render --scene " + quoted(model.scene_path) +
                                     " --views ring:1 --config " + quoted(cfg) +
                                     " --png --out " + quoted(png_only))
                    .code == 0);
        CHECK(fs::exists(fs::path(png_only) / "view_00.png"));
        CHECK(!fs::exists(fs::path(png_only) / "view_00.svg"));
    }

    SUBCASE("--camera renders exactly the given poses") {
        Camera cam32;
        cam32.position = {0.0, -3.5, 0.9};
        cam32.width = 32;
        cam32.height = 32;
        const std::string cam_file = scratch.path("cam.json");
        save_camera(cam32, cam_file);
        const std::string posed = scratch.path("posed");
        REQUIRE(run_cli(scratch, "render --scene " + quoted(model.scene_path) +
                                     " --camera " + quoted(cam_file) + " --out " +
                                     quoted(posed))
                    .code == 0);
        CHECK(fs::exists(fs::path(posed) / "view_00.png"));
        CHECK(!fs::exists(fs::path(posed) / "view_01.png"));
        const Image img = read_png((fs::path(posed) / "view_00.png").string());
        CHECK(img.width == 32);
    }
}

TEST_CASE("cli metrics prints adjacent view consistency") {
    Scratch scratch("metrics");
    const SavedModel model(scratch, 4, 19);
    const std::string cfg = write_size_config(scratch, 48);
    const std::string out = scratch.path("m");

    const CmdResult r = run_cli(
        scratch, "metrics --scene " + quoted(model.scene_path) + " --net " +
                     quoted(model.net_path) + " --views ring:3 --config " + quoted(cfg) +
                     " --out " + quoted(out));
    REQUIRE(r.code == 0);

    const json report = json::parse(r.output);
    REQUIRE(report.contains("adjacent_view_consistency"));
    const double consistency = report.at("adjacent_view_consistency").get<double>();
    CHECK(consistency >= 0.0);
    CHECK(report.at("views") == 3);
    CHECK(report.at("distance") == "pyramid-l2");

    const json saved = json::parse(slurp(fs::path(out) / "metrics.json"));
    CHECK(saved.at("adjacent_view_consistency").get<double>() == consistency);
    CHECK(fs::exists(fs::path(out) / "manifest.json"));

    SUBCASE("cosine distance is also accepted") {
        const CmdResult cos = run_cli(
            scratch, "metrics --scene " + quoted(model.scene_path) + " --net " +
                         quoted(model.net_path) + " --views ring:3 --distance cosine" +
                         " --config " + quoted(cfg));
        REQUIRE(cos.code == 0);
        CHECK(json::parse(cos.output).at("distance") == "cosine");
    }

    SUBCASE("fewer than three views is a validation error") {
        CHECK(run_cli(scratch, "metrics --scene " + quoted(model.scene_path) +
                                   " --net " + quoted(model.net_path) +
                                   " --views ring:2 --config " + quoted(cfg))
                  .code == 1);
    }
}

TEST_CASE("cli viz writes importance and vote overlays") {
    Scratch scratch("viz");
    const SavedModel model(scratch, 4, 23);
    const std::string cfg = write_size_config(scratch, 48);
    const std::string out = scratch.path("v");

    const CmdResult r = run_cli(scratch, "viz --scene " + quoted(model.scene_path) +
                                             " --net " + quoted(model.net_path) +
                                             " --config " + quoted(cfg) + " --out " +
                                             quoted(out));
    REQUIRE(r.code == 0);

    const fs::path dir(out);
    REQUIRE(fs::exists(dir / "importance.png"));
    REQUIRE(fs::exists(dir / "votes.png"));
    REQUIRE(fs::exists(dir / "camera.json"));
    REQUIRE(fs::exists(dir / "manifest.json"));
    CHECK(read_png((dir / "importance.png").string()).width == 48);
    CHECK(read_png((dir / "votes.png").string()).height == 48);
    CHECK_NOTHROW(load_camera((dir / "camera.json").string()));
}

TEST_CASE("cli validation failures exit with code 1") {
    Scratch scratch("fail");

    const CmdResult oracle =
        run_cli(scratch, "fit --oracle venus --out " + quoted(scratch.path("x")));
    CHECK(oracle.code == 1);
    CHECK(contains(oracle.output, "unknown oracle"));

    const CmdResult missing_dir = run_cli(
        scratch, "fit --guidance " + quoted(scratch.path("no_such_dir")) +
                     " --init random --paths 2 --steps 2 --out " + quoted(scratch.path("y")));
    CHECK(missing_dir.code == 1);
    CHECK(contains(missing_dir.output, "ingest error"));

    // Farthest-point init has no surface to sample without an oracle.
    const CmdResult farthest = run_cli(
        scratch, "fit --guidance " + quoted(scratch.path("no_such_dir")) +
                     " --init farthest --out " + quoted(scratch.path("z")));
    CHECK(farthest.code == 1);
    CHECK(contains(farthest.output, "config error"));

    CHECK(run_cli(scratch, "render --scene " + quoted(scratch.path("absent.json")) +
                               " --out " + quoted(scratch.path("r")))
              .code == 1);

    const std::string broken = scratch.path("broken.json");
    write_text_file(broken, "{ this is not json\n");
    const CmdResult parse = run_cli(scratch, "schedule --config " + quoted(broken));
    CHECK(parse.code == 1);
    CHECK(contains(parse.output, "config error"));

    // lambda0 above lambda1 fails schedule validation.
    const std::string bad_sched = scratch.path("bad_schedule.json");
    write_text_file(bad_sched, "{\"schedule\": {\"lambda0\": 9.0}}\n");
    CHECK(run_cli(scratch, "schedule --config " + quoted(bad_sched)).code == 1);
}

TEST_CASE("cli fit replays a guidance directory and reports exhaustion") {
    Scratch scratch("dirfit");
    const std::string dir = scratch.path("guidance");

    // Two saved steps of single-camera guidance at 32x32.
    const OracleScene oracle = OracleScene::sphere();
    ScheduleConfig schedule;
    schedule.total_steps = 2;
    const std::vector<Camera> cams = testsupport::sized_ring(1, 32);
    const int ts[2] = {600, 400};
    for (int step = 0; step < 2; ++step) {
        const GuidanceSample sample =
            oracle_render(oracle, cams[0], step, ts[step], schedule, BlurMode::C2F);
        save_guidance_step(dir, step, ts[step], cfg_scale(ts[step], schedule), {sample});
    }

    const std::string ok_out = scratch.path("ok");
    const CmdResult ok = run_cli(
        scratch, "fit --guidance " + quoted(dir) +
                     " --init random --paths 2 --steps 2 --batch 1 --seed 3 --out " +
                     quoted(ok_out));
    REQUIRE(ok.code == 0);
    CHECK(fs::exists(fs::path(ok_out) / "scene.json"));
    const json manifest = json::parse(slurp(fs::path(ok_out) / "manifest.json"));
    CHECK(manifest.at("inputs").at("guidance") == dir);

    // Asking for more steps than were saved is a runtime failure, not a usage
    // error: exit code 2.
    const CmdResult exhausted = run_cli(
        scratch, "fit --guidance " + quoted(dir) +
                     " --init random --paths 2 --steps 5 --batch 1 --seed 3 --out " +
                     quoted(scratch.path("overrun")));
    CHECK(exhausted.code == 2);
    CHECK(contains(exhausted.output, "error"));
}
