#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curve3dvg/errors.hpp"
#include "curve3dvg/io.hpp"

namespace c3vg {

using nlohmann::json;

namespace {

[[noreturn]] void ingest_fail(const std::string& message, const std::string& origin) {
    throw IngestError(origin.empty() ? message : origin + ": " + message, origin);
}

Vec3 parse_vec3(const json& j, const std::string& what, const std::string& origin) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number())
        ingest_fail(what + " must be an array of 3 numbers", origin);
    return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json dump_vec3(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

std::array<Vec3, 4> parse_curve_points(const json& j, const std::string& what,
                                       const std::string& origin) {
    if (!j.is_array() || j.size() != 4)
        ingest_fail(what + " must contain exactly 4 control points", origin);
    std::array<Vec3, 4> pts;
    for (int i = 0; i < 4; ++i)
        pts[i] = parse_vec3(j[i], what + " point " + std::to_string(i), origin);
    return pts;
}

}  // namespace

Scene3DVG scene_from_json_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        ingest_fail(std::string("invalid JSON: ") + e.what(), origin);
    }
    if (!root.is_object() || !root.contains("kind") || !root.contains("paths"))
        ingest_fail("scene must be an object with 'kind' and 'paths'", origin);
    if (!root["kind"].is_string() || root["kind"].get<std::string>() != "scene3dvg")
        ingest_fail("scene kind must be 'scene3dvg'", origin);
    if (!root["paths"].is_array()) ingest_fail("'paths' must be an array", origin);

    Scene3DVG scene;
    for (std::size_t pi = 0; pi < root["paths"].size(); ++pi) {
        const json& jp = root["paths"][pi];
        const std::string where = "path " + std::to_string(pi);
        if (!jp.is_object() || !jp.contains("kind") || !jp.contains("curves"))
            ingest_fail(where + " must be an object with 'kind' and 'curves'", origin);

        const std::string kind_name =
            jp["kind"].is_string() ? jp["kind"].get<std::string>() : "";
        PathKind kind;
        if (kind_name == "sketch")
            kind = PathKind::Sketch;
        else if (kind_name == "iconography")
            kind = PathKind::Iconography;
        else
            ingest_fail(where + " kind must be 'sketch' or 'iconography', got '" +
                            kind_name + "'",
                        origin);
        const int expected_curves = kind == PathKind::Sketch ? 1 : 4;
        const json& jc = jp["curves"];
        if (!jc.is_array() || static_cast<int>(jc.size()) != expected_curves)
            ingest_fail(where + " must have " + std::to_string(expected_curves) +
                            " curve(s) for kind '" + kind_name + "'",
                        origin);

        std::vector<std::array<Vec3, 4>> curves;
        for (int ci = 0; ci < expected_curves; ++ci)
            curves.push_back(parse_curve_points(jc[ci], where + " curve " + std::to_string(ci),
                                                origin));

        Path3D path;
        path.kind = kind;
        if (kind == PathKind::Sketch) {
            path.points.assign(curves[0].begin(), curves[0].end());
        } else {
            for (int j = 0; j < 4; ++j) {
                const Vec3 end = curves[j][3];
                const Vec3 start = curves[(j + 1) % 4][0];
                if (end.x != start.x || end.y != start.y || end.z != start.z)
                    ingest_fail(where + " joint " + std::to_string(j) +
                                    ": curve endpoint does not match next curve start",
                                origin);
            }
            for (int j = 0; j < 4; ++j)
                for (int i = 0; i < 3; ++i) path.points.push_back(curves[j][i]);
        }

        if (jp.contains("color")) {
            const json& col = jp["color"];
            if (!col.is_array() || col.size() != 4)
                ingest_fail(where + " color must be [r,g,b,a]", origin);
            for (int c = 0; c < 4; ++c) {
                if (!col[c].is_number()) ingest_fail(where + " color must be numeric", origin);
                path.color[c] = col[c].get<double>();
                if (path.color[c] < 0.0 || path.color[c] > 1.0)
                    ingest_fail(where + " color channel " + std::to_string(c) +
                                    " outside [0,1]",
                                origin);
            }
        }
        if (jp.contains("stroke_width")) {
            if (!jp["stroke_width"].is_number())
                ingest_fail(where + " stroke_width must be a number", origin);
            path.stroke_width = jp["stroke_width"].get<double>();
            if (!(path.stroke_width > 0.0))
                ingest_fail(where + " stroke_width must be positive", origin);
        }
        for (std::size_t k = 0; k < path.points.size(); ++k) {
            const Vec3& v = path.points[k];
            if (!v.finite())
                ingest_fail(where + " control point " + std::to_string(k) + " is not finite",
                            origin);
        }
        scene.paths.push_back(std::move(path));
    }
    return scene;
}

std::string scene_to_json_text(const Scene3DVG& scene) {
    json root;
    root["kind"] = "scene3dvg";
    root["paths"] = json::array();
    for (const Path3D& p : scene.paths) {
        json jp;
        jp["kind"] = p.kind == PathKind::Sketch ? "sketch" : "iconography";
        json jc = json::array();
        for (int j = 0; j < p.curve_count(); ++j) {
            const BezierCurve3D c = p.curve(j);
            json pts = json::array();
            for (int i = 0; i < 4; ++i) pts.push_back(dump_vec3(c.points[i]));
            jc.push_back(std::move(pts));
        }
        jp["curves"] = std::move(jc);
        jp["color"] = json::array({p.color[0], p.color[1], p.color[2], p.color[3]});
        jp["stroke_width"] = p.stroke_width;
        root["paths"].push_back(std::move(jp));
    }
    return root.dump(2) + "\n";
}

Scene3DVG load_scene(const std::string& path) {
    return scene_from_json_text(read_text_file(path), path);
}

void save_scene(const Scene3DVG& scene, const std::string& path) {
    write_text_file(path, scene_to_json_text(scene));
}

Camera camera_from_json_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        ingest_fail(std::string("invalid JSON: ") + e.what(), origin);
    }
    if (!root.is_object()) ingest_fail("camera must be a JSON object", origin);
    Camera cam;
    if (root.contains("position")) cam.position = parse_vec3(root["position"], "position", origin);
    if (root.contains("look_at")) cam.look_at = parse_vec3(root["look_at"], "look_at", origin);
    if (root.contains("up")) cam.up = parse_vec3(root["up"], "up", origin);
    if (root.contains("fov_deg")) {
        if (!root["fov_deg"].is_number()) ingest_fail("fov_deg must be a number", origin);
        cam.fov_deg = root["fov_deg"].get<double>();
    }
    if (root.contains("width")) {
        if (!root["width"].is_number_integer() || root["width"].get<int>() <= 0)
            ingest_fail("width must be a positive integer", origin);
        cam.width = root["width"].get<int>();
    }
    if (root.contains("height")) {
        if (!root["height"].is_number_integer() || root["height"].get<int>() <= 0)
            ingest_fail("height must be a positive integer", origin);
        cam.height = root["height"].get<int>();
    }
    return cam;
}

std::string camera_to_json_text(const Camera& camera) {
    json root;
    root["position"] = dump_vec3(camera.position);
    root["look_at"] = dump_vec3(camera.look_at);
    root["up"] = dump_vec3(camera.up);
    root["fov_deg"] = camera.fov_deg;
    root["width"] = camera.width;
    root["height"] = camera.height;
    return root.dump(2) + "\n";
}

Camera load_camera(const std::string& path) {
    return camera_from_json_text(read_text_file(path), path);
}

void save_camera(const Camera& camera, const std::string& path) {
    write_text_file(path, camera_to_json_text(camera));
}

// ---- float32 tensor blobs ------------------------------------------------

namespace {

constexpr char kNetMagic[8] = {'C', '3', 'V', 'G', 'N', 'E', 'T', '1'};

void put_u32(std::string& out, std::uint32_t v) {
    char b[4];
    b[0] = static_cast<char>(v & 0xff);
    b[1] = static_cast<char>((v >> 8) & 0xff);
    b[2] = static_cast<char>((v >> 16) & 0xff);
    b[3] = static_cast<char>((v >> 24) & 0xff);
    out.append(b, 4);
}

std::uint32_t get_u32(const std::string& in, std::size_t& pos, const std::string& origin) {
    if (pos + 4 > in.size()) ingest_fail("truncated tensor blob", origin);
    const auto* b = reinterpret_cast<const unsigned char*>(in.data() + pos);
    pos += 4;
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_tensors(const std::vector<NamedTensor>& tensors, const std::string& path) {
    std::string out;
    out.append(kNetMagic, 8);
    put_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const NamedTensor& t : tensors) {
        put_u32(out, static_cast<std::uint32_t>(t.name.size()));
        out.append(t.name);
        put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
        std::size_t count = 1;
        for (std::uint32_t d : t.shape) {
            put_u32(out, d);
            count *= d;
        }
        if (count != t.values.size())
            throw ConfigError("tensor '" + t.name + "' shape does not match value count");
        for (float v : t.values) {
            std::uint32_t bits;
            std::memcpy(&bits, &v, 4);
            put_u32(out, bits);
        }
    }
    write_text_file(path, out);
}

std::vector<NamedTensor> read_tensors(const std::string& path) {
    const std::string in = read_text_file(path);
    if (in.size() < 12 || std::memcmp(in.data(), kNetMagic, 8) != 0)
        ingest_fail("not a tensor blob (bad magic)", path);
    std::size_t pos = 8;
    const std::uint32_t n = get_u32(in, pos, path);
    std::vector<NamedTensor> tensors;
    tensors.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        NamedTensor t;
        const std::uint32_t name_len = get_u32(in, pos, path);
        if (pos + name_len > in.size()) ingest_fail("truncated tensor blob", path);
        t.name.assign(in, pos, name_len);
        pos += name_len;
        const std::uint32_t rank = get_u32(in, pos, path);
        std::size_t count = 1;
        for (std::uint32_t r = 0; r < rank; ++r) {
            t.shape.push_back(get_u32(in, pos, path));
            count *= t.shape.back();
        }
        t.values.resize(count);
        for (std::size_t k = 0; k < count; ++k) {
            const std::uint32_t bits = get_u32(in, pos, path);
            std::memcpy(&t.values[k], &bits, 4);
        }
        tensors.push_back(std::move(t));
    }
    return tensors;
}

// ---- small file helpers --------------------------------------------------

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open file: " + path, path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RunError("cannot write file: " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw RunError("short write: " + path);
}

bool file_exists(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return static_cast<bool>(in);
}

}  // namespace c3vg
