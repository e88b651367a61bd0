#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curve3dvg/camera.hpp"
#include "curve3dvg/image.hpp"
#include "curve3dvg/scene.hpp"

namespace c3vg {

// ---- scene / camera JSON -------------------------------------------------
// Scene files: {"kind": "sketch"|"iconography",
//               "paths": [{"curves": [[[x,y,z] x4] x m],
//                          "color": [r,g,b,a], "stroke_width": w}]}
// Sketch paths carry one curve, iconography paths four end-connected curves.
// Any structural problem (wrong counts, unshared joints, bad ranges) raises
// IngestError naming the file and the offending path/joint.
Scene3DVG load_scene(const std::string& path);
void save_scene(const Scene3DVG& scene, const std::string& path);
Scene3DVG scene_from_json_text(const std::string& text, const std::string& origin = {});
std::string scene_to_json_text(const Scene3DVG& scene);

// Camera files: {"position": [x,y,z], "look_at": [x,y,z], "up": [x,y,z],
//                "fov_deg": f, "width": w, "height": h}
Camera load_camera(const std::string& path);
void save_camera(const Camera& camera, const std::string& path);
Camera camera_from_json_text(const std::string& text, const std::string& origin = {});
std::string camera_to_json_text(const Camera& camera);

// ---- PNG (RGBA8) ---------------------------------------------------------
// Values are clamped to [0,1] and quantized to 8 bits. Images with fewer than
// four channels are broadcast (1 -> gray, 3 -> opaque RGB) on write; reads
// always yield a 4-channel image with values in [0,1].
void write_png(const Image& image, const std::string& path);
Image read_png(const std::string& path);
std::vector<std::uint8_t> encode_png(const Image& image);
Image decode_png(const std::vector<std::uint8_t>& bytes, const std::string& origin = {});

// ---- PFM (single-channel float map) --------------------------------------
// "Pf" header, little-endian (scale -1.0), rows bottom-to-top. +inf values
// are stored as 1e30 and restored to +inf on read (anything >= 1e29 counts).
void write_pfm(const std::vector<float>& data, int width, int height,
               const std::string& path);
std::vector<float> read_pfm(const std::string& path, int& width, int& height);

// ---- raw float32 blobs (network weights) ---------------------------------
// Layout: magic "C3VGNET1", uint32 tensor count, then per tensor a uint32
// rank, uint32 dims, and the row-major float32 payload. Little-endian.
struct NamedTensor {
    std::string name;
    std::vector<std::uint32_t> shape;
    std::vector<float> values;
};
void write_tensors(const std::vector<NamedTensor>& tensors, const std::string& path);
std::vector<NamedTensor> read_tensors(const std::string& path);

// ---- small file helpers --------------------------------------------------
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
bool file_exists(const std::string& path);

}  // namespace c3vg
