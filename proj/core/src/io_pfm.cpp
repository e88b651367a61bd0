#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "curve3dvg/errors.hpp"
#include "curve3dvg/io.hpp"

namespace c3vg {

// Grayscale PFM ("Pf"), little-endian (negative scale), rows stored
// bottom-to-top. Infinite depths are clamped to 1e30 on disk so the payload
// stays plain IEEE floats; reads restore anything >= 1e29 to +inf.

namespace {

constexpr float kInfSentinel = 1e30f;

}  // namespace

void write_pfm(const std::vector<float>& data, int width, int height,
               const std::string& path) {
    if (width <= 0 || height <= 0 ||
        data.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw ConfigError("pfm payload does not match width*height");
    std::ostringstream out;
    out << "Pf\n" << width << " " << height << "\n-1.0\n";
    std::string body;
    body.reserve(data.size() * 4);
    for (int row = height - 1; row >= 0; --row) {
        for (int col = 0; col < width; ++col) {
            float v = data[static_cast<std::size_t>(row) * width + col];
            if (std::isinf(v)) v = kInfSentinel;
            char b[4];
            std::memcpy(b, &v, 4);
            body.append(b, 4);
        }
    }
    write_text_file(path, out.str() + body);
}

std::vector<float> read_pfm(const std::string& path, int& width, int& height) {
    const std::string in = read_text_file(path);
    std::istringstream header(in);
    std::string magic;
    double scale = 0.0;
    header >> magic >> width >> height >> scale;
    if (!header || magic != "Pf" || width <= 0 || height <= 0)
        throw IngestError("not a grayscale PFM", path);
    if (scale >= 0.0) throw IngestError("big-endian PFM not supported", path);
    // The scale line is terminated by exactly one whitespace byte.
    const std::size_t offset = static_cast<std::size_t>(header.tellg()) + 1;
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (offset + count * 4 > in.size()) throw IngestError("truncated PFM payload", path);
    std::vector<float> out(count);
    for (int row = 0; row < height; ++row) {
        const int src_row = height - 1 - row;
        for (int col = 0; col < width; ++col) {
            float v;
            std::memcpy(&v, in.data() + offset +
                                (static_cast<std::size_t>(src_row) * width + col) * 4,
                        4);
            if (v >= 1e29f) v = std::numeric_limits<float>::infinity();
            out[static_cast<std::size_t>(row) * width + col] = v;
        }
    }
    return out;
}

}  // namespace c3vg
